#pragma once

#include <string>
#include <string_view>

namespace haunted {

/// Verbal clue identifiers. C1..C11 are the game's clue set; C12 is the
/// out-of-moves message.
enum class ClueId {
  C1 = 1,  // nothing of interest
  C2,      // cannot move there
  C3,      // ghost nearby
  C4,      // key nearby
  C5,      // found the key
  C6,      // layout changed, door moved
  C7,      // ghost moved down
  C8,      // ghost moved left
  C9,      // ghost moved two right
  C10,     // escaped
  C11,     // met the ghost
  C12,     // out of moves
};

inline constexpr int kClueCount = 12;

std::string to_string(ClueId id);
/// Accepts "C1".."C12"; throws std::invalid_argument otherwise.
ClueId parse_clue_id(std::string_view text);

}  // namespace haunted
