#include "haunted/clue.hpp"

#include <charconv>
#include <stdexcept>

namespace haunted {

std::string to_string(ClueId id) { return "C" + std::to_string(static_cast<int>(id)); }

ClueId parse_clue_id(std::string_view text) {
  if (text.size() >= 2 && (text[0] == 'C' || text[0] == 'c')) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), n);
    if (ec == std::errc{} && ptr == text.data() + text.size() && n >= 1 && n <= kClueCount) {
      return static_cast<ClueId>(n);
    }
  }
  throw std::invalid_argument("unknown clue id: " + std::string(text));
}

}  // namespace haunted
