#pragma once

#include <array>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "haunted/engine.hpp"
#include "haunted/transcript.hpp"

namespace haunted {

/// WallsOnly uses move legality alone; ClueAugmented also requires some
/// ghost/key placement to explain every observed clue.
enum class BeliefMode { WallsOnly, ClueAugmented };

std::string to_string(BeliefMode m);
BeliefMode parse_belief_mode(std::string_view text);  // "walls" | "clues"

class InconsistentHistory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What a player could know about where they are: every (start, current)
/// pair consistent with the observations so far.
struct BeliefState {
  std::set<std::pair<Room, Room>> candidates;
  BeliefMode mode = BeliefMode::WallsOnly;

  std::set<Room> currents() const;
  std::set<Room> starts() const;
  /// The current room when it is uniquely determined.
  std::optional<Room> known_room() const;
};

/// Belief after the given moves, using only player-visible data (commands,
/// legality, clue ids). Throws InconsistentHistory if nothing fits.
BeliefState belief(std::span<const MoveRecord> history, BeliefMode mode = BeliefMode::WallsOnly);

enum class ErrorKind {
  SelfLocation,     // illegal move although the location was known
  GuessFromB1,      // B1 -> A1/B2 before visiting C2
  GuessFromC2,      // C1 -> C2 -> B2/C3 before visiting B1
  IgnoredEvidence,  // into B2 after visiting both B1 and C2
  GhostTracking,    // into the ghost's room after the door relocated
};

inline constexpr std::array<ErrorKind, 5> kAllErrorKinds = {
    ErrorKind::SelfLocation, ErrorKind::GuessFromB1, ErrorKind::GuessFromC2,
    ErrorKind::IgnoredEvidence, ErrorKind::GhostTracking};

/// Short code: "E1", "E2a", "E2b", "E2c", "E3".
std::string error_code(ErrorKind k);
std::string error_name(ErrorKind k);

struct ErrorInstance {
  ErrorKind kind;
  int move_index;  // 1-based index of the offending move
  std::string evidence;
};

/// Runs the five move-pattern detectors over a transcript produced by the
/// canonical scenario (ground-truth rooms are read from the move records).
std::vector<ErrorInstance> detect_errors(const Transcript& t,
                                         BeliefMode mode = BeliefMode::WallsOnly);

SubObjectiveFlags detect_subobjectives(const Transcript& t);

struct TranscriptAnalysis {
  std::string session_id;
  std::string group;
  OutcomeStatus status = OutcomeStatus::Incomplete;
  SubObjectiveFlags flags;
  std::vector<ErrorInstance> errors;
};

struct GroupSummary {
  std::string group;
  int n = 0;        // transcripts counted (invalid ones excluded)
  int invalid = 0;  // protocol/transport failures, reported separately
  int passes = 0;
  std::array<int, 5> subobjectives{};  // found_key, returned_c1, reached_a2, avoided_a3, escaped
  std::array<int, 5> error_participants{};  // per ErrorKind, each transcript counted once
  std::array<int, 5> error_instances{};
};

struct AnalysisReport {
  BeliefMode mode = BeliefMode::WallsOnly;
  std::vector<TranscriptAnalysis> transcripts;
  std::vector<GroupSummary> groups;  // in order of first appearance
};

/// `group_labels` is parallel to `ts`; when empty, each transcript is grouped
/// by its agent label.
AnalysisReport aggregate(std::span<const Transcript> ts, std::span<const std::string> group_labels = {},
                         BeliefMode mode = BeliefMode::WallsOnly);

/// "0" for zero, otherwise "k (p%)" with p rounded half up.
std::string format_count(int count, int n);

enum class ReportFormat { Text, Csv, Json };
ReportFormat parse_report_format(std::string_view text);

std::string render(const AnalysisReport& report, ReportFormat format);
nlohmann::json to_json(const AnalysisReport& report);

}  // namespace haunted
