#pragma once

// Independent ground truth for the canonical scenario: a naive reference
// simulator written directly from the game rules (sharing no logic with
// Engine), exhaustive enumeration of the reachable state graph, and exact
// success probabilities for stochastic command policies.

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "haunted/clue.hpp"
#include "haunted/engine.hpp"

namespace haunted::oracle {

using Rational = boost::multiprecision::cpp_rational;

class NoWin : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference simulator state with every moving part stored explicitly.
struct RefState {
  Room player = rooms::C1;
  Room ghost = rooms::B2;
  Room door = rooms::C1;
  bool has_key = false;
  bool door_moved = false;
  bool ghost_went_down = false;
  bool ghost_went_left = false;
  bool ghost_went_right = false;
  int moves = 0;
  Status status = Status::InProgress;
};

/// Canonical hashable state: ghost and door are implied by the phase code.
/// Phase codes: 0 searching, 1 returning, 2..5 endgame stage 0..3.
struct OracleState {
  Room player = rooms::C1;
  int phase = 0;
  bool has_key = false;
  int moves_used = 0;
  Status status = Status::InProgress;

  friend bool operator==(const OracleState&, const OracleState&) = default;
  friend auto operator<=>(const OracleState& a, const OracleState& b) {
    return std::tuple(a.player.index(), a.phase, a.has_key, a.moves_used, static_cast<int>(a.status)) <=>
           std::tuple(b.player.index(), b.phase, b.has_key, b.moves_used, static_cast<int>(b.status));
  }
};

OracleState canonical(const RefState& s);
RefState expand(const OracleState& s);

/// Same observable tuple for an engine state.
OracleState from_engine(const GameState& s);

struct RefStep {
  RefState state;
  std::vector<ClueId> clues;
};

/// One move under the game rules; throws TerminalState on a finished game.
RefStep reference_apply(const RefState& state, const Command& cmd, int move_limit = 20);

struct Edge {
  int from = 0;
  int to = 0;
  Command command{Direction::Left};
  std::vector<ClueId> clues;
};

struct StateGraph {
  std::vector<OracleState> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // node -> edge indices
  std::map<OracleState, int> index;
  int move_limit = 20;

  int initial() const { return 0; }
};

/// Breadth-first closure of the initial state over every command of `form`.
StateGraph enumerate_reachable(int move_limit = 20, CommandForm form = CommandForm::Directions);

/// Length of the shortest command sequence that escapes; throws NoWin.
int min_win_length(int move_limit = 20);
std::vector<Command> shortest_win(int move_limit = 20);

using Policy = std::function<std::vector<std::pair<Command, Rational>>(const OracleState&)>;

Policy uniform_direction_policy();
/// Deterministic policy following a winning continuation wherever one exists.
Policy winning_policy(const StateGraph& graph);

/// Exact probability that `policy` escapes from the initial state.
/// Throws std::invalid_argument if some distribution does not sum to one.
Rational random_policy_success(const Policy& policy, int move_limit = 20);

/// Clue-history summary of one path from the initial state.
struct TraceSignature {
  std::array<int, 5> milestone_counts{};  // occurrences of C5..C9, capped at 2
  bool events_out_of_order = false;       // C7, C8, C9 not in that order
  bool warning_after_key = false;         // C3 or C4 after C5
  bool door_clue_repeated = false;        // C6 more than once

  friend auto operator<=>(const TraceSignature&, const TraceSignature&) = default;
};

/// For every node, the set of signatures over all paths reaching it.
std::vector<std::set<TraceSignature>> trace_signatures(const StateGraph& graph);

struct DerivedValues {
  int min_win_length = 0;
  std::vector<Command> shortest_win;
  Rational uniform_random_success;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t escaped_nodes = 0;
  int move_limit = 20;
};

DerivedValues compute_derived_values(int move_limit = 20);
nlohmann::json to_json(const DerivedValues& v);

std::string to_decimal(const Rational& r, int digits = 30);

}  // namespace haunted::oracle
