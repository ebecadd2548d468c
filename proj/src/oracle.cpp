#include "haunted/oracle.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <sstream>

namespace haunted::oracle {

namespace {

// Plain column/row arithmetic, kept local so nothing here depends on the
// engine's geometry helpers.
struct Cell {
  int col;
  int row;
};

Cell cell(Room r) { return {r.column_index(), r.row()}; }
Room room(Cell c) { return Room(static_cast<Column>(c.col), c.row); }
bool on_grid(Cell c) { return c.col >= 0 && c.col <= 2 && c.row >= 1 && c.row <= 3; }
bool next_to(Room a, Room b) {
  Cell x = cell(a), y = cell(b);
  int d = (x.col > y.col ? x.col - y.col : y.col - x.col) + (x.row > y.row ? x.row - y.row : y.row - x.row);
  return d == 1;
}

int phase_code(const RefState& s) {
  if (!s.has_key) return 0;
  if (!s.door_moved) return 1;
  return 2 + int(s.ghost_went_down) + int(s.ghost_went_left) + int(s.ghost_went_right);
}

}  // namespace

OracleState canonical(const RefState& s) {
  return OracleState{s.player, phase_code(s), s.has_key, s.moves, s.status};
}

RefState expand(const OracleState& s) {
  using namespace rooms;
  RefState r;
  r.player = s.player;
  r.has_key = s.has_key;
  r.moves = s.moves_used;
  r.status = s.status;
  r.door_moved = s.phase >= 2;
  r.ghost_went_down = s.phase >= 3;
  r.ghost_went_left = s.phase >= 4;
  r.ghost_went_right = s.phase >= 5;
  r.door = r.door_moved ? A3 : C1;
  r.ghost = r.ghost_went_right ? C3 : r.ghost_went_left ? A3 : r.ghost_went_down ? B3 : B2;
  return r;
}

OracleState from_engine(const GameState& s) {
  int phase = 0;
  switch (s.phase) {
    case Phase::Searching: phase = 0; break;
    case Phase::Returning: phase = 1; break;
    case Phase::Endgame: phase = 2 + s.stage; break;
  }
  return OracleState{s.player, phase, s.has_key, s.moves_used, s.status};
}

RefStep reference_apply(const RefState& state, const Command& cmd, int move_limit) {
  using namespace rooms;
  if (state.status != Status::InProgress) throw TerminalState("reference game already over");
  RefStep out{state, {}};
  RefState& s = out.state;
  auto& clues = out.clues;

  // Where does the command lead?
  bool legal = false;
  Room target = s.player;
  if (cmd.is_direction()) {
    Cell c = cell(s.player);
    switch (cmd.direction()) {
      case Direction::Left: c.col -= 1; break;
      case Direction::Right: c.col += 1; break;
      case Direction::Up: c.row -= 1; break;
      case Direction::Down: c.row += 1; break;
    }
    if (on_grid(c)) {
      legal = true;
      target = room(c);
    }
  } else if (next_to(s.player, cmd.target())) {
    legal = true;
    target = cmd.target();
  }

  if (!legal) {
    clues = {ClueId::C2};
  } else {
    const Room from = s.player;
    s.player = target;
    if (s.player == s.ghost) {
      clues = {ClueId::C11};
      s.status = Status::GhostDeath;
    } else if (s.door_moved) {
      if (!s.ghost_went_down && from == C1) {
        s.ghost = B3;
        s.ghost_went_down = true;
        clues = {ClueId::C7};
      } else if (s.ghost_went_down && !s.ghost_went_left && s.player == A2) {
        s.ghost = A3;
        s.ghost_went_left = true;
        clues = {ClueId::C8};
      } else if (s.ghost_went_left && !s.ghost_went_right && from == A2) {
        s.ghost = C3;
        s.ghost_went_right = true;
        clues = {ClueId::C9};
      } else if (s.ghost_went_right && s.player == s.door) {
        clues = {ClueId::C10};
        s.status = Status::Escaped;
      } else {
        clues = {ClueId::C1};
      }
    } else if (!s.has_key) {
      if (s.player == A1) {
        s.has_key = true;
        clues = {ClueId::C5};
      } else {
        if (next_to(s.player, s.ghost)) clues.push_back(ClueId::C3);
        if (next_to(s.player, A1)) clues.push_back(ClueId::C4);
        if (clues.empty()) clues.push_back(ClueId::C1);
      }
    } else if (s.player == C1) {
      s.door = A3;
      s.door_moved = true;
      clues = {ClueId::C6};
    } else {
      clues = {ClueId::C1};
    }
  }

  s.moves += 1;
  if (s.moves == move_limit && s.status == Status::InProgress) {
    s.status = Status::OutOfMoves;
    clues.push_back(ClueId::C12);
  }
  return out;
}

namespace {

std::vector<Command> commands_for(CommandForm form) {
  std::vector<Command> cmds;
  if (form == CommandForm::Directions) {
    for (Direction d : kAllDirections) cmds.emplace_back(d);
  } else {
    for (Room r : kAllRooms) cmds.emplace_back(r);
  }
  return cmds;
}

}  // namespace

StateGraph enumerate_reachable(int move_limit, CommandForm form) {
  StateGraph g;
  g.move_limit = move_limit;
  const auto cmds = commands_for(form);

  auto intern = [&g](const OracleState& s) {
    auto [it, inserted] = g.index.emplace(s, static_cast<int>(g.nodes.size()));
    if (inserted) {
      g.nodes.push_back(s);
      g.out_edges.emplace_back();
    }
    return std::pair{it->second, inserted};
  };

  std::deque<int> queue;
  queue.push_back(intern(canonical(RefState{})).first);
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const OracleState here = g.nodes[id];
    if (here.status != Status::InProgress) continue;
    for (const Command& c : cmds) {
      RefStep step = reference_apply(expand(here), c, move_limit);
      auto [to, fresh] = intern(canonical(step.state));
      g.out_edges[id].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(Edge{id, to, c, std::move(step.clues)});
      if (fresh) queue.push_back(to);
    }
  }
  return g;
}

std::vector<Command> shortest_win(int move_limit) {
  const StateGraph g = enumerate_reachable(move_limit);
  // Nodes are discovered in BFS order, so the first escaped node has the
  // fewest moves; walk parent edges back from it.
  std::vector<int> parent_edge(g.nodes.size(), -1);
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<int> queue{g.initial()};
  seen[g.initial()] = true;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    if (g.nodes[id].status == Status::Escaped) {
      std::vector<Command> path;
      for (int n = id; parent_edge[n] >= 0; n = g.edges[parent_edge[n]].from) {
        path.insert(path.begin(), g.edges[parent_edge[n]].command);
      }
      return path;
    }
    for (int e : g.out_edges[id]) {
      int to = g.edges[e].to;
      if (!seen[to]) {
        seen[to] = true;
        parent_edge[to] = e;
        queue.push_back(to);
      }
    }
  }
  throw NoWin("no escaping command sequence within " + std::to_string(move_limit) + " moves");
}

int min_win_length(int move_limit) { return static_cast<int>(shortest_win(move_limit).size()); }

Policy uniform_direction_policy() {
  return [](const OracleState&) {
    std::vector<std::pair<Command, Rational>> dist;
    for (Direction d : kAllDirections) dist.emplace_back(Command(d), Rational(1, 4));
    return dist;
  };
}

Policy winning_policy(const StateGraph& graph) {
  // can_win[n]: some path from n escapes. Edges always increase moves_used,
  // so processing nodes by descending move count is a valid reverse order.
  std::vector<int> order(graph.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return graph.nodes[a].moves_used > graph.nodes[b].moves_used;
  });
  std::vector<int> choice(graph.nodes.size(), -1);
  std::vector<bool> can_win(graph.nodes.size(), false);
  for (int n : order) {
    if (graph.nodes[n].status == Status::Escaped) {
      can_win[n] = true;
      continue;
    }
    for (int e : graph.out_edges[n]) {
      if (can_win[graph.edges[e].to]) {
        can_win[n] = true;
        choice[n] = e;
        break;
      }
    }
  }
  auto pick = std::make_shared<std::map<OracleState, Command>>();
  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    const auto& out = graph.out_edges[n];
    if (out.empty()) continue;
    int e = choice[n] >= 0 ? choice[n] : out.front();
    pick->emplace(graph.nodes[n], graph.edges[e].command);
  }
  return [pick](const OracleState& s) {
    std::vector<std::pair<Command, Rational>> dist;
    dist.emplace_back(pick->at(s), Rational(1));
    return dist;
  };
}

Rational random_policy_success(const Policy& policy, int move_limit) {
  std::map<OracleState, Rational> memo;
  std::function<Rational(const OracleState&)> value = [&](const OracleState& s) -> Rational {
    if (s.status == Status::Escaped) return Rational(1);
    if (s.status != Status::InProgress) return Rational(0);
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    Rational total(0);
    Rational mass(0);
    for (const auto& [cmd, p] : policy(s)) {
      if (p < 0) throw std::invalid_argument("negative command probability");
      mass += p;
      if (p == 0) continue;
      total += p * value(canonical(reference_apply(expand(s), cmd, move_limit).state));
    }
    if (mass != 1) throw std::invalid_argument("policy distribution does not sum to one");
    memo.emplace(s, total);
    return total;
  };
  return value(canonical(RefState{}));
}

std::vector<std::set<TraceSignature>> trace_signatures(const StateGraph& graph) {
  std::vector<int> order(graph.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return graph.nodes[a].moves_used < graph.nodes[b].moves_used;
  });

  std::vector<std::set<TraceSignature>> sigs(graph.nodes.size());
  sigs[graph.initial()].insert(TraceSignature{});
  for (int n : order) {
    for (int e : graph.out_edges[n]) {
      const Edge& edge = graph.edges[e];
      for (TraceSignature sig : sigs[n]) {
        for (ClueId c : edge.clues) {
          const int ci = static_cast<int>(c);
          if ((c == ClueId::C3 || c == ClueId::C4) && sig.milestone_counts[0] > 0) {
            sig.warning_after_key = true;
          }
          if (c == ClueId::C6 && sig.milestone_counts[1] > 0) sig.door_clue_repeated = true;
          if (c == ClueId::C8 && sig.milestone_counts[2] == 0) sig.events_out_of_order = true;
          if (c == ClueId::C9 && sig.milestone_counts[3] == 0) sig.events_out_of_order = true;
          if (ci >= 5 && ci <= 9) {
            int& count = sig.milestone_counts[ci - 5];
            count = std::min(count + 1, 2);
          }
        }
        sigs[edge.to].insert(sig);
      }
    }
  }
  return sigs;
}

DerivedValues compute_derived_values(int move_limit) {
  DerivedValues v;
  v.move_limit = move_limit;
  const StateGraph g = enumerate_reachable(move_limit);
  v.nodes = g.nodes.size();
  v.edges = g.edges.size();
  for (const auto& n : g.nodes) v.escaped_nodes += n.status == Status::Escaped ? 1 : 0;
  v.shortest_win = shortest_win(move_limit);
  v.min_win_length = static_cast<int>(v.shortest_win.size());
  v.uniform_random_success = random_policy_success(uniform_direction_policy(), move_limit);
  return v;
}

std::string to_decimal(const Rational& r, int digits) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  std::ostringstream out;
  if (num < 0) {
    out << '-';
    num = -num;
  }
  out << num / den << '.';
  cpp_int rem = num % den;
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    out << rem / den;
    rem %= den;
  }
  return out.str();
}

nlohmann::json to_json(const DerivedValues& v) {
  nlohmann::json path = nlohmann::json::array();
  for (const auto& c : v.shortest_win) path.push_back(format_command(c));
  std::ostringstream frac;
  frac << v.uniform_random_success;
  return nlohmann::json{
      {"move_limit", v.move_limit},
      {"min_win_length", v.min_win_length},
      {"shortest_win", std::move(path)},
      {"uniform_random_success",
       {{"exact", frac.str()},
        {"numerator", boost::multiprecision::numerator(v.uniform_random_success).str()},
        {"denominator", boost::multiprecision::denominator(v.uniform_random_success).str()},
        {"decimal", to_decimal(v.uniform_random_success)}}},
      {"graph", {{"nodes", v.nodes}, {"edges", v.edges}, {"escaped_nodes", v.escaped_nodes}}},
  };
}

}  // namespace haunted::oracle
