#include <gtest/gtest.h>

#include <random>

#include "haunted/engine.hpp"
#include "haunted/messages.hpp"
#include "haunted/transcript.hpp"
#include "support.hpp"

namespace haunted {
namespace {

using namespace rooms;
using testing::figure2_commands;

class EngineTest : public ::testing::Test {
 protected:
  Engine engine{Scenario::canonical()};

  GameState play(std::initializer_list<const char*> cmds) {
    GameState s = engine.new_game();
    for (const char* c : cmds) s = engine.apply(s, parse_command_text(c)).state;
    return s;
  }
};

TEST_F(EngineTest, NewGameIsCanonicalStart) {
  const GameState s = engine.new_game();
  EXPECT_EQ(s.player, C1);
  EXPECT_EQ(s.ghost, B2);
  EXPECT_EQ(s.door, C1);
  EXPECT_FALSE(s.has_key);
  EXPECT_EQ(s.phase, Phase::Searching);
  EXPECT_EQ(s.moves_used, 0);
  EXPECT_EQ(s.status, Status::InProgress);
  EXPECT_EQ(engine.new_game(), s);
}

TEST_F(EngineTest, ScenarioValidation) {
  Scenario bad = Scenario::canonical();
  bad.key_room = bad.start;
  EXPECT_THROW(bad.validate(), InvalidScenario);
  EXPECT_THROW(Engine{bad}, InvalidScenario);

  Scenario ghost_on_key = Scenario::canonical();
  ghost_on_key.ghost_room = ghost_on_key.key_room;
  EXPECT_THROW(ghost_on_key.validate(), InvalidScenario);

  Scenario no_moves = Scenario::canonical();
  no_moves.move_limit = 0;
  EXPECT_THROW(no_moves.validate(), InvalidScenario);

  EXPECT_NO_THROW(Scenario::canonical().validate());
}

TEST_F(EngineTest, IllegalMoveFromStart) {
  const StepResult r = engine.apply(engine.new_game(), Command(Direction::Right));
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C2});
  EXPECT_EQ(r.state.player, C1);
  EXPECT_EQ(r.state.moves_used, 1);
}

TEST_F(EngineTest, LeftFromStartWarnsOfGhostAndKey) {
  const StepResult r = engine.apply(engine.new_game(), Command(Direction::Left));
  EXPECT_EQ(r.state.player, B1);
  EXPECT_EQ(r.feedback.clues, (std::vector{ClueId::C3, ClueId::C4}));
  EXPECT_EQ(render_feedback(r.feedback, MessageCatalog::english()),
            "There's a ghost nearby. There's a key nearby.");
}

TEST_F(EngineTest, DownFromStartWarnsOfGhost) {
  const StepResult r = engine.apply(engine.new_game(), Command(Direction::Down));
  EXPECT_EQ(r.state.player, C2);
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C3});
}

TEST_F(EngineTest, EnteringGhostRoomKills) {
  const GameState s = play({"left"});
  const StepResult r = engine.apply(s, Command(Direction::Down));
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C11});
  EXPECT_EQ(r.state.status, Status::GhostDeath);
  EXPECT_EQ(r.feedback.terminal, Status::GhostDeath);
}

TEST_F(EngineTest, GhostStillDeadlyWhileReturning) {
  const GameState s = play({"left", "left", "right"});
  ASSERT_EQ(s.phase, Phase::Returning);
  EXPECT_EQ(engine.apply(s, Command(Direction::Down)).state.status, Status::GhostDeath);
}

TEST_F(EngineTest, ReturningToStartRelocatesDoor) {
  const GameState s = play({"left", "left", "right"});
  const StepResult r = engine.apply(s, Command(Direction::Right));
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C6});
  EXPECT_EQ(r.state.door, A3);
  EXPECT_EQ(r.state.phase, Phase::Endgame);
  EXPECT_EQ(r.state.stage, 0);
}

TEST_F(EngineTest, StartRoomIsSilentBeforeKey) {
  const StepResult r = engine.apply(play({"down"}), Command(Direction::Up));
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C1});
  EXPECT_EQ(r.state.door, C1);
}

TEST_F(EngineTest, EitherExitFromStartFiresFirstEvent) {
  const GameState at_c1 = play({"left", "left", "right", "right"});
  for (Direction d : {Direction::Left, Direction::Down}) {
    const StepResult r = engine.apply(at_c1, Command(d));
    EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C7});
    EXPECT_EQ(r.state.ghost, B3);
    EXPECT_EQ(r.state.stage, 1);
  }
  // An illegal move out of C1 fires nothing.
  const StepResult bump = engine.apply(at_c1, Command(Direction::Up));
  EXPECT_EQ(bump.feedback.clues, std::vector{ClueId::C2});
  EXPECT_EQ(bump.state.stage, 0);
}

TEST_F(EngineTest, LeavingA2TowardsGhostDoesNotFireThirdEvent) {
  const GameState in_a2 = play({"left", "left", "right", "right", "left", "left", "down"});
  ASSERT_EQ(in_a2.player, A2);
  ASSERT_EQ(in_a2.stage, 2);
  const StepResult r = engine.apply(in_a2, Command(Direction::Down));
  EXPECT_EQ(r.state.status, Status::GhostDeath);
  EXPECT_EQ(r.feedback.clues, std::vector{ClueId::C11});

  const StepResult via_b2 = engine.apply(in_a2, Command(Direction::Right));
  EXPECT_EQ(via_b2.feedback.clues, std::vector{ClueId::C9});
  EXPECT_EQ(via_b2.state.ghost, C3);
}

TEST_F(EngineTest, Figure2Replay) {
  const std::vector<std::vector<ClueId>> expected = {
      {ClueId::C3}, {ClueId::C1}, {ClueId::C3, ClueId::C4}, {ClueId::C5},
      {ClueId::C1}, {ClueId::C6}, {ClueId::C7},             {ClueId::C1},
      {ClueId::C8}, {ClueId::C9}, {ClueId::C1},             {ClueId::C10}};
  GameState s = engine.new_game();
  const auto cmds = figure2_commands();
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const StepResult r = engine.apply(s, cmds[i]);
    EXPECT_EQ(r.feedback.clues, expected[i]) << "move " << i + 1;
    s = r.state;
  }
  EXPECT_EQ(s.status, Status::Escaped);
  EXPECT_EQ(s.moves_used, 12);
  EXPECT_EQ(s.player, A3);
  EXPECT_THROW(engine.apply(s, Command(Direction::Up)), TerminalState);
}

TEST_F(EngineTest, LegalCommands) {
  const GameState s = engine.new_game();
  EXPECT_EQ(engine.legal_commands(s, CommandForm::Directions),
            (std::vector{Command(Direction::Left), Command(Direction::Down)}));
  EXPECT_EQ(engine.legal_commands(s, CommandForm::Coordinates), (std::vector{Command(B1), Command(C2)}));

  GameState centre = s;
  centre.player = B2;
  EXPECT_EQ(engine.legal_commands(centre, CommandForm::Directions).size(), 4u);
}

TEST_F(EngineTest, CoordinateCommandsMatchDirections) {
  GameState a = engine.new_game();
  GameState b = a;
  for (const Command& c : figure2_commands()) {
    const StepResult ra = engine.apply(a, c);
    const Room target = step(a.player, c.direction()).value();
    const StepResult rb = engine.apply(b, Command(target));
    EXPECT_EQ(ra.state, rb.state);
    EXPECT_EQ(ra.feedback, rb.feedback);
    a = ra.state;
    b = rb.state;
  }
}

TEST_F(EngineTest, CoordinateCommandToNonAdjacentRoomIsIllegal) {
  const GameState s = engine.new_game();
  for (Room r : {A1, C1, B2, C3}) {
    const StepResult res = engine.apply(s, Command(r));
    EXPECT_EQ(res.feedback.clues, std::vector{ClueId::C2}) << format_room(r);
    EXPECT_EQ(res.state.player, C1);
  }
}

TEST_F(EngineTest, TwentyIllegalMovesRunOutOfMoves) {
  GameState s = engine.new_game();
  StepResult r;
  for (int i = 0; i < 20; ++i) {
    r = engine.apply(s, Command(Direction::Up));
    s = r.state;
    EXPECT_EQ(s.player, C1);
  }
  EXPECT_EQ(s.status, Status::OutOfMoves);
  EXPECT_EQ(r.feedback.clues, (std::vector{ClueId::C2, ClueId::C12}));
}

TEST_F(EngineTest, EscapeOnTwentiethMoveCounts) {
  // Eight wasted bumps, then the twelve-move walkthrough.
  GameState s = engine.new_game();
  for (int i = 0; i < 8; ++i) s = engine.apply(s, Command(Direction::Up)).state;
  for (const Command& c : figure2_commands()) s = engine.apply(s, c).state;
  EXPECT_EQ(s.moves_used, 20);
  EXPECT_EQ(s.status, Status::Escaped);
}

TEST_F(EngineTest, ShorterLimitIsHonoured) {
  Scenario sc = Scenario::canonical();
  sc.move_limit = 3;
  const Engine short_engine(sc);
  GameState s = short_engine.new_game();
  for (int i = 0; i < 3; ++i) s = short_engine.apply(s, Command(Direction::Up)).state;
  EXPECT_EQ(s.status, Status::OutOfMoves);
}

TEST_F(EngineTest, PhaseLabels) {
  EXPECT_EQ(phase_label(engine.new_game()), "searching");
  EXPECT_EQ(phase_label(play({"left", "left"})), "returning");
  EXPECT_EQ(phase_label(play({"left", "left", "right", "right", "left"})), "endgame-1");
}

TEST_F(EngineTest, CommandText) {
  EXPECT_EQ(format_command(Command(Direction::Down)), "down");
  EXPECT_EQ(format_command(Command(A2)), "A2");
  EXPECT_EQ(parse_command_text("B3"), Command(B3));
  EXPECT_EQ(parse_command_text("up"), Command(Direction::Up));
  EXPECT_THROW(parse_command_text("sideways"), ParseError);
}

TEST_F(EngineTest, StatusText) {
  for (Status s : {Status::InProgress, Status::Escaped, Status::GhostDeath, Status::OutOfMoves}) {
    EXPECT_EQ(parse_status(to_string(s)), s);
  }
}

// --- properties over random traces ---

TEST_F(EngineTest, RandomTracesKeepInvariants) {
  std::mt19937_64 rng(7);
  const Room ghost_at_stage[] = {B2, B3, A3, C3};
  for (int trial = 0; trial < 3000; ++trial) {
    const auto form = trial % 2 ? CommandForm::Coordinates : CommandForm::Directions;
    GameState s = engine.new_game();
    int last_stage = 0;
    int c6 = 0;
    std::vector<ClueId> events;
    for (const Command& c : testing::random_commands(rng, 25, form)) {
      if (s.status != Status::InProgress) break;
      const bool legal = engine.is_legal(s, c);
      const StepResult r = engine.apply(s, c);
      ASSERT_EQ(r.state.moves_used, s.moves_used + 1);
      ASSERT_EQ(manhattan(s.player, r.state.player), legal ? 1 : 0);
      if (!legal) ASSERT_EQ(r.feedback.clues.front(), ClueId::C2);
      if (s.has_key) {
        for (ClueId id : r.feedback.clues) ASSERT_TRUE(id != ClueId::C3 && id != ClueId::C4);
      }
      if (r.state.phase == Phase::Searching) ASSERT_FALSE(r.state.has_key);
      else ASSERT_TRUE(r.state.has_key);
      if (r.state.phase == Phase::Endgame) {
        ASSERT_GE(r.state.stage, last_stage);
        last_stage = r.state.stage;
        ASSERT_EQ(r.state.door, A3);
        if (r.state.status != Status::GhostDeath) ASSERT_EQ(r.state.ghost, ghost_at_stage[r.state.stage]);
      }
      if (r.state.status == Status::Escaped) {
        ASSERT_TRUE(r.state.has_key);
        ASSERT_EQ(r.state.player, r.state.door);
      }
      for (ClueId id : r.feedback.clues) {
        if (id == ClueId::C6) ++c6;
        if (id == ClueId::C7 || id == ClueId::C8 || id == ClueId::C9) events.push_back(id);
      }
      ASSERT_LE(r.state.moves_used, engine.scenario().move_limit);
      s = r.state;
    }
    ASSERT_LE(c6, 1);
    const std::vector<ClueId> order = {ClueId::C7, ClueId::C8, ClueId::C9};
    ASSERT_TRUE(std::equal(events.begin(), events.end(), order.begin()));
  }
}

TEST_F(EngineTest, ReplayIsDeterministic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cmds = testing::random_commands(rng, 20);
    const Transcript a = replay(engine.scenario(), cmds);
    const Transcript b = replay(engine.scenario(), cmds);
    ASSERT_EQ(nlohmann::json(a), nlohmann::json(b));
  }
}

}  // namespace
}  // namespace haunted
