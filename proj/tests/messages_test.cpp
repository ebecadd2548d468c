#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "haunted/messages.hpp"
#include "support.hpp"

namespace haunted {
namespace {

using namespace rooms;

const MessageCatalog& en() { return MessageCatalog::english(); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Messages, ClueTexts) {
  EXPECT_EQ(clue_text(ClueId::C3, en()), "There's a ghost nearby");
  EXPECT_EQ(clue_text(ClueId::C10, en()), "Congratulations - You have escaped the haunted house!");
  EXPECT_EQ(clue_text(ClueId::C12, en()), "Game over - You ran out of moves!");
  for (int i = 1; i <= kClueCount; ++i) EXPECT_FALSE(clue_text(static_cast<ClueId>(i), en()).empty());
}

TEST(Messages, RenderJoinsSentences) {
  const std::vector<ClueId> both = {ClueId::C3, ClueId::C4};
  EXPECT_EQ(render_feedback(both, en()), "There's a ghost nearby. There's a key nearby.");
  const std::vector<ClueId> wall = {ClueId::C2};
  EXPECT_EQ(render_feedback(wall, en()), "You cannot move there.");
  const std::vector<ClueId> death = {ClueId::C11};
  EXPECT_EQ(render_feedback(death, en()), "Game over - You encountered the ghost!");
  const std::vector<ClueId> key = {ClueId::C5};
  EXPECT_EQ(render_feedback(key, en()),
            "You found the key! You will no longer be warned that the ghost is nearby.");
}

TEST(Messages, ClueIdText) {
  for (int i = 1; i <= kClueCount; ++i) {
    const auto id = static_cast<ClueId>(i);
    EXPECT_EQ(parse_clue_id(to_string(id)), id);
  }
  EXPECT_THROW(parse_clue_id("C13"), std::invalid_argument);
}

TEST(Messages, OriginalInstructions) {
  const std::string text = instructions(InstructionVariant::Original, en());
  EXPECT_EQ(text.rfind("Welcome to the Haunted House game!", 0), 0u);
  EXPECT_NE(text.find("You do not know which room you start in."), std::string::npos);
  EXPECT_NE(text.find("You must do this in less than 20 moves."), std::string::npos);
  EXPECT_EQ(text.find("stationary"), std::string::npos);
  EXPECT_EQ(text.find("C1"), std::string::npos);
  EXPECT_EQ(instructions(InstructionVariant::Original, en()), text);
}

TEST(Messages, GhostAddsOnlyTheStationaryBullet) {
  const auto orig = lines(instructions(InstructionVariant::Original, en()));
  auto ghost = lines(instructions(InstructionVariant::Ghost, en()));
  const std::string bullet = "- The ghost remains stationary in the house unless stated otherwise.";
  auto it = std::find(ghost.begin(), ghost.end(), bullet);
  ASSERT_NE(it, ghost.end());
  // It belongs to the information subsection, before "Movement:".
  EXPECT_LT(it - ghost.begin(), std::find(ghost.begin(), ghost.end(), "Movement:") - ghost.begin());
  ghost.erase(it);
  EXPECT_EQ(ghost, orig);
}

TEST(Messages, CoordinatesDiffersFromGhostInFourLines) {
  const auto ghost = lines(instructions(InstructionVariant::Ghost, en()));
  const auto coords = lines(instructions(InstructionVariant::Coordinates, en()));
  ASSERT_EQ(ghost.size(), coords.size());
  std::vector<std::string> changed;
  for (std::size_t i = 0; i < ghost.size(); ++i) {
    if (ghost[i] != coords[i]) changed.push_back(coords[i]);
  }
  ASSERT_EQ(changed.size(), 4u);
  EXPECT_NE(changed[0].find("columns are labeled A, B, and C"), std::string::npos);
  EXPECT_EQ(changed[1], "- You start in C1.");
  EXPECT_EQ(changed[2], "- To move, simply type the coordinates of the room you want to go (e.g. A2, C3, B1).");
  EXPECT_EQ(changed[3], "To start the game, type the first room you want to move to.");
}

TEST(Messages, OpeningPrompt) {
  for (auto v : {InstructionVariant::Original, InstructionVariant::Ghost, InstructionVariant::Coordinates}) {
    const std::string prompt = opening_prompt(v, en());
    EXPECT_EQ(prompt, "You are the player, solve the task...\n\n" + instructions(v, en()));
  }
}

TEST(Messages, VariantNames) {
  for (auto v : {InstructionVariant::Original, InstructionVariant::Ghost, InstructionVariant::Coordinates}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_EQ(parse_variant("Ghost"), InstructionVariant::Ghost);
  EXPECT_THROW(parse_variant("maze"), std::invalid_argument);
  EXPECT_EQ(command_form(InstructionVariant::Coordinates), CommandForm::Coordinates);
  EXPECT_EQ(command_form(InstructionVariant::Ghost), CommandForm::Directions);
}

TEST(Messages, ParseLastToken) {
  const auto v = InstructionVariant::Original;
  EXPECT_EQ(parse_command("I will move left.", v), Command(Direction::Left));
  EXPECT_EQ(parse_command("Up is risky; I choose down", v), Command(Direction::Down));
  EXPECT_FALSE(parse_command("Let me think about the ghost...", v));
  EXPECT_FALSE(parse_command("", v));
  EXPECT_EQ(parse_command("**RIGHT**", v), Command(Direction::Right));
  // Substrings of longer words do not count.
  EXPECT_FALSE(parse_command("upstairs and downstream", v));
  EXPECT_FALSE(parse_command("The key is nearby, so A1 it is", v));
}

TEST(Messages, ParseCoordinates) {
  const auto v = InstructionVariant::Coordinates;
  EXPECT_EQ(parse_command("From C1 I go to B1", v), Command(B1));
  EXPECT_EQ(parse_command("c2", v), Command(C2));
  EXPECT_FALSE(parse_command("left", v));
  EXPECT_FALSE(parse_command("D4", v));
}

TEST(Messages, ParseStrict) {
  const auto v = InstructionVariant::Original;
  EXPECT_EQ(parse_command("  down \n", v, ParseMode::Strict), Command(Direction::Down));
  EXPECT_EQ(parse_command("Down", v, ParseMode::Strict), Command(Direction::Down));
  EXPECT_FALSE(parse_command("go down", v, ParseMode::Strict));
  EXPECT_FALSE(parse_command("down.", v, ParseMode::Strict));
}

TEST(Messages, ParseRoundTrip) {
  for (Direction d : kAllDirections) {
    EXPECT_EQ(parse_command(format_direction(d), InstructionVariant::Original), Command(d));
  }
  for (Room r : kAllRooms) {
    EXPECT_EQ(parse_command(format_room(r), InstructionVariant::Coordinates), Command(r));
  }
}

TEST(Messages, CatalogParsing) {
  const auto c = MessageCatalog::parse("# comment\n\nC1 = Nothing\n  C2=Blocked  \n", "xx");
  EXPECT_EQ(c.locale(), "xx");
  EXPECT_EQ(c.get("C1"), "Nothing");
  EXPECT_EQ(c.get("C2"), "Blocked");
  EXPECT_FALSE(c.contains("C3"));
  EXPECT_THROW(c.get("C3"), MissingEntry);
  EXPECT_THROW(clue_text(ClueId::C3, c), MissingEntry);
}

TEST(Messages, CatalogSetLoadsDirectory) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "de.catalog");
    for (const auto& [key, value] : en().entries()) {
      if (key != "C1") out << key << " = " << value << "\n";
    }
    out << "C1 = Hier ist nichts von Interesse\n";
  }
  CatalogSet set = CatalogSet::with_defaults();
  EXPECT_TRUE(set.contains("en"));
  EXPECT_FALSE(set.contains("de"));
  set.load_directory(dir.path());
  ASSERT_TRUE(set.contains("de"));
  EXPECT_EQ(clue_text(ClueId::C1, set.at("de")), "Hier ist nichts von Interesse");
  EXPECT_THROW(set.at("fr"), MissingEntry);
}

TEST(Messages, EnglishCatalogIsComplete) {
  for (const char* key : {"intro.title", "intro.body", "prompt.opening", "prompt.reprompt",
                          "prompt.reprompt.coordinates", "info.stationary"}) {
    EXPECT_TRUE(en().contains(key)) << key;
  }
  EXPECT_EQ(reprompt_text(InstructionVariant::Original, en()), en().get("prompt.reprompt"));
  EXPECT_EQ(reprompt_text(InstructionVariant::Coordinates, en()), en().get("prompt.reprompt.coordinates"));
}

}  // namespace
}  // namespace haunted
