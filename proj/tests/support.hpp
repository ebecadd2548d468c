#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "haunted/engine.hpp"
#include "haunted/harness.hpp"
#include "haunted/transcript.hpp"

namespace haunted::testing {

inline const std::vector<std::string> kFigure2 = {"down", "up",    "left", "left", "right", "right",
                                                  "left", "left",  "down", "up",   "down",  "down"};

inline std::vector<Command> figure2_commands() {
  std::vector<Command> out;
  for (const auto& s : kFigure2) out.push_back(parse_command_text(s));
  return out;
}

/// Random command sequence; coordinate targets are drawn from all nine rooms.
inline std::vector<Command> random_commands(std::mt19937_64& rng, int length,
                                            CommandForm form = CommandForm::Directions) {
  std::vector<Command> out;
  std::uniform_int_distribution<int> dir(0, 3), room(0, 8);
  for (int i = 0; i < length; ++i) {
    if (form == CommandForm::Directions) out.emplace_back(kAllDirections[dir(rng)]);
    else out.emplace_back(Room::from_index(room(rng)));
  }
  return out;
}

/// Plays random direction commands until the game ends.
inline Transcript random_transcript(std::mt19937_64& rng, const std::string& id = "random") {
  ReplayOptions opts;
  opts.session_id = id;
  return replay(Scenario::canonical(), random_commands(rng, 20), opts);
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("haunted-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace haunted::testing
