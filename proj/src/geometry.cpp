#include "haunted/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace haunted {

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
  }
  throw std::logic_error("bad direction");
}

std::optional<Room> step(Room from, Direction dir) {
  int col = from.column_index();
  int row = from.row();
  switch (dir) {
    case Direction::Left: --col; break;
    case Direction::Right: ++col; break;
    case Direction::Up: --row; break;
    case Direction::Down: ++row; break;
  }
  if (col < 0 || col > 2 || row < 1 || row > 3) return std::nullopt;
  return Room(static_cast<Column>(col), row);
}

int manhattan(Room a, Room b) {
  return std::abs(a.column_index() - b.column_index()) + std::abs(a.row() - b.row());
}

bool adjacent(Room a, Room b) { return manhattan(a, b) == 1; }

Room max_distance_room(Room from) {
  int best = -1;
  int count = 0;
  Room target = from;
  for (Room r : kAllRooms) {
    int d = manhattan(from, r);
    if (d > best) {
      best = d;
      count = 1;
      target = r;
    } else if (d == best) {
      ++count;
    }
  }
  if (count != 1) {
    throw AmbiguousTarget("no unique farthest room from " + format_room(from));
  }
  return target;
}

Room parse_room(std::string_view label) {
  if (label.size() == 2) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    char r = label[1];
    if (c >= 'A' && c <= 'C' && r >= '1' && r <= '3') {
      return Room(static_cast<Column>(c - 'A'), r - '0');
    }
  }
  throw ParseError("not a room label: '" + std::string(label) + "'");
}

std::string format_room(Room room) {
  return std::string{static_cast<char>('A' + room.column_index()),
                     static_cast<char>('0' + room.row())};
}

Direction parse_direction(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "left") return Direction::Left;
  if (lower == "right") return Direction::Right;
  if (lower == "up") return Direction::Up;
  if (lower == "down") return Direction::Down;
  throw ParseError("not a direction: '" + std::string(text) + "'");
}

std::string format_direction(Direction d) {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
  }
  throw std::logic_error("bad direction");
}

}  // namespace haunted
