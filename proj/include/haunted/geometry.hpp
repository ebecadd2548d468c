#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace haunted {

/// Column of the 3x3 house, left to right.
enum class Column { A = 0, B = 1, C = 2 };

enum class Direction { Left, Right, Up, Down };

inline constexpr std::array<Direction, 4> kAllDirections = {
    Direction::Left, Direction::Right, Direction::Up, Direction::Down};

/// A room of the house. Rows are numbered 1..3 from top to bottom.
class Room {
 public:
  constexpr Room(Column column, int row) : column_(column), row_(row) {
    if (row < 1 || row > 3) throw std::out_of_range("room row must be 1..3");
  }

  constexpr Column column() const { return column_; }
  constexpr int row() const { return row_; }
  constexpr int column_index() const { return static_cast<int>(column_); }
  /// Row-major index A1=0, B1=1, C1=2, A2=3, ...
  constexpr int index() const { return (row_ - 1) * 3 + column_index(); }

  static constexpr Room from_index(int index) {
    return Room(static_cast<Column>(index % 3), index / 3 + 1);
  }

  friend constexpr bool operator==(Room, Room) = default;
  friend constexpr auto operator<=>(Room a, Room b) { return a.index() <=> b.index(); }

 private:
  Column column_;
  int row_;
};

namespace rooms {
inline constexpr Room A1{Column::A, 1}, B1{Column::B, 1}, C1{Column::C, 1};
inline constexpr Room A2{Column::A, 2}, B2{Column::B, 2}, C2{Column::C, 2};
inline constexpr Room A3{Column::A, 3}, B3{Column::B, 3}, C3{Column::C, 3};
}  // namespace rooms

/// All nine rooms in row-major order.
inline constexpr std::array<Room, 9> kAllRooms = {
    rooms::A1, rooms::B1, rooms::C1, rooms::A2, rooms::B2,
    rooms::C2, rooms::A3, rooms::B3, rooms::C3};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AmbiguousTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Direction opposite(Direction d);

/// The room one step away in `dir`, or nullopt when that would leave the grid.
std::optional<Room> step(Room from, Direction dir);

int manhattan(Room a, Room b);
bool adjacent(Room a, Room b);

/// Unique room farthest from `from`; throws AmbiguousTarget on ties.
Room max_distance_room(Room from);

Room parse_room(std::string_view label);
std::string format_room(Room room);

Direction parse_direction(std::string_view text);
std::string format_direction(Direction d);

}  // namespace haunted
