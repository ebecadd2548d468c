#include <gtest/gtest.h>

#include "haunted/geometry.hpp"

namespace haunted {
namespace {

using namespace rooms;

TEST(Geometry, StepMovesOneRoom) {
  EXPECT_EQ(step(B2, Direction::Left), A2);
  EXPECT_EQ(step(B2, Direction::Right), C2);
  EXPECT_EQ(step(B2, Direction::Up), B1);
  EXPECT_EQ(step(B2, Direction::Down), B3);
}

TEST(Geometry, StepOffTheGridIsEmpty) {
  EXPECT_FALSE(step(C1, Direction::Up));
  EXPECT_FALSE(step(C1, Direction::Right));
  EXPECT_FALSE(step(A3, Direction::Left));
  EXPECT_FALSE(step(A3, Direction::Down));
}

TEST(Geometry, StepAndOppositeAreInverse) {
  for (Room r : kAllRooms) {
    for (Direction d : kAllDirections) {
      if (auto to = step(r, d)) {
        EXPECT_EQ(step(*to, opposite(d)), r);
        EXPECT_EQ(manhattan(r, *to), 1);
        EXPECT_TRUE(adjacent(r, *to));
      }
    }
  }
}

TEST(Geometry, DiagonalsAreNotAdjacent) {
  EXPECT_FALSE(adjacent(B1, A2));
  EXPECT_FALSE(adjacent(B2, B2));
  EXPECT_EQ(manhattan(A1, C3), 4);
}

TEST(Geometry, NeighbourCountsMatchPosition) {
  auto degree = [](Room r) {
    int n = 0;
    for (Direction d : kAllDirections) n += step(r, d).has_value();
    return n;
  };
  EXPECT_EQ(degree(A1), 2);
  EXPECT_EQ(degree(B1), 3);
  EXPECT_EQ(degree(B2), 4);
}

TEST(Geometry, MaxDistanceRoomFromCorners) {
  EXPECT_EQ(max_distance_room(C1), A3);
  EXPECT_EQ(max_distance_room(A1), C3);
  EXPECT_EQ(max_distance_room(C3), A1);
}

TEST(Geometry, MaxDistanceRoomTieThrows) {
  EXPECT_THROW(max_distance_room(B2), AmbiguousTarget);
  EXPECT_THROW(max_distance_room(B1), AmbiguousTarget);
}

TEST(Geometry, IndexRoundTrips) {
  for (int i = 0; i < 9; ++i) EXPECT_EQ(Room::from_index(i).index(), i);
  EXPECT_EQ(A1.index(), 0);
  EXPECT_EQ(C3.index(), 8);
}

TEST(Geometry, RoomLabels) {
  for (Room r : kAllRooms) EXPECT_EQ(parse_room(format_room(r)), r);
  EXPECT_EQ(format_room(B3), "B3");
  EXPECT_EQ(parse_room("a2"), A2);
  EXPECT_THROW(parse_room("D1"), ParseError);
  EXPECT_THROW(parse_room("A4"), ParseError);
  EXPECT_THROW(parse_room("A"), ParseError);
}

TEST(Geometry, DirectionText) {
  for (Direction d : kAllDirections) EXPECT_EQ(parse_direction(format_direction(d)), d);
  EXPECT_EQ(parse_direction("LEFT"), Direction::Left);
  EXPECT_THROW(parse_direction("north"), ParseError);
}

}  // namespace
}  // namespace haunted
