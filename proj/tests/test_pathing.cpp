#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "mazeswarm/pathing.hpp"
#include "mazeswarm/rng.hpp"
#include "oracles.hpp"

using namespace mazeswarm;

namespace {

Grid<CellState> openGrid(int rows, int cols) {
    return Grid<CellState>(rows, cols, CellState::Free);
}

Grid<CellState> randomMask(int rows, int cols, double obstacleFraction,
                           std::uint64_t seed) {
    Grid<CellState> map(rows, cols, CellState::Free);
    Rng rng(seed);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double roll = rng.uniformReal01();
            if (roll < obstacleFraction)
                map.at(r, c) = CellState::Obstacle;
            else if (roll < 2 * obstacleFraction)
                map.at(r, c) = CellState::Unexplored;
        }
    return map;
}

}  // namespace

TEST_CASE("wavefront in open space is Manhattan distance") {
    DistanceField field = wavefront(openGrid(3, 3), Coord{1, 1});
    CHECK(field.dist.at(1, 1) == 0);
    CHECK(field.dist.at(0, 1) == 1);
    CHECK(field.dist.at(1, 0) == 1);
    CHECK(field.dist.at(1, 2) == 1);
    CHECK(field.dist.at(2, 1) == 1);
    CHECK(field.dist.at(0, 0) == 2);
    CHECK(field.dist.at(0, 2) == 2);
    CHECK(field.dist.at(2, 0) == 2);
    CHECK(field.dist.at(2, 2) == 2);
}

TEST_CASE("wavefront rejects an obstacle source") {
    Grid<CellState> map = openGrid(4, 4);
    map.at(2, 2) = CellState::Obstacle;
    CHECK_THROWS_AS(wavefront(map, Coord{2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(wavefront(map, Coord{4, 0}), std::invalid_argument);
}

TEST_CASE("unexplored cells are traversable, known walls are not") {
    Grid<CellState> map(3, 5, CellState::Unexplored);
    map.at(1, 0) = CellState::Free;
    for (int r = 0; r < 3; ++r) map.at(r, 2) = CellState::Obstacle;
    DistanceField field = wavefront(map, Coord{1, 0});
    CHECK(field.dist.at(0, 1) == 2);   // unknown space is optimistically open
    CHECK(field.dist.at(1, 4) == -1);  // full wall blocks the right half
}

TEST_CASE("wavefront equals unit-weight Dijkstra on random masks") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Grid<CellState> map = randomMask(12, 12, 0.2, seed);
        map.at(0, 0) = CellState::Free;
        DistanceField field = wavefront(map, Coord{0, 0});
        Grid<int> reference = oracles::dijkstraDistances(map, Coord{0, 0});
        REQUIRE(field.dist == reference);
    }
}

TEST_CASE("triangle consistency holds in open regions") {
    DistanceField field = wavefront(openGrid(8, 8), Coord{3, 4});
    for (int r1 = 0; r1 < 8; ++r1)
        for (int c1 = 0; c1 < 8; ++c1)
            for (int r2 = 0; r2 < 8; ++r2)
                for (int c2 = 0; c2 < 8; ++c2) {
                    int manhattan = std::abs(r1 - r2) + std::abs(c1 - c2);
                    REQUIRE(std::abs(field.dist.at(r1, c1) -
                                     field.dist.at(r2, c2)) <= manhattan);
                }
}

TEST_CASE("extractPath returns the adjacent cell for distance one") {
    DistanceField field = wavefront(openGrid(3, 3), Coord{1, 1});
    std::vector<Coord> path = extractPath(field, Coord{0, 1});
    REQUIRE(path.size() == 1);
    CHECK(path[0] == Coord{0, 1});
}

TEST_CASE("extractPath walks a corridor in order") {
    Grid<CellState> map(3, 6, CellState::Obstacle);
    for (int c = 0; c < 6; ++c) map.at(1, c) = CellState::Free;
    DistanceField field = wavefront(map, Coord{1, 0});
    std::vector<Coord> path = extractPath(field, Coord{1, 5});
    REQUIRE(path.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(path[i] == Coord{1, i + 1});
}

TEST_CASE("extractPath refuses unreachable targets") {
    Grid<CellState> map = openGrid(3, 3);
    map.at(0, 1) = CellState::Obstacle;
    map.at(1, 1) = CellState::Obstacle;
    map.at(2, 1) = CellState::Obstacle;
    DistanceField field = wavefront(map, Coord{1, 0});
    CHECK_THROWS_AS(extractPath(field, Coord{1, 2}), std::invalid_argument);
}

TEST_CASE("paths are valid shortest paths with deterministic ties") {
    // Two equal-length routes around a block; the extracted path must be
    // optimal, 4-connected and obstacle-free, and stable across calls.
    Grid<CellState> map = openGrid(5, 5);
    map.at(2, 2) = CellState::Obstacle;
    DistanceField field = wavefront(map, Coord{2, 0});
    std::vector<Coord> path = extractPath(field, Coord{2, 4});
    CHECK(static_cast<int>(path.size()) == field.dist.at(2, 4));
    CHECK(path == extractPath(field, Coord{2, 4}));

    for (std::uint64_t seed = 300; seed < 340; ++seed) {
        Grid<CellState> mask = randomMask(10, 10, 0.25, seed);
        mask.at(5, 5) = CellState::Free;
        DistanceField f = wavefront(mask, Coord{5, 5});
        Grid<int> reference = oracles::dijkstraDistances(mask, Coord{5, 5});
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < 10; ++c) {
                Coord target{r, c};
                if (!f.reachable(target) || target == f.source) continue;
                std::vector<Coord> p = extractPath(f, target);
                REQUIRE(static_cast<int>(p.size()) == reference.at(target));
                Coord prev = f.source;
                for (const Coord& cell : p) {
                    REQUIRE(std::abs(cell.row - prev.row) +
                                std::abs(cell.col - prev.col) ==
                            1);
                    REQUIRE(mask.at(cell) != CellState::Obstacle);
                    prev = cell;
                }
                REQUIRE(prev == target);
            }
    }
}
