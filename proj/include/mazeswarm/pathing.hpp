#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include "mazeswarm/grid.hpp"

namespace mazeswarm {

/// Shortest 4-connected path lengths from a source over a known map.
/// dist is -1 for unreachable cells.
struct DistanceField {
    Coord source;
    Grid<int> dist;

    bool reachable(Coord c) const { return dist.inBounds(c) && dist.at(c) >= 0; }
};

/// Breadth-first wavefront over cells that are not known obstacles.
/// Unexplored cells are traversable: goals are themselves unexplored, so
/// planning crosses unknown space optimistically and replans if a planned
/// cell turns out to be a wall once sensed.
inline DistanceField wavefront(const Grid<CellState>& map, Coord source) {
    if (!map.inBounds(source))
        throw std::invalid_argument("wavefront source out of bounds");
    if (map.at(source) == CellState::Obstacle)
        throw std::invalid_argument("wavefront source is an obstacle");

    DistanceField field{source, Grid<int>(map.rows(), map.cols(), -1)};
    field.dist.at(source) = 0;
    std::deque<Coord> queue{source};
    while (!queue.empty()) {
        Coord cur = queue.front();
        queue.pop_front();
        int next = field.dist.at(cur) + 1;
        for (const Coord& step : kNeighborSteps) {
            Coord nb{cur.row + step.row, cur.col + step.col};
            if (!map.inBounds(nb)) continue;
            if (map.at(nb) == CellState::Obstacle) continue;
            if (field.dist.at(nb) != -1) continue;
            field.dist.at(nb) = next;
            queue.push_back(nb);
        }
    }
    return field;
}

/// Shortest path from the cell after the source up to and including
/// target; |path| == dist[target]. Backtracks from the target choosing
/// the first neighbor (north, south, west, east) one step closer, which
/// makes tie-breaking deterministic.
inline std::vector<Coord> extractPath(const DistanceField& field, Coord target) {
    if (!field.reachable(target))
        throw std::invalid_argument("path target unreachable");
    std::vector<Coord> path(static_cast<std::size_t>(field.dist.at(target)));
    Coord cur = target;
    for (int d = field.dist.at(target); d > 0; --d) {
        path[d - 1] = cur;
        for (const Coord& step : kNeighborSteps) {
            Coord nb{cur.row + step.row, cur.col + step.col};
            if (field.dist.inBounds(nb) && field.dist.at(nb) == d - 1) {
                cur = nb;
                break;
            }
        }
    }
    return path;
}

}  // namespace mazeswarm
