#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mazeswarm/grid.hpp"

namespace mazeswarm {

/// One exploring agent. The explored map is private knowledge, updated by
/// its own sensor and by exchanges with agents in broadcast range.
struct AgentState {
    int id = 0;
    Coord position;
    Grid<CellState> exploredMap;
    int viewRange = 2;
    std::optional<Coord> goal;
    std::vector<Coord> plannedPath;
    long distanceTraveled = 0;
};

/// Accumulated communication cost. Every pairwise exchange transfers both
/// full maps at 2 bits per cell, hence 4 * rows * cols bits.
struct CommLedger {
    long long totalBits = 0;
    long exchanges = 0;
};

struct Observation {
    Coord cell;
    CellState value;
};

/// All cells the segment between the two cell centers passes through,
/// including cells touched exactly at a corner. Exact integer arithmetic:
/// the comparisons of the next row/column boundary crossings reduce to
/// (2*ir + 1) * nc vs (2*ic + 1) * nr.
inline std::vector<Coord> supercoverLine(Coord a, Coord b) {
    std::vector<Coord> cells{a};
    int dr = b.row - a.row;
    int dc = b.col - a.col;
    int sr = (dr > 0) - (dr < 0);
    int sc = (dc > 0) - (dc < 0);
    long nr = std::abs(dr);
    long nc = std::abs(dc);
    Coord cur = a;
    long ir = 0, ic = 0;
    while (ir < nr || ic < nc) {
        long rowCross = (2 * ir + 1) * nc;
        long colCross = (2 * ic + 1) * nr;
        if (ic >= nc || (ir < nr && rowCross < colCross)) {
            cur.row += sr;
            ++ir;
        } else if (ir >= nr || rowCross > colCross) {
            cur.col += sc;
            ++ic;
        } else {
            // Corner crossing: the segment touches both side cells.
            cells.push_back(Coord{cur.row + sr, cur.col});
            cells.push_back(Coord{cur.row, cur.col + sc});
            cur.row += sr;
            cur.col += sc;
            ++ir;
            ++ic;
        }
        cells.push_back(cur);
    }
    return cells;
}

/// True when no ground-truth obstacle lies strictly between the two cell
/// centers on the supercover ray.
inline bool lineOfSight(const Grid<CellState>& truth, Coord from, Coord to) {
    for (const Coord& c : supercoverLine(from, to)) {
        if (c == from || c == to) continue;
        if (truth.at(c) == CellState::Obstacle) return false;
    }
    return true;
}

/// Senses every cell within Chebyshev distance viewRange that has an
/// unobstructed line of sight, records it in the agent's map and returns
/// the observations in row-major window order.
inline std::vector<Observation> sense(AgentState& agent, const Maze& maze) {
    if (!maze.cells.inBounds(agent.position) ||
        maze.cells.at(agent.position) != CellState::Free)
        throw std::invalid_argument("agent must stand on a free maze cell");

    std::vector<Observation> seen;
    for (int r = agent.position.row - agent.viewRange;
         r <= agent.position.row + agent.viewRange; ++r) {
        for (int c = agent.position.col - agent.viewRange;
             c <= agent.position.col + agent.viewRange; ++c) {
            Coord target{r, c};
            if (!maze.cells.inBounds(target)) continue;
            if (!lineOfSight(maze.cells, agent.position, target)) continue;
            CellState truth = maze.cells.at(target);
            seen.push_back(Observation{target, truth});
            agent.exploredMap.at(target) = truth;
        }
    }
    return seen;
}

/// All unordered pairs (i, j), i < j by agent id, whose Euclidean
/// distance is within broadcastRange.
inline std::vector<std::pair<int, int>> broadcastPeers(
    const std::vector<AgentState>& agents, double broadcastRange) {
    if (broadcastRange <= 0.0)
        throw std::invalid_argument("broadcast range must be positive");
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            double dr = agents[i].position.row - agents[j].position.row;
            double dc = agents[i].position.col - agents[j].position.col;
            if (dr * dr + dc * dc <= broadcastRange * broadcastRange)
                pairs.emplace_back(agents[i].id, agents[j].id);
        }
    }
    return pairs;
}

/// Default radio range: a fraction (25% in the reference setup) of the
/// larger maze dimension.
inline double defaultBroadcastRange(int rows, int cols, double fraction = 0.25) {
    return fraction * std::max(rows, cols);
}

namespace detail {

inline void mergeInto(Grid<CellState>& dst, const Grid<CellState>& src) {
    for (int r = 0; r < dst.rows(); ++r) {
        for (int c = 0; c < dst.cols(); ++c) {
            CellState incoming = src.at(r, c);
            if (incoming == CellState::Unexplored) continue;
            // Agents move; a transmitted agent marker persists as Free.
            if (incoming == CellState::AgentOccupied) incoming = CellState::Free;
            CellState& own = dst.at(r, c);
            if (own == CellState::Unexplored || own == CellState::AgentOccupied) {
                own = incoming;
            } else if (own != incoming) {
                throw std::logic_error("map exchange found a Free/Obstacle conflict");
            }
        }
    }
}

}  // namespace detail

/// Full bidirectional map exchange between two agents in range. Both maps
/// become the cell-wise merge; the ledger is charged unconditionally.
inline void exchangeMaps(AgentState& a, AgentState& b, CommLedger& ledger) {
    Grid<CellState> snapshotA = a.exploredMap;
    detail::mergeInto(a.exploredMap, b.exploredMap);
    detail::mergeInto(b.exploredMap, snapshotA);
    ledger.exchanges += 1;
    ledger.totalBits +=
        4ll * a.exploredMap.rows() * a.exploredMap.cols();
}

}  // namespace mazeswarm
