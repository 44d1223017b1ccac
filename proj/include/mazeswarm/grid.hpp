#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mazeswarm/rng.hpp"

namespace mazeswarm {

/// Cell alphabet shared by the ground truth, agent maps and the wire
/// formats. The integer encoding is load-bearing: maze files and the
/// communication cost model (2 bits per cell) both assume these values.
enum class CellState : std::int8_t {
    Unexplored = -1,
    Free = 0,
    Obstacle = 1,
    AgentOccupied = 2,
};

inline int cellStateToInt(CellState s) { return static_cast<int>(s); }

inline CellState cellStateFromInt(int v) {
    switch (v) {
        case -1: return CellState::Unexplored;
        case 0: return CellState::Free;
        case 1: return CellState::Obstacle;
        case 2: return CellState::AgentOccupied;
        default:
            throw std::invalid_argument("invalid cell state encoding: " +
                                        std::to_string(v));
    }
}

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

/// Dense row-major grid. Most of the library works on Grid<CellState>,
/// the planners on Grid<int> / Grid<double>.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fillValue = T{})
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * cols, fillValue) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("grid dimensions must be positive");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long cellCount() const { return static_cast<long>(rows_) * cols_; }

    bool inBounds(Coord c) const {
        return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
    }

    T& at(Coord c) { return data_[static_cast<std::size_t>(c.row) * cols_ + c.col]; }
    const T& at(Coord c) const {
        return data_[static_cast<std::size_t>(c.row) * cols_ + c.col];
    }
    T& at(int r, int c) { return at(Coord{r, c}); }
    const T& at(int r, int c) const { return at(Coord{r, c}); }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    const std::vector<T>& raw() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

/// Fixed neighbor order (north, south, west, east) used everywhere a
/// traversal or tie-break depends on expansion order.
inline constexpr Coord kNeighborSteps[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

/// Ground-truth maze. cells holds only Free/Obstacle; every Free cell is
/// 4-connected to every other, and every Obstacle cell touches at least
/// one Free cell so it can be observed by an adjacent agent.
struct Maze {
    int rows = 0;
    int cols = 0;
    Grid<CellState> cells;
    double obstacleProbability = 0.0;
    std::uint64_t seed = 0;
};

inline long groundTruthArea(const Maze& maze) {
    return static_cast<long>(maze.rows) * maze.cols;
}

namespace detail {

/// Labels 4-connected Free components; returns component id per cell
/// (-1 for non-Free) and the id of the largest component (ties to the
/// component discovered first in row-major order).
inline std::pair<Grid<int>, int> freeComponents(const Grid<CellState>& cells) {
    Grid<int> comp(cells.rows(), cells.cols(), -1);
    int nextId = 0;
    int bestId = -1;
    long bestSize = 0;
    std::deque<Coord> queue;
    for (int r = 0; r < cells.rows(); ++r) {
        for (int c = 0; c < cells.cols(); ++c) {
            Coord start{r, c};
            if (cells.at(start) != CellState::Free || comp.at(start) != -1)
                continue;
            int id = nextId++;
            long size = 0;
            comp.at(start) = id;
            queue.push_back(start);
            while (!queue.empty()) {
                Coord cur = queue.front();
                queue.pop_front();
                ++size;
                for (const Coord& step : kNeighborSteps) {
                    Coord nb{cur.row + step.row, cur.col + step.col};
                    if (!cells.inBounds(nb)) continue;
                    if (cells.at(nb) != CellState::Free || comp.at(nb) != -1)
                        continue;
                    comp.at(nb) = id;
                    queue.push_back(nb);
                }
            }
            if (size > bestSize) {
                bestSize = size;
                bestId = id;
            }
        }
    }
    return {std::move(comp), bestId};
}

inline bool hasFreeNeighbor(const Grid<CellState>& cells, Coord c) {
    for (const Coord& step : kNeighborSteps) {
        Coord nb{c.row + step.row, c.col + step.col};
        if (cells.inBounds(nb) && cells.at(nb) == CellState::Free) return true;
    }
    return false;
}

/// Opens a corridor from a fully walled-in obstacle cell to the free
/// component. BFS through obstacle cells, stopping at the first cell that
/// already touches free space; the whole path is converted to Free.
inline void openCorridor(Grid<CellState>& cells, Coord sealed) {
    Grid<int> parent(cells.rows(), cells.cols(), -2);
    std::deque<Coord> queue;
    parent.at(sealed) = -1;
    queue.push_back(sealed);
    while (!queue.empty()) {
        Coord cur = queue.front();
        queue.pop_front();
        if (hasFreeNeighbor(cells, cur)) {
            for (Coord walk = cur; ;) {
                cells.at(walk) = CellState::Free;
                int enc = parent.at(walk);
                if (enc < 0) break;
                walk = Coord{enc / cells.cols(), enc % cells.cols()};
            }
            return;
        }
        for (const Coord& step : kNeighborSteps) {
            Coord nb{cur.row + step.row, cur.col + step.col};
            if (!cells.inBounds(nb)) continue;
            if (cells.at(nb) != CellState::Obstacle || parent.at(nb) != -2)
                continue;
            parent.at(nb) = cur.row * cells.cols() + cur.col;
            queue.push_back(nb);
        }
    }
}

}  // namespace detail

/// Generates a maze by random-walk carving followed by probabilistic
/// obstacle thinning and a repair pass.
///
/// The walk starts on a uniformly random cell and takes
/// rows*cols*carveStepFactor orthogonal steps (steps that would leave the
/// grid are consumed in place), marking visited cells Free. Each cell the
/// carve left as obstacle is then retained with probability
/// obstacleProbability, otherwise converted to Free. The repair pass
/// keeps the largest Free component (everything else becomes Obstacle)
/// and then opens a minimal corridor to any obstacle cell left without a
/// Free 4-neighbor; such cells would otherwise be unobservable by a
/// range-limited sensor and the map could never be completed.
inline Maze generateMaze(int rows, int cols, double obstacleProbability,
                         std::uint64_t seed, int carveStepFactor = 4) {
    if (rows < 3 || cols < 3)
        throw std::invalid_argument("maze dimensions must be at least 3x3");
    if (obstacleProbability < 0.0 || obstacleProbability > 1.0)
        throw std::invalid_argument("obstacle probability must be in [0, 1]");
    if (carveStepFactor < 1)
        throw std::invalid_argument("carve step factor must be >= 1");

    Maze maze;
    maze.rows = rows;
    maze.cols = cols;
    maze.obstacleProbability = obstacleProbability;
    maze.seed = seed;
    maze.cells = Grid<CellState>(rows, cols, CellState::Obstacle);

    Rng rng(seed);

    // Carve.
    Coord pos{static_cast<int>(rng.uniformInt(rows)),
              static_cast<int>(rng.uniformInt(cols))};
    maze.cells.at(pos) = CellState::Free;
    long steps = static_cast<long>(rows) * cols * carveStepFactor;
    for (long i = 0; i < steps; ++i) {
        const Coord& step = kNeighborSteps[rng.uniformInt(4)];
        Coord next{pos.row + step.row, pos.col + step.col};
        if (!maze.cells.inBounds(next)) continue;
        pos = next;
        maze.cells.at(pos) = CellState::Free;
    }

    // Thin: carve obstacles survive with probability obstacleProbability.
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (maze.cells.at(r, c) != CellState::Obstacle) continue;
            if (rng.uniformReal01() >= obstacleProbability)
                maze.cells.at(r, c) = CellState::Free;
        }
    }

    // Repair: single free component, no walled-in obstacle cells.
    while (true) {
        auto [comp, mainId] = detail::freeComponents(maze.cells);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (maze.cells.at(r, c) == CellState::Free &&
                    comp.at(r, c) != mainId)
                    maze.cells.at(r, c) = CellState::Obstacle;

        Coord sealed{-1, -1};
        for (int r = 0; r < rows && sealed.row < 0; ++r)
            for (int c = 0; c < cols; ++c)
                if (maze.cells.at(r, c) == CellState::Obstacle &&
                    !detail::hasFreeNeighbor(maze.cells, Coord{r, c})) {
                    sealed = Coord{r, c};
                    break;
                }
        if (sealed.row < 0) break;
        detail::openCorridor(maze.cells, sealed);
    }
    return maze;
}

/// 64-bit FNV-1a over dimensions and cell values; recorded per experiment
/// row so paired-seed runs can be checked for identical mazes.
inline std::uint64_t mazeHash(const Maze& maze) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 0x100000001b3ull;
        }
    };
    mix(static_cast<std::uint64_t>(maze.rows));
    mix(static_cast<std::uint64_t>(maze.cols));
    for (int r = 0; r < maze.rows; ++r)
        for (int c = 0; c < maze.cols; ++c)
            mix(static_cast<std::uint64_t>(cellStateToInt(maze.cells.at(r, c))) & 0xFF);
    return h;
}

/// Maze file format: first line "rows cols", then rows lines of
/// space-separated integers in {0, 1}.
inline void writeMazeFile(const Maze& maze, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open maze file for writing: " + path);
    out << maze.rows << ' ' << maze.cols << '\n';
    for (int r = 0; r < maze.rows; ++r) {
        for (int c = 0; c < maze.cols; ++c) {
            if (c) out << ' ';
            out << cellStateToInt(maze.cells.at(r, c));
        }
        out << '\n';
    }
}

inline Maze readMazeFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open maze file: " + path);
    Maze maze;
    if (!(in >> maze.rows >> maze.cols))
        throw std::runtime_error("malformed maze file header: " + path);
    if (maze.rows < 1 || maze.cols < 1)
        throw std::runtime_error("maze file has non-positive dimensions: " + path);
    maze.cells = Grid<CellState>(maze.rows, maze.cols, CellState::Free);
    for (int r = 0; r < maze.rows; ++r)
        for (int c = 0; c < maze.cols; ++c) {
            int v = 0;
            if (!(in >> v))
                throw std::runtime_error("maze file truncated: " + path);
            CellState s = cellStateFromInt(v);
            if (s != CellState::Free && s != CellState::Obstacle)
                throw std::runtime_error("maze file cells must be 0 or 1: " + path);
            maze.cells.at(r, c) = s;
        }
    return maze;
}

}  // namespace mazeswarm
