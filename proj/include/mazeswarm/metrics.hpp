#pragma once

#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mazeswarm/grid.hpp"
#include "mazeswarm/perception.hpp"

namespace mazeswarm {

/// Evaluation quantities of one completed exploration run, plus the
/// configuration echo needed to make a result row self-describing.
struct RunMetrics {
    std::string method;
    int rows = 0;
    int cols = 0;
    double obstacleProb = 0.0;
    int agents = 0;
    std::uint64_t seed = 0;

    double timeSeconds = 0.0;
    long rounds = 0;
    long cost = 0;
    double efficiency = 0.0;
    double mapQuality = 0.0;
    long long commBits = 0;

    std::uint64_t mazeHash = 0;
    bool hitMaxRounds = false;
    std::string rngId;
};

/// Average per-round step time times the number of rounds. stepTimes is
/// the flat per-agent record in round-major order, so it holds one chunk
/// of n durations per observed round; the per-round sums are divided by n
/// and averaged before scaling by rounds.
inline double explorationTime(const std::vector<double>& stepTimes, int n,
                              long rounds) {
    if (stepTimes.empty() || n < 1)
        throw std::invalid_argument("explorationTime needs step times and n >= 1");
    if (stepTimes.size() % static_cast<std::size_t>(n) != 0)
        throw std::invalid_argument("step times must cover whole rounds");
    std::size_t observedRounds = stepTimes.size() / n;
    double perRoundMean = 0.0;
    for (std::size_t k = 0; k < observedRounds; ++k) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += stepTimes[k * n + i];
        perRoundMean += sum / n;
    }
    perRoundMean /= static_cast<double>(observedRounds);
    return perRoundMean * static_cast<double>(rounds);
}

/// Total cells traveled by the fleet; doubles as the repetitive-coverage
/// measure.
inline long explorationCost(const std::vector<AgentState>& agents) {
    long total = 0;
    for (const AgentState& a : agents) total += a.distanceTraveled;
    return total;
}

inline double explorationEfficiency(long exploredCells, long cost) {
    if (cost <= 0)
        throw std::invalid_argument("exploration efficiency undefined for zero cost");
    return static_cast<double>(exploredCells) / static_cast<double>(cost);
}

/// Fraction of the ground truth captured correctly: explored cells minus
/// those whose recorded value disagrees with the maze, over the total
/// area. Unexplored cells are not errors; they just reduce the numerator.
inline double mapQuality(const Grid<CellState>& centralMap, const Maze& maze) {
    long explored = 0;
    long errors = 0;
    for (int r = 0; r < maze.rows; ++r) {
        for (int c = 0; c < maze.cols; ++c) {
            CellState v = centralMap.at(r, c);
            if (v == CellState::Unexplored) continue;
            ++explored;
            if (v == CellState::AgentOccupied) v = CellState::Free;
            if (v != maze.cells.at(r, c)) ++errors;
        }
    }
    return static_cast<double>(explored - errors) /
           static_cast<double>(groundTruthArea(maze));
}

inline long long commCost(const CommLedger& ledger) { return ledger.totalBits; }

/// CSV row schema. The first twelve columns are the stable contract;
/// maze_hash supports paired-seed auditing and status flags runs that hit
/// the round cap.
inline std::string metricsCsvHeader() {
    return "method,rows,cols,obstacle_prob,agents,seed,time_s,rounds,cost,"
           "efficiency,map_quality,comm_bits,maze_hash,status";
}

inline std::string toCsvRow(const RunMetrics& m) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%d,%.6g,%d,%llu,%.6f,%ld,%ld,%.10g,%.10g,%lld,%016llx,%s",
                  m.method.c_str(), m.rows, m.cols, m.obstacleProb, m.agents,
                  static_cast<unsigned long long>(m.seed), m.timeSeconds,
                  m.rounds, m.cost, m.efficiency, m.mapQuality, m.commBits,
                  static_cast<unsigned long long>(m.mazeHash),
                  m.hitMaxRounds ? "max_rounds" : "ok");
    return std::string(buf);
}

}  // namespace mazeswarm
