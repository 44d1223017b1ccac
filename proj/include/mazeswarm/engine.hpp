#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "mazeswarm/grid.hpp"
#include "mazeswarm/metrics.hpp"
#include "mazeswarm/partition.hpp"
#include "mazeswarm/pathing.hpp"
#include "mazeswarm/perception.hpp"
#include "mazeswarm/rng.hpp"
#include "mazeswarm/strategies.hpp"

namespace mazeswarm {

struct SimulationConfig {
    int rows = 30;
    int cols = 30;
    double obstacleProbability = 0.15;
    std::uint64_t seed = 1;
    int agentCount = 1;
    StrategyConfig strategy;
    double broadcastFraction = 0.25;
    int viewRange = 2;
    long maxRounds = 0;  // 0 resolves to 50 * rows * cols
    int carveStepFactor = 4;

    long resolvedMaxRounds() const {
        return maxRounds > 0 ? maxRounds : 50l * rows * cols;
    }
};

/// Passive accumulator of everything any agent knows. Consulted only for
/// termination detection and nearest-unexplored-region reassignment.
struct CentralMap {
    Grid<CellState> map;
    long exploredCount = 0;

    explicit CentralMap(int rows, int cols)
        : map(rows, cols, CellState::Unexplored) {}

    void absorb(const Grid<CellState>& src) {
        for (int r = 0; r < map.rows(); ++r) {
            for (int c = 0; c < map.cols(); ++c) {
                CellState incoming = src.at(r, c);
                if (incoming == CellState::Unexplored) continue;
                if (incoming == CellState::AgentOccupied)
                    incoming = CellState::Free;
                CellState& own = map.at(r, c);
                if (own == CellState::Unexplored) {
                    own = incoming;
                    ++exploredCount;
                } else if (own != incoming) {
                    throw std::logic_error("central map merge conflict");
                }
            }
        }
    }
};

enum class StepResult { Moved, BlockedByAgent, BlockedByObstacle, Idle };

/// Executes one move along the planned path. Blocked moves leave the
/// agent stationary; running into a wall additionally drops the path so
/// the next round replans.
inline StepResult stepAgent(AgentState& agent, const Maze& maze,
                            Grid<std::uint8_t>& occupancy) {
    if (agent.plannedPath.empty()) return StepResult::Idle;
    Coord next = agent.plannedPath.front();
    if (!maze.cells.inBounds(next))
        throw std::logic_error("planned path leaves the maze");
    if (maze.cells.at(next) == CellState::Obstacle) {
        agent.plannedPath.clear();
        return StepResult::BlockedByObstacle;
    }
    if (occupancy.at(next)) return StepResult::BlockedByAgent;

    occupancy.at(agent.position) = 0;
    agent.position = next;
    occupancy.at(next) = 1;
    agent.distanceTraveled += 1;
    agent.plannedPath.erase(agent.plannedPath.begin());
    if (agent.goal && *agent.goal == agent.position) {
        agent.goal.reset();
        agent.plannedPath.clear();
    }
    return StepResult::Moved;
}

namespace detail {

inline std::vector<Coord> placeAgents(const Maze& maze, int agentCount,
                                      std::uint64_t seed) {
    std::vector<Coord> freeCells;
    for (int r = 0; r < maze.rows; ++r)
        for (int c = 0; c < maze.cols; ++c)
            if (maze.cells.at(r, c) == CellState::Free)
                freeCells.push_back(Coord{r, c});
    if (static_cast<int>(freeCells.size()) < agentCount)
        throw std::invalid_argument("maze has fewer free cells than agents");

    Rng rng(deriveSeed(seed, 0x706c6163656d656eull));  // placement stream
    for (int i = 0; i < agentCount; ++i) {
        std::size_t j = i + rng.uniformInt(freeCells.size() - i);
        std::swap(freeCells[i], freeCells[j]);
    }
    freeCells.resize(agentCount);
    return freeCells;
}

inline void writeTraceRound(std::ostream& out, long round,
                            const std::vector<AgentState>& agents,
                            long explored, long exchanges, double roundSeconds) {
    nlohmann::json line;
    line["round"] = round;
    line["explored"] = explored;
    line["exchanges"] = exchanges;
    line["round_time_s"] = roundSeconds;
    nlohmann::json arr = nlohmann::json::array();
    for (const AgentState& a : agents) {
        nlohmann::json entry;
        entry["id"] = a.id;
        entry["pos"] = {a.position.row, a.position.col};
        if (a.goal)
            entry["goal"] = {a.goal->row, a.goal->col};
        else
            entry["goal"] = nullptr;
        arr.push_back(entry);
    }
    line["agents"] = arr;
    out << line.dump() << '\n';
}

inline void dumpPartitionRound(std::ostream& out, long round,
                               const Partition& partition) {
    const Grid<int>& grid = partition.regionGrid();
    out << "round " << round << '\n';
    for (int r = 0; r < grid.rows(); ++r) {
        for (int c = 0; c < grid.cols(); ++c) {
            if (c) out << ',';
            out << grid.at(r, c);
        }
        out << '\n';
    }
}

}  // namespace detail

/// Runs one exploration to completion (or to the round cap, flagged in
/// the result). Rounds execute: sensing, map exchange, region merging,
/// goal upkeep and selection, sequential stepping, central-map push.
inline RunMetrics runSimulation(const SimulationConfig& config, const Maze& maze,
                                std::ostream* trace = nullptr,
                                std::ostream* partitionDump = nullptr) {
    using Clock = std::chrono::steady_clock;

    if (config.agentCount < 1)
        throw std::invalid_argument("at least one agent required");
    if (config.viewRange < 1)
        throw std::invalid_argument("view range must be >= 1");
    if (maze.rows != config.rows || maze.cols != config.cols)
        throw std::invalid_argument("maze dimensions disagree with config");

    const int n = config.agentCount;
    const long area = groundTruthArea(maze);
    const double range =
        defaultBroadcastRange(config.rows, config.cols, config.broadcastFraction);
    const bool hedac = config.strategy.kind == StrategyKind::HEDAC;

    std::vector<Coord> starts = detail::placeAgents(maze, n, config.seed);
    std::vector<AgentState> agents;
    agents.reserve(n);
    Grid<std::uint8_t> occupancy(config.rows, config.cols, 0);
    for (int i = 0; i < n; ++i) {
        AgentState a;
        a.id = i;
        a.position = starts[i];
        a.exploredMap =
            Grid<CellState>(config.rows, config.cols, CellState::Unexplored);
        a.viewRange = config.viewRange;
        agents.push_back(std::move(a));
        occupancy.at(starts[i]) = 1;
    }

    Partition partition = computeVoronoi(starts, config.rows, config.cols);
    CentralMap central(config.rows, config.cols);
    CommLedger ledger;
    std::vector<double> stepTimes;

    if (trace) {
        nlohmann::json header;
        header["rows"] = config.rows;
        header["cols"] = config.cols;
        header["agents"] = n;
        header["method"] = config.strategy.reportedName();
        header["seed"] = config.seed;
        header["rng"] = std::string(kRngId);
        nlohmann::json startPositions = nlohmann::json::array();
        for (const Coord& s : starts) startPositions.push_back({s.row, s.col});
        header["start"] = startPositions;
        *trace << header.dump() << '\n';
    }

    const long maxRounds = config.resolvedMaxRounds();
    long round = 0;
    bool done = false;
    while (round < maxRounds && !done) {
        ++round;
        auto roundStart = Clock::now();

        // 1. Sensing.
        for (AgentState& a : agents) sense(a, maze);

        // 2. Map exchange among in-range pairs.
        std::vector<std::pair<int, int>> pairs = broadcastPeers(agents, range);
        for (const auto& [i, j] : pairs) exchangeMaps(agents[i], agents[j], ledger);

        // 3. Region merging follows the same contact graph.
        mergeRegions(partition, pairs);

        std::map<int, PeerView> peersOf;
        for (const auto& [i, j] : pairs) {
            peersOf[i].push_back(&agents[j]);
            peersOf[j].push_back(&agents[i]);
        }

        // 4. Region upkeep and goal selection. Goals are re-chosen every
        // round from the current map, so they track newly sensed ground;
        // a goal explored by the agent or a peer simply stops being a
        // candidate.
        for (AgentState& a : agents) {
            DistanceField field = wavefront(a.exploredMap, a.position);

            bool regionHasWork =
                !detail::reachableFrontiers(a, partition, field).empty();
            if (!regionHasWork) {
                a.goal.reset();
                a.plannedPath.clear();
                std::optional<int> next =
                    nearestUnexploredRegion(a, partition, central.map);
                if (!next) continue;  // everything known is explored; idle
                partition.reassignAgent(a.id, *next);
                regionHasWork =
                    !detail::reachableFrontiers(a, partition, field).empty();
                if (!regionHasWork) continue;
            }

            const PeerView& peers = peersOf[a.id];
            if (hedac) {
                std::vector<Coord> peerPositions;
                for (const AgentState* p : peers)
                    peerPositions.push_back(p->position);
                Grid<double> attraction =
                    hedacField(a, partition, config.strategy, peerPositions);
                std::optional<Coord> next = hedacStep(a, partition, attraction,
                                                      config.strategy, peerPositions);
                a.plannedPath.clear();
                if (next) a.plannedPath.push_back(*next);
            } else {
                a.goal = selectGoal(a, peers, partition, config.strategy, field);
                a.plannedPath.clear();
                if (a.goal) {
                    if (partition.regionOfCell(*a.goal) !=
                        partition.regionOfAgent(a.id))
                        throw std::logic_error("goal escaped the agent's region");
                    // Execution paths navigate around known peers; when no
                    // such route exists the agent stays put until the
                    // obstructing agents move. Selection above stays on the
                    // unblocked field so a transient blocker does not
                    // reshuffle goals.
                    if (peers.empty()) {
                        a.plannedPath = extractPath(field, *a.goal);
                    } else {
                        Grid<CellState> planningMap = a.exploredMap;
                        for (const AgentState* p : peers)
                            planningMap.at(p->position) = CellState::Obstacle;
                        DistanceField execField = wavefront(planningMap, a.position);
                        if (execField.reachable(*a.goal))
                            a.plannedPath = extractPath(execField, *a.goal);
                    }
                }
            }
        }

        // 5. Sequential stepping in id order.
        for (AgentState& a : agents) stepAgent(a, maze, occupancy);

        // Safety: distinct positions, all on free ground truth.
        std::set<Coord> seen;
        for (const AgentState& a : agents) {
            if (!seen.insert(a.position).second)
                throw std::logic_error("two agents share a cell");
            if (maze.cells.at(a.position) != CellState::Free)
                throw std::logic_error("agent standing on an obstacle");
        }

        // 6. Central push and termination check.
        for (const AgentState& a : agents) central.absorb(a.exploredMap);
        done = central.exploredCount == area;

        double roundSeconds =
            std::chrono::duration<double>(Clock::now() - roundStart).count();
        for (int i = 0; i < n; ++i) stepTimes.push_back(roundSeconds / n);

        if (trace)
            detail::writeTraceRound(*trace, round, agents, central.exploredCount,
                                    ledger.exchanges, roundSeconds);
        if (partitionDump) detail::dumpPartitionRound(*partitionDump, round, partition);
    }

    RunMetrics m;
    m.method = config.strategy.reportedName();
    m.rows = config.rows;
    m.cols = config.cols;
    m.obstacleProb = config.obstacleProbability;
    m.agents = n;
    m.seed = config.seed;
    m.rounds = round;
    m.timeSeconds = explorationTime(stepTimes, n, round);
    m.cost = explorationCost(agents);
    m.efficiency = m.cost > 0
                       ? explorationEfficiency(central.exploredCount, m.cost)
                       : 0.0;
    m.mapQuality = mapQuality(central.map, maze);
    m.commBits = commCost(ledger);
    m.mazeHash = mazeHash(maze);
    m.hitMaxRounds = !done;
    m.rngId = std::string(kRngId);
    return m;
}

inline RunMetrics runSimulation(const SimulationConfig& config,
                                std::ostream* trace = nullptr,
                                std::ostream* partitionDump = nullptr) {
    Maze maze = generateMaze(config.rows, config.cols,
                             config.obstacleProbability, config.seed,
                             config.carveStepFactor);
    return runSimulation(config, maze, trace, partitionDump);
}

}  // namespace mazeswarm
