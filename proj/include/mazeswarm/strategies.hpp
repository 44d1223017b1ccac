#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mazeswarm/grid.hpp"
#include "mazeswarm/partition.hpp"
#include "mazeswarm/pathing.hpp"
#include "mazeswarm/perception.hpp"

namespace mazeswarm {

enum class StrategyKind { CULVP, NearestFrontier, CUMNM, CUJGR, CUBSO, HEDAC };

inline std::string methodName(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::CULVP: return "culvp";
        case StrategyKind::NearestFrontier: return "nearest";
        case StrategyKind::CUMNM: return "cumnm";
        case StrategyKind::CUJGR: return "cujgr";
        case StrategyKind::CUBSO: return "cubso";
        case StrategyKind::HEDAC: return "hedac";
    }
    throw std::logic_error("unknown strategy kind");
}

inline StrategyKind methodFromName(const std::string& name) {
    if (name == "culvp") return StrategyKind::CULVP;
    if (name == "nearest") return StrategyKind::NearestFrontier;
    if (name == "cumnm") return StrategyKind::CUMNM;
    if (name == "cujgr") return StrategyKind::CUJGR;
    if (name == "cubso") return StrategyKind::CUBSO;
    if (name == "hedac") return StrategyKind::HEDAC;
    throw std::invalid_argument("unknown method name: " + name);
}

struct StrategyConfig {
    StrategyKind kind = StrategyKind::CULVP;
    double lambda = 0.2;
    double lambdaJgr = 0.8;
    int hedacIterations = 100;
    double hedacA = 10.0;
    bool antiCollision = true;
    /// Reported method name; defaults to the kind. Parameter sweeps use it
    /// to keep variants apart in result tables.
    std::string label;

    std::string reportedName() const {
        return label.empty() ? methodName(kind) : label;
    }
};

/// A frontier under evaluation: an unexplored cell inside the deciding
/// agent's region, with its wavefront distance and utility terms.
struct FrontierCandidate {
    Coord cell;
    int distance = 0;
    double uMnm = 0.0;
    double uJgr = 0.0;
    double utility = 0.0;
};

/// In-range peers visible to a deciding agent this round.
using PeerView = std::vector<const AgentState*>;

/// Unex(x, r): unexplored cells in the agent's map within the Chebyshev
/// view-range window of x, clipped to the grid.
inline int countUnexploredWindow(const Grid<CellState>& map, Coord center,
                                 int range) {
    int count = 0;
    for (int r = center.row - range; r <= center.row + range; ++r)
        for (int c = center.col - range; c <= center.col + range; ++c)
            if (map.inBounds(Coord{r, c}) &&
                map.at(r, c) == CellState::Unexplored)
                ++count;
    return count;
}

/// Min-max normalization onto [0, 1]; a constant score vector maps to all
/// ones, which preserves every argmax downstream.
inline std::vector<double> minMaxNormalize(const std::vector<double>& values) {
    std::vector<double> out(values.size(), 1.0);
    if (values.empty()) return out;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = (values[i] - *lo) / (*hi - *lo);
    return out;
}

/// Eq-style dispersion utility: summed Euclidean distance from frontier f
/// to the deciding agent and every known (in-range) peer.
inline double uMnm(Coord f, const std::vector<Coord>& agentPositions) {
    double sum = 0.0;
    for (const Coord& p : agentPositions) {
        double dr = f.row - p.row;
        double dc = f.col - p.col;
        sum += std::sqrt(dr * dr + dc * dc);
    }
    return sum;
}

/// Expected-gain utility: unexplored window counts summed over every cell
/// of the wavefront path to f. Overlapping windows are counted again on
/// purpose; the sum runs over path cells, not over the union of windows.
inline double uJgr(Coord f, const AgentState& agent, const DistanceField& field) {
    double sum = 0.0;
    for (const Coord& x : extractPath(field, f))
        sum += countUnexploredWindow(agent.exploredMap, x, agent.viewRange);
    return sum;
}

namespace detail {

/// Unexplored in-region cells reachable in the agent's field, in
/// row-major order (region cell lists are kept sorted).
inline std::vector<FrontierCandidate> reachableFrontiers(
    const AgentState& agent, const Partition& partition,
    const DistanceField& field) {
    std::vector<FrontierCandidate> out;
    int region = partition.regionOfAgent(agent.id);
    for (const Coord& cell : partition.cellsOf(region)) {
        if (agent.exploredMap.at(cell) != CellState::Unexplored) continue;
        int d = field.dist.at(cell);
        if (d < 0) continue;
        out.push_back(FrontierCandidate{cell, d});
    }
    return out;
}

inline std::vector<FrontierCandidate> nearestOf(
    std::vector<FrontierCandidate> frontiers) {
    if (frontiers.empty()) return frontiers;
    int best = frontiers.front().distance;
    for (const FrontierCandidate& f : frontiers) best = std::min(best, f.distance);
    std::vector<FrontierCandidate> out;
    for (FrontierCandidate& f : frontiers)
        if (f.distance == best) out.push_back(f);
    return out;
}

inline std::vector<Coord> knownPositions(const AgentState& agent,
                                         const PeerView& peers) {
    std::vector<Coord> positions{agent.position};
    for (const AgentState* p : peers) positions.push_back(p->position);
    return positions;
}

inline std::optional<Coord> selectCULVP(const AgentState& agent,
                                        const PeerView& peers,
                                        const Partition& partition,
                                        const StrategyConfig& cfg,
                                        const DistanceField& field) {
    std::vector<FrontierCandidate> all = reachableFrontiers(agent, partition, field);
    if (all.empty()) return std::nullopt;

    // Frontier differentiation: drop frontiers already claimed by in-range
    // peers before the nearest-distance cut, but only while enough
    // unexplored frontiers remain for everyone in the shared region, and
    // never down to an empty set. Filtering the whole pool (rather than
    // the tied-nearest set) keeps goals distinct even when every nearest
    // frontier is taken.
    int region = partition.regionOfAgent(agent.id);
    std::size_t coLocated = 1;
    std::set<Coord> claimed;
    for (const AgentState* p : peers) {
        if (partition.regionOfAgent(p->id) == region) ++coLocated;
        if (p->goal) claimed.insert(*p->goal);
    }
    if (all.size() >= coLocated && !claimed.empty()) {
        std::vector<FrontierCandidate> filtered;
        for (const FrontierCandidate& f : all)
            if (!claimed.count(f.cell)) filtered.push_back(f);
        if (!filtered.empty()) all = std::move(filtered);
    }
    std::vector<FrontierCandidate> candidates = nearestOf(all);

    std::vector<Coord> positions = knownPositions(agent, peers);
    std::vector<double> mnm;
    std::vector<double> jgr;
    mnm.reserve(candidates.size());
    jgr.reserve(candidates.size());
    for (FrontierCandidate& f : candidates) {
        f.uMnm = uMnm(f.cell, positions);
        f.uJgr = uJgr(f.cell, agent, field);
        mnm.push_back(f.uMnm);
        jgr.push_back(f.uJgr);
    }
    std::vector<double> nMnm = minMaxNormalize(mnm);
    std::vector<double> nJgr = minMaxNormalize(jgr);

    std::size_t best = 0;
    double bestScore = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].utility = nMnm[i] + cfg.lambda * nJgr[i];
        if (candidates[i].utility > bestScore) {
            bestScore = candidates[i].utility;
            best = i;
        }
    }
    return candidates[best].cell;
}

inline std::optional<Coord> selectNearest(const AgentState& agent,
                                          const Partition& partition,
                                          const DistanceField& field) {
    std::vector<FrontierCandidate> nearest =
        nearestOf(reachableFrontiers(agent, partition, field));
    if (nearest.empty()) return std::nullopt;
    return nearest.front().cell;
}

inline std::optional<Coord> selectCUMNM(const AgentState& agent,
                                        const PeerView& peers,
                                        const Partition& partition,
                                        const DistanceField& field) {
    std::vector<FrontierCandidate> frontiers =
        reachableFrontiers(agent, partition, field);
    if (frontiers.empty()) return std::nullopt;

    std::vector<Coord> positions = knownPositions(agent, peers);
    std::vector<double> gain;
    std::vector<double> cost;
    for (const FrontierCandidate& f : frontiers) {
        gain.push_back(uMnm(f.cell, positions));
        cost.push_back(f.distance);
    }
    std::vector<double> nGain = minMaxNormalize(gain);
    std::vector<double> nCost = minMaxNormalize(cost);

    std::size_t best = 0;
    double bestScore = 0.0;
    for (std::size_t i = 0; i < frontiers.size(); ++i) {
        double score = nGain[i] - nCost[i];
        if (i == 0 || score > bestScore) {
            bestScore = score;
            best = i;
        }
    }
    return frontiers[best].cell;
}

inline std::optional<Coord> selectCUJGR(const AgentState& agent,
                                        const Partition& partition,
                                        const StrategyConfig& cfg,
                                        const DistanceField& field) {
    std::vector<FrontierCandidate> frontiers =
        reachableFrontiers(agent, partition, field);
    if (frontiers.empty()) return std::nullopt;

    std::vector<double> gain;
    std::vector<double> cost;
    for (const FrontierCandidate& f : frontiers) {
        gain.push_back(countUnexploredWindow(agent.exploredMap, f.cell,
                                             agent.viewRange));
        cost.push_back(f.distance);
    }
    std::vector<double> nGain = minMaxNormalize(gain);
    std::vector<double> nCost = minMaxNormalize(cost);

    std::size_t best = 0;
    double bestScore = 0.0;
    for (std::size_t i = 0; i < frontiers.size(); ++i) {
        double score = cfg.lambdaJgr * nGain[i] - (1.0 - cfg.lambdaJgr) * nCost[i];
        if (i == 0 || score > bestScore) {
            bestScore = score;
            best = i;
        }
    }
    return frontiers[best].cell;
}

inline std::optional<Coord> selectCUBSO(const AgentState& agent,
                                        const PeerView& peers,
                                        const Partition& partition,
                                        const DistanceField& field) {
    std::vector<FrontierCandidate> frontiers =
        reachableFrontiers(agent, partition, field);
    if (frontiers.empty()) return std::nullopt;

    // Wavefront from each frontier over the agent's map; a frontier's
    // rank counts the known peers strictly closer to it than the agent.
    std::size_t best = 0;
    int bestRank = 0;
    int bestDist = 0;
    for (std::size_t i = 0; i < frontiers.size(); ++i) {
        DistanceField fromFrontier = wavefront(agent.exploredMap, frontiers[i].cell);
        int own = fromFrontier.dist.at(agent.position);
        int rank = 0;
        for (const AgentState* p : peers) {
            int d = fromFrontier.dist.at(p->position);
            if (d >= 0 && (own < 0 || d < own)) ++rank;
        }
        if (i == 0 || rank < bestRank ||
            (rank == bestRank && frontiers[i].distance < bestDist)) {
            best = i;
            bestRank = rank;
            bestDist = frontiers[i].distance;
        }
    }
    return frontiers[best].cell;
}

}  // namespace detail

/// All tied-nearest frontiers of the agent's region. Empty result is the
/// no-reachable-frontier signal that triggers region reassignment.
inline std::vector<FrontierCandidate> nearestFrontiers(const AgentState& agent,
                                                       const Partition& partition) {
    return detail::nearestOf(detail::reachableFrontiers(
        agent, partition, wavefront(agent.exploredMap, agent.position)));
}

inline std::optional<Coord> selectGoalCULVP(const AgentState& agent,
                                            const PeerView& peers,
                                            const Partition& partition,
                                            const StrategyConfig& cfg = {}) {
    return detail::selectCULVP(agent, peers, partition, cfg,
                               wavefront(agent.exploredMap, agent.position));
}

inline std::optional<Coord> selectGoalNearest(const AgentState& agent,
                                              const Partition& partition) {
    return detail::selectNearest(agent, partition,
                                 wavefront(agent.exploredMap, agent.position));
}

inline std::optional<Coord> selectGoalCUMNM(const AgentState& agent,
                                            const PeerView& peers,
                                            const Partition& partition) {
    return detail::selectCUMNM(agent, peers, partition,
                               wavefront(agent.exploredMap, agent.position));
}

inline std::optional<Coord> selectGoalCUJGR(const AgentState& agent,
                                            const Partition& partition,
                                            const StrategyConfig& cfg = {}) {
    return detail::selectCUJGR(agent, partition, cfg,
                               wavefront(agent.exploredMap, agent.position));
}

inline std::optional<Coord> selectGoalCUBSO(const AgentState& agent,
                                            const PeerView& peers,
                                            const Partition& partition) {
    return detail::selectCUBSO(agent, peers, partition,
                               wavefront(agent.exploredMap, agent.position));
}

/// Goal selection for the frontier strategies, given the agent's current
/// wavefront field. HEDAC is not frontier-driven; the engine drives it
/// through hedacField/hedacStep instead.
inline std::optional<Coord> selectGoal(const AgentState& agent,
                                       const PeerView& peers,
                                       const Partition& partition,
                                       const StrategyConfig& cfg,
                                       const DistanceField& field) {
    switch (cfg.kind) {
        case StrategyKind::CULVP:
            return detail::selectCULVP(agent, peers, partition, cfg, field);
        case StrategyKind::NearestFrontier:
            return detail::selectNearest(agent, partition, field);
        case StrategyKind::CUMNM:
            return detail::selectCUMNM(agent, peers, partition, field);
        case StrategyKind::CUJGR:
            return detail::selectCUJGR(agent, partition, cfg, field);
        case StrategyKind::CUBSO:
            return detail::selectCUBSO(agent, peers, partition, field);
        case StrategyKind::HEDAC:
            throw std::logic_error("HEDAC does not select frontier goals");
    }
    return std::nullopt;
}

/// Attraction field for HEDAC, Voronoi-adapted: Jacobi sweeps of
///   u(c) <- (sum of 4-neighbor u + a * s(c)) / 4
/// where s is 1 on unexplored in-region cells. Known obstacles, cells
/// occupied by known peers and unexplored cells outside the region are
/// held at 0, as are the implicit cells beyond the grid border.
inline Grid<double> hedacField(const AgentState& agent,
                               const Partition& partition,
                               const StrategyConfig& cfg,
                               const std::vector<Coord>& knownPeerPositions) {
    const Grid<CellState>& map = agent.exploredMap;
    int rows = map.rows();
    int cols = map.cols();
    int region = partition.regionOfAgent(agent.id);

    Grid<std::uint8_t> clamped(rows, cols, 0);
    Grid<double> source(rows, cols, 0.0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            CellState v = map.at(r, c);
            bool inRegion = partition.regionOfCell(Coord{r, c}) == region;
            if (v == CellState::Obstacle ||
                (v == CellState::Unexplored && !inRegion))
                clamped.at(r, c) = 1;
            else if (v == CellState::Unexplored)
                source.at(r, c) = 1.0;
        }
    }
    for (const Coord& p : knownPeerPositions) clamped.at(p) = 1;

    Grid<double> u(rows, cols, 0.0);
    Grid<double> next(rows, cols, 0.0);
    for (int it = 0; it < cfg.hedacIterations; ++it) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (clamped.at(r, c)) {
                    next.at(r, c) = 0.0;
                    continue;
                }
                double acc = cfg.hedacA * source.at(r, c);
                if (r > 0) acc += u.at(r - 1, c);
                if (r + 1 < rows) acc += u.at(r + 1, c);
                if (c > 0) acc += u.at(r, c - 1);
                if (c + 1 < cols) acc += u.at(r, c + 1);
                next.at(r, c) = acc / 4.0;
            }
        }
        std::swap(u, next);
    }
    return u;
}

/// Next move under HEDAC: the admissible 4-neighbor with the largest
/// field value. When every admissible neighbor reads 0 the agent is
/// trapped behind explored ground; the wavefront path to the nearest
/// in-region frontier gets a dominating bonus and the choice is repeated.
inline std::optional<Coord> hedacStep(const AgentState& agent,
                                      const Partition& partition,
                                      const Grid<double>& field,
                                      const StrategyConfig& cfg,
                                      const std::vector<Coord>& knownPeerPositions) {
    const Grid<CellState>& map = agent.exploredMap;
    std::vector<Coord> candidates;
    for (const Coord& step : kNeighborSteps) {
        Coord nb{agent.position.row + step.row, agent.position.col + step.col};
        if (!map.inBounds(nb)) continue;
        if (map.at(nb) == CellState::Obstacle) continue;
        if (cfg.antiCollision &&
            std::find(knownPeerPositions.begin(), knownPeerPositions.end(), nb) !=
                knownPeerPositions.end())
            continue;
        candidates.push_back(nb);
    }
    if (candidates.empty()) return std::nullopt;

    auto pickBest = [&](auto valueOf) {
        Coord best = candidates.front();
        double bestValue = valueOf(best);
        for (const Coord& c : candidates) {
            double v = valueOf(c);
            if (v > bestValue) {
                bestValue = v;
                best = c;
            }
        }
        return std::pair<Coord, double>(best, bestValue);
    };

    auto [best, bestValue] = pickBest([&](Coord c) { return field.at(c); });
    if (bestValue > 0.0) return best;

    // Trapped: boost the escape path toward the nearest frontier.
    DistanceField wf = wavefront(map, agent.position);
    std::vector<FrontierCandidate> frontiers =
        detail::reachableFrontiers(agent, partition, wf);
    if (frontiers.empty()) return std::nullopt;
    const FrontierCandidate* nearest = &frontiers.front();
    for (const FrontierCandidate& f : frontiers)
        if (f.distance < nearest->distance) nearest = &f;

    double maxField = 0.0;
    for (int r = 0; r < field.rows(); ++r)
        for (int c = 0; c < field.cols(); ++c)
            maxField = std::max(maxField, field.at(r, c));
    double bonus = 1.0 + maxField;

    std::set<Coord> onPath;
    for (const Coord& c : extractPath(wf, nearest->cell)) onPath.insert(c);
    auto [escape, unusedValue] = pickBest([&](Coord c) {
        return field.at(c) + (onPath.count(c) ? bonus : 0.0);
    });
    return escape;
}

}  // namespace mazeswarm
