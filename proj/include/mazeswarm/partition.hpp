#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "mazeswarm/grid.hpp"
#include "mazeswarm/pathing.hpp"
#include "mazeswarm/perception.hpp"

namespace mazeswarm {

/// Assignment of every maze cell to a region and of every agent to the
/// region it currently explores. Regions start as one-per-agent Voronoi
/// cells and only ever merge; reassignment moves agents, never cells.
class Partition {
public:
    Partition() = default;

    int regionOfCell(Coord c) const { return regionOf_.at(c); }
    const Grid<int>& regionGrid() const { return regionOf_; }

    /// Region cells in row-major order.
    const std::vector<Coord>& cellsOf(int region) const {
        return cellsOf_.at(region);
    }
    const std::set<int>& membersOf(int region) const { return members_.at(region); }
    int regionOfAgent(int agentId) const { return agentRegion_.at(agentId); }

    std::vector<int> regionIds() const {
        std::vector<int> ids;
        ids.reserve(cellsOf_.size());
        for (const auto& [id, cells] : cellsOf_) ids.push_back(id);
        return ids;
    }

    void reassignAgent(int agentId, int region) {
        members_.at(agentRegion_.at(agentId)).erase(agentId);
        members_.at(region).insert(agentId);
        agentRegion_[agentId] = region;
    }

    friend Partition computeVoronoi(const std::vector<Coord>& positions,
                                    int rows, int cols);
    friend void mergeRegions(Partition& partition,
                             const std::vector<std::pair<int, int>>& pairs);

private:
    Grid<int> regionOf_;
    std::map<int, std::vector<Coord>> cellsOf_;
    std::map<int, std::set<int>> members_;
    std::map<int, int> agentRegion_;
};

/// Voronoi partition of the full grid around the agents' positions,
/// ignoring obstacles (the maze content is unknown when regions are laid
/// out). Euclidean metric on cell indices; distance ties go to the lowest
/// agent id. Region i belongs to agent i.
inline Partition computeVoronoi(const std::vector<Coord>& positions,
                                int rows, int cols) {
    if (positions.empty())
        throw std::invalid_argument("at least one agent position required");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].row < 0 || positions[i].row >= rows ||
            positions[i].col < 0 || positions[i].col >= cols)
            throw std::invalid_argument("agent position out of bounds");
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if (positions[i] == positions[j])
                throw std::invalid_argument("duplicate agent positions");
    }

    Partition p;
    p.regionOf_ = Grid<int>(rows, cols, -1);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            long best = -1;
            int bestId = -1;
            for (std::size_t i = 0; i < positions.size(); ++i) {
                long dr = r - positions[i].row;
                long dc = c - positions[i].col;
                long d2 = dr * dr + dc * dc;
                if (bestId < 0 || d2 < best) {
                    best = d2;
                    bestId = static_cast<int>(i);
                }
            }
            p.regionOf_.at(r, c) = bestId;
            p.cellsOf_[bestId].push_back(Coord{r, c});
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        int id = static_cast<int>(i);
        p.members_[id] = {id};
        p.agentRegion_[id] = id;
    }
    return p;
}

/// Merges the regions of every connected component of the agent-contact
/// graph into the component's lowest region id. Permanent for the rest of
/// the run and idempotent for agents that already share a region.
inline void mergeRegions(Partition& partition,
                         const std::vector<std::pair<int, int>>& pairs) {
    if (pairs.empty()) return;

    // Contact components over agent ids.
    std::map<int, std::vector<int>> adjacency;
    for (const auto& [a, b] : pairs) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    std::set<int> visited;
    for (const auto& [start, unusedNeighbors] : adjacency) {
        if (visited.count(start)) continue;
        std::vector<int> component{start};
        visited.insert(start);
        for (std::size_t k = 0; k < component.size(); ++k) {
            for (int nb : adjacency[component[k]]) {
                if (visited.insert(nb).second) component.push_back(nb);
            }
        }

        std::set<int> regions;
        for (int agent : component)
            regions.insert(partition.agentRegion_.at(agent));
        if (regions.size() < 2) continue;
        int target = *regions.begin();

        for (int region : regions) {
            if (region == target) continue;
            auto& targetCells = partition.cellsOf_.at(target);
            auto& sourceCells = partition.cellsOf_.at(region);
            for (const Coord& c : sourceCells)
                partition.regionOf_.at(c) = target;
            std::vector<Coord> merged;
            merged.reserve(targetCells.size() + sourceCells.size());
            std::merge(targetCells.begin(), targetCells.end(),
                       sourceCells.begin(), sourceCells.end(),
                       std::back_inserter(merged));
            targetCells = std::move(merged);
            partition.cellsOf_.erase(region);

            auto& targetMembers = partition.members_.at(target);
            for (int agent : partition.members_.at(region)) {
                targetMembers.insert(agent);
                partition.agentRegion_[agent] = target;
            }
            partition.members_.erase(region);
        }
    }
}

/// Region holding the unexplored cell nearest to the agent by wavefront
/// distance over the central map; nullopt when the whole maze is known.
/// Intended for agents whose own region has no unexplored reachable cells
/// left.
inline std::optional<int> nearestUnexploredRegion(const AgentState& agent,
                                                  const Partition& partition,
                                                  const Grid<CellState>& centralMap) {
    DistanceField field = wavefront(centralMap, agent.position);
    int bestDist = -1;
    std::optional<int> bestRegion;
    for (int r = 0; r < centralMap.rows(); ++r) {
        for (int c = 0; c < centralMap.cols(); ++c) {
            Coord cell{r, c};
            if (centralMap.at(cell) != CellState::Unexplored) continue;
            int d = field.dist.at(cell);
            if (d < 0) continue;
            if (bestDist < 0 || d < bestDist) {
                bestDist = d;
                bestRegion = partition.regionOfCell(cell);
            }
        }
    }
    return bestRegion;
}

}  // namespace mazeswarm
