#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mazeswarm/engine.hpp"
#include "mazeswarm/metrics.hpp"
#include "mazeswarm/rng.hpp"
#include "mazeswarm/strategies.hpp"

namespace mazeswarm {

struct MazeSpec {
    int rows = 30;
    int cols = 30;
    double obstacleProbability = 0.15;
};

/// Full experiment grid: every method runs on every
/// (mazeSpec, agentCount, repetition) cell, with the maze seed shared
/// across methods inside a cell so comparisons are paired.
struct ExperimentMatrix {
    std::vector<StrategyConfig> methods;
    std::vector<int> agentCounts{1, 2, 4, 6, 8, 10, 15, 20};
    std::vector<MazeSpec> mazeSpecs{{30, 30, 0.85}, {30, 30, 0.15}};
    int repetitions = 500;
    std::uint64_t baseSeed = 1;
    double broadcastFraction = 0.25;
    int viewRange = 2;
    long maxRounds = 0;
};

/// Seed of one experiment cell. The method index is deliberately not an
/// input: all methods must see the same maze and placement.
inline std::uint64_t cellSeed(std::uint64_t baseSeed, std::size_t specIndex,
                              int agentCount, int repetition) {
    return deriveSeed(baseSeed, specIndex + 1,
                      static_cast<std::uint64_t>(agentCount),
                      static_cast<std::uint64_t>(repetition) + 1);
}

// ---- JSON configuration (mirrors ExperimentMatrix field-for-field) ----

inline nlohmann::json strategyToJson(const StrategyConfig& s) {
    nlohmann::json j;
    j["kind"] = methodName(s.kind);
    j["lambda"] = s.lambda;
    j["lambdaJgr"] = s.lambdaJgr;
    j["hedacIterations"] = s.hedacIterations;
    j["hedacA"] = s.hedacA;
    j["antiCollision"] = s.antiCollision;
    if (!s.label.empty()) j["label"] = s.label;
    return j;
}

inline StrategyConfig strategyFromJson(const nlohmann::json& j) {
    StrategyConfig s;
    if (j.is_string()) {
        s.kind = methodFromName(j.get<std::string>());
        return s;
    }
    s.kind = methodFromName(j.at("kind").get<std::string>());
    s.lambda = j.value("lambda", s.lambda);
    s.lambdaJgr = j.value("lambdaJgr", s.lambdaJgr);
    s.hedacIterations = j.value("hedacIterations", s.hedacIterations);
    s.hedacA = j.value("hedacA", s.hedacA);
    s.antiCollision = j.value("antiCollision", s.antiCollision);
    s.label = j.value("label", s.label);
    return s;
}

inline nlohmann::json matrixToJson(const ExperimentMatrix& m) {
    nlohmann::json j;
    j["methods"] = nlohmann::json::array();
    for (const StrategyConfig& s : m.methods) j["methods"].push_back(strategyToJson(s));
    j["agentCounts"] = m.agentCounts;
    j["mazeSpecs"] = nlohmann::json::array();
    for (const MazeSpec& spec : m.mazeSpecs) {
        nlohmann::json s;
        s["rows"] = spec.rows;
        s["cols"] = spec.cols;
        s["obstacleProbability"] = spec.obstacleProbability;
        j["mazeSpecs"].push_back(s);
    }
    j["repetitions"] = m.repetitions;
    j["baseSeed"] = m.baseSeed;
    j["broadcastFraction"] = m.broadcastFraction;
    j["viewRange"] = m.viewRange;
    j["maxRounds"] = m.maxRounds;
    return j;
}

inline ExperimentMatrix matrixFromJson(const nlohmann::json& j) {
    ExperimentMatrix m;
    m.methods.clear();
    for (const auto& s : j.at("methods")) m.methods.push_back(strategyFromJson(s));
    if (j.contains("agentCounts"))
        m.agentCounts = j.at("agentCounts").get<std::vector<int>>();
    if (j.contains("mazeSpecs")) {
        m.mazeSpecs.clear();
        for (const auto& s : j.at("mazeSpecs")) {
            MazeSpec spec;
            spec.rows = s.at("rows").get<int>();
            spec.cols = s.at("cols").get<int>();
            spec.obstacleProbability = s.at("obstacleProbability").get<double>();
            m.mazeSpecs.push_back(spec);
        }
    }
    m.repetitions = j.value("repetitions", m.repetitions);
    m.baseSeed = j.value("baseSeed", m.baseSeed);
    m.broadcastFraction = j.value("broadcastFraction", m.broadcastFraction);
    m.viewRange = j.value("viewRange", m.viewRange);
    m.maxRounds = j.value("maxRounds", m.maxRounds);
    return m;
}

namespace detail {

struct CellRef {
    std::size_t specIndex;
    std::size_t agentIndex;
    int repetition;
    std::size_t methodIndex;
};

inline std::string manifestKey(const CellRef& c) {
    std::ostringstream os;
    os << c.specIndex << ' ' << c.agentIndex << ' ' << c.repetition << ' '
       << c.methodIndex;
    return os.str();
}

}  // namespace detail

/// Runs every cell of the matrix on a worker pool. Rows are written to
/// csvPath in canonical cell order regardless of completion order, so two
/// invocations with the same matrix produce identical bodies (modulo the
/// time_s column). A manifest file records completed cells, making an
/// interrupted sweep resumable. Returns the newly computed results in
/// canonical order.
inline std::vector<RunMetrics> runMatrix(const ExperimentMatrix& matrix,
                                         int workers,
                                         const std::string& csvPath = "",
                                         const std::string& manifestPath = "") {
    if (matrix.methods.empty())
        throw std::invalid_argument("experiment matrix needs at least one method");
    if (matrix.repetitions < 1)
        throw std::invalid_argument("repetitions must be >= 1");
    if (workers < 1) workers = 1;

    // Canonical enumeration: spec, agent count, repetition, method.
    std::vector<detail::CellRef> cells;
    for (std::size_t s = 0; s < matrix.mazeSpecs.size(); ++s)
        for (std::size_t a = 0; a < matrix.agentCounts.size(); ++a)
            for (int rep = 0; rep < matrix.repetitions; ++rep)
                for (std::size_t m = 0; m < matrix.methods.size(); ++m)
                    cells.push_back(detail::CellRef{s, a, rep, m});

    std::set<std::string> completed;
    if (!manifestPath.empty()) {
        std::ifstream manifestIn(manifestPath);
        std::string line;
        while (std::getline(manifestIn, line))
            if (!line.empty()) completed.insert(line);
    }

    std::ofstream csv;
    if (!csvPath.empty()) {
        bool writeHeader = completed.empty();
        csv.open(csvPath, completed.empty() ? std::ios::trunc : std::ios::app);
        if (!csv) throw std::runtime_error("cannot open result CSV: " + csvPath);
        if (writeHeader) csv << metricsCsvHeader() << '\n';
    }
    std::ofstream manifest;
    if (!manifestPath.empty()) {
        manifest.open(manifestPath, std::ios::app);
        if (!manifest)
            throw std::runtime_error("cannot open manifest: " + manifestPath);
    }

    std::vector<std::optional<RunMetrics>> slots(cells.size());
    std::vector<bool> skipped(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i)
        skipped[i] = completed.count(detail::manifestKey(cells[i])) > 0;

    std::atomic<std::size_t> nextTask{0};
    std::mutex writeMutex;
    std::size_t writeCursor = 0;
    std::exception_ptr firstError;

    auto flushReady = [&]() {
        // Caller holds writeMutex.
        while (writeCursor < cells.size() &&
               (skipped[writeCursor] || slots[writeCursor].has_value())) {
            if (!skipped[writeCursor]) {
                if (csv.is_open()) csv << toCsvRow(*slots[writeCursor]) << '\n' << std::flush;
                if (manifest.is_open())
                    manifest << detail::manifestKey(cells[writeCursor]) << '\n'
                             << std::flush;
            }
            ++writeCursor;
        }
    };

    auto worker = [&]() {
        while (true) {
            std::size_t i = nextTask.fetch_add(1);
            if (i >= cells.size()) return;
            if (skipped[i]) {
                std::lock_guard<std::mutex> lock(writeMutex);
                flushReady();
                continue;
            }
            const detail::CellRef& cell = cells[i];
            try {
                SimulationConfig cfg;
                const MazeSpec& spec = matrix.mazeSpecs[cell.specIndex];
                cfg.rows = spec.rows;
                cfg.cols = spec.cols;
                cfg.obstacleProbability = spec.obstacleProbability;
                cfg.agentCount = matrix.agentCounts[cell.agentIndex];
                cfg.strategy = matrix.methods[cell.methodIndex];
                cfg.broadcastFraction = matrix.broadcastFraction;
                cfg.viewRange = matrix.viewRange;
                cfg.maxRounds = matrix.maxRounds;
                cfg.seed = cellSeed(matrix.baseSeed, cell.specIndex,
                                    cfg.agentCount, cell.repetition);
                RunMetrics result = runSimulation(cfg);
                std::lock_guard<std::mutex> lock(writeMutex);
                slots[i] = std::move(result);
                flushReady();
            } catch (...) {
                std::lock_guard<std::mutex> lock(writeMutex);
                if (!firstError) firstError = std::current_exception();
                nextTask.store(cells.size());
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (firstError) std::rethrow_exception(firstError);
    {
        std::lock_guard<std::mutex> lock(writeMutex);
        flushReady();
    }

    std::vector<RunMetrics> out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (slots[i]) out.push_back(std::move(*slots[i]));
    return out;
}

// ---- Copeland ranking ----

/// Pairwise voting across experiment settings: per setting and method
/// pair, the better mean score earns the winner a vote (+1) and the loser
/// the complement (-1); ties contribute nothing. Methods are returned
/// sorted by total, ties broken by name.
inline std::vector<std::pair<std::string, double>> copelandRank(
    const std::map<std::string, std::map<std::string, double>>& scoresBySetting,
    bool lowerIsBetter) {
    std::set<std::string> methodSet;
    for (const auto& [setting, byMethod] : scoresBySetting)
        for (const auto& [method, score] : byMethod) methodSet.insert(method);
    std::vector<std::string> methods(methodSet.begin(), methodSet.end());

    std::map<std::string, double> total;
    for (const std::string& m : methods) total[m] = 0.0;
    for (const auto& [setting, byMethod] : scoresBySetting) {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            for (std::size_t j = i + 1; j < methods.size(); ++j) {
                auto a = byMethod.find(methods[i]);
                auto b = byMethod.find(methods[j]);
                if (a == byMethod.end() || b == byMethod.end()) continue;
                double diff = a->second - b->second;
                if (lowerIsBetter) diff = -diff;
                if (diff > 0) {
                    total[methods[i]] += 1.0;
                    total[methods[j]] -= 1.0;
                } else if (diff < 0) {
                    total[methods[i]] -= 1.0;
                    total[methods[j]] += 1.0;
                }
            }
        }
    }

    std::vector<std::pair<std::string, double>> ranking(total.begin(), total.end());
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

// ---- Composite Index Scoring ----

inline constexpr std::array<const char*, 6> kMetricNames = {
    "time_s", "rounds", "cost", "efficiency", "map_quality", "comm_bits"};
/// true where a smaller mean is the better result.
inline constexpr std::array<bool, 6> kMetricLowerIsBetter = {
    true, true, true, false, false, true};

struct GroupKey {
    int rows = 0;
    int cols = 0;
    double obstacleProb = 0.0;
    int agents = 0;
    auto operator<=>(const GroupKey&) const = default;
};

struct RankingTable {
    struct Group {
        GroupKey key;
        std::map<std::string, std::array<double, 6>> means;
        std::map<std::string, double> composite;
    };
    std::vector<Group> groups;
};

/// Equal-weight composite per (mazeSpec, agentCount) group: method means
/// are min-max scaled within the group, inverted where lower is better,
/// and summed over the six metrics. A metric with identical means for
/// every method contributes 1 to everyone.
inline RankingTable compositeIndex(const std::vector<RunMetrics>& results) {
    std::map<GroupKey, std::map<std::string, std::array<double, 6>>> sums;
    std::map<GroupKey, std::map<std::string, long>> counts;
    std::set<std::string> allMethods;
    for (const RunMetrics& m : results) {
        GroupKey key{m.rows, m.cols, m.obstacleProb, m.agents};
        std::array<double, 6> v{m.timeSeconds,
                                static_cast<double>(m.rounds),
                                static_cast<double>(m.cost),
                                m.efficiency,
                                m.mapQuality,
                                static_cast<double>(m.commBits)};
        auto& acc = sums[key][m.method];
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
        counts[key][m.method] += 1;
        allMethods.insert(m.method);
    }

    RankingTable table;
    for (auto& [key, byMethod] : sums) {
        for (const std::string& method : allMethods)
            if (!byMethod.count(method))
                throw std::runtime_error("method " + method +
                                         " missing from an experiment group");

        RankingTable::Group group;
        group.key = key;
        for (auto& [method, sum] : byMethod) {
            std::array<double, 6> mean;
            for (std::size_t i = 0; i < sum.size(); ++i)
                mean[i] = sum[i] / counts[key][method];
            group.means[method] = mean;
            group.composite[method] = 0.0;
        }

        for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
            double lo = 0.0, hi = 0.0;
            bool first = true;
            for (const auto& [method, mean] : group.means) {
                if (first) {
                    lo = hi = mean[metric];
                    first = false;
                } else {
                    lo = std::min(lo, mean[metric]);
                    hi = std::max(hi, mean[metric]);
                }
            }
            for (const auto& [method, mean] : group.means) {
                double contribution = 1.0;
                if (hi != lo) {
                    double scaled = (mean[metric] - lo) / (hi - lo);
                    contribution =
                        kMetricLowerIsBetter[metric] ? 1.0 - scaled : scaled;
                }
                group.composite[method] += contribution;
            }
        }
        table.groups.push_back(std::move(group));
    }
    return table;
}

// ---- Result CSV parsing (for the rank command and metric replays) ----

inline std::vector<RunMetrics> parseResultsCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results CSV: " + path);
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("empty results CSV: " + path);

    std::vector<RunMetrics> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 12)
            throw std::runtime_error("malformed results row: " + line);
        RunMetrics m;
        m.method = fields[0];
        m.rows = std::stoi(fields[1]);
        m.cols = std::stoi(fields[2]);
        m.obstacleProb = std::stod(fields[3]);
        m.agents = std::stoi(fields[4]);
        m.seed = std::stoull(fields[5]);
        m.timeSeconds = std::stod(fields[6]);
        m.rounds = std::stol(fields[7]);
        m.cost = std::stol(fields[8]);
        m.efficiency = std::stod(fields[9]);
        m.mapQuality = std::stod(fields[10]);
        m.commBits = std::stoll(fields[11]);
        if (fields.size() > 12) m.mazeHash = std::stoull(fields[12], nullptr, 16);
        if (fields.size() > 13) m.hitMaxRounds = fields[13] == "max_rounds";
        out.push_back(std::move(m));
    }
    return out;
}

/// Mean of one metric column per (setting, method), the input shape the
/// Copeland ranker expects. Settings are labeled rows x cols @ p / agents.
inline std::map<std::string, std::map<std::string, double>> meansBySetting(
    const std::vector<RunMetrics>& results, const std::string& metric) {
    int metricIndex = -1;
    for (std::size_t i = 0; i < kMetricNames.size(); ++i)
        if (metric == kMetricNames[i]) metricIndex = static_cast<int>(i);
    if (metricIndex < 0)
        throw std::invalid_argument("unknown metric column: " + metric);

    std::map<std::string, std::map<std::string, std::pair<double, long>>> acc;
    for (const RunMetrics& m : results) {
        char key[96];
        std::snprintf(key, sizeof(key), "%dx%d@%.6g/agents=%d", m.rows, m.cols,
                      m.obstacleProb, m.agents);
        std::array<double, 6> v{m.timeSeconds,
                                static_cast<double>(m.rounds),
                                static_cast<double>(m.cost),
                                m.efficiency,
                                m.mapQuality,
                                static_cast<double>(m.commBits)};
        auto& cell = acc[key][m.method];
        cell.first += v[metricIndex];
        cell.second += 1;
    }

    std::map<std::string, std::map<std::string, double>> means;
    for (const auto& [setting, byMethod] : acc)
        for (const auto& [method, cell] : byMethod)
            means[setting][method] = cell.first / cell.second;
    return means;
}

inline bool metricLowerIsBetter(const std::string& metric) {
    for (std::size_t i = 0; i < kMetricNames.size(); ++i)
        if (metric == kMetricNames[i]) return kMetricLowerIsBetter[i];
    throw std::invalid_argument("unknown metric column: " + metric);
}

/// Worker-count resolution: the MAZESWARM_WORKERS environment variable
/// overrides the CLI value; 0 falls back to the hardware concurrency.
inline int resolveWorkers(int cliWorkers) {
    if (const char* env = std::getenv("MAZESWARM_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (cliWorkers > 0) return cliWorkers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace mazeswarm
