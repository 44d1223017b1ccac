#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mazeswarm/engine.hpp"
#include "mazeswarm/experiments.hpp"

namespace {

using namespace mazeswarm;

struct SimulateOptions {
    SimulationConfig config;
    std::string method = "culvp";
    std::string tracePath;
    std::string dumpMazePath;
    std::string loadMazePath;
    std::string dumpPartitionPath;
    bool noAntiCollision = false;
};

int runSimulateCommand(SimulateOptions& opt) {
    opt.config.strategy.kind = methodFromName(opt.method);
    opt.config.strategy.antiCollision = !opt.noAntiCollision;

    Maze maze;
    if (!opt.loadMazePath.empty()) {
        maze = readMazeFile(opt.loadMazePath);
        opt.config.rows = maze.rows;
        opt.config.cols = maze.cols;
        maze.obstacleProbability = opt.config.obstacleProbability;
        maze.seed = opt.config.seed;
    } else {
        maze = generateMaze(opt.config.rows, opt.config.cols,
                            opt.config.obstacleProbability, opt.config.seed,
                            opt.config.carveStepFactor);
    }
    if (!opt.dumpMazePath.empty()) writeMazeFile(maze, opt.dumpMazePath);

    std::ofstream trace;
    if (!opt.tracePath.empty()) {
        trace.open(opt.tracePath);
        if (!trace) throw std::runtime_error("cannot open trace file: " + opt.tracePath);
    }
    std::ofstream partitionDump;
    if (!opt.dumpPartitionPath.empty()) {
        partitionDump.open(opt.dumpPartitionPath);
        if (!partitionDump)
            throw std::runtime_error("cannot open partition dump: " +
                                     opt.dumpPartitionPath);
    }

    RunMetrics metrics = runSimulation(opt.config, maze,
                                       trace.is_open() ? &trace : nullptr,
                                       partitionDump.is_open() ? &partitionDump : nullptr);
    std::cout << metricsCsvHeader() << '\n' << toCsvRow(metrics) << '\n';
    return metrics.hitMaxRounds ? 2 : 0;
}

int runBenchCommand(const std::string& configPath, const std::string& outPath,
                    std::string manifestPath, int workers, int repsOverride) {
    std::ifstream in(configPath);
    if (!in) throw std::runtime_error("cannot open config: " + configPath);
    nlohmann::json j;
    in >> j;
    ExperimentMatrix matrix = matrixFromJson(j);
    if (repsOverride > 0) matrix.repetitions = repsOverride;
    if (manifestPath.empty()) manifestPath = outPath + ".manifest";

    std::vector<RunMetrics> results =
        runMatrix(matrix, resolveWorkers(workers), outPath, manifestPath);
    long flagged = 0;
    for (const RunMetrics& m : results) flagged += m.hitMaxRounds ? 1 : 0;
    std::cout << "wrote " << results.size() << " new rows to " << outPath;
    if (flagged) std::cout << " (" << flagged << " hit the round cap)";
    std::cout << '\n';
    return 0;
}

void writeCompositeCsv(std::ostream& out, const RankingTable& table) {
    out << "rows,cols,obstacle_prob,agents,method";
    for (const char* metric : kMetricNames) out << ",mean_" << metric;
    out << ",composite\n";
    for (const auto& group : table.groups) {
        for (const auto& [method, mean] : group.means) {
            char prefix[96];
            std::snprintf(prefix, sizeof(prefix), "%d,%d,%.6g,%d,", group.key.rows,
                          group.key.cols, group.key.obstacleProb, group.key.agents);
            out << prefix << method;
            for (double v : mean) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), ",%.10g", v);
                out << buf;
            }
            char composite[32];
            std::snprintf(composite, sizeof(composite), ",%.10g",
                          group.composite.at(method));
            out << composite << '\n';
        }
    }
}

int runRankCommand(const std::string& inputPath, const std::string& mode,
                   const std::string& metric, const std::string& outPath) {
    std::vector<RunMetrics> results = parseResultsCsv(inputPath);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!outPath.empty()) {
        file.open(outPath);
        if (!file) throw std::runtime_error("cannot open output: " + outPath);
        out = &file;
    }

    if (mode == "copeland") {
        auto ranking =
            copelandRank(meansBySetting(results, metric), metricLowerIsBetter(metric));
        *out << "method,copeland_score\n";
        for (const auto& [method, score] : ranking) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), ",%.10g", score);
            *out << method << buf << '\n';
        }
    } else if (mode == "composite") {
        writeCompositeCsv(*out, compositeIndex(results));
    } else {
        throw std::invalid_argument("mode must be copeland or composite");
    }
    return 0;
}

std::vector<std::pair<int, int>> parseSizes(const std::string& spec) {
    std::vector<std::pair<int, int>> sizes;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto x = item.find('x');
        if (x == std::string::npos)
            throw std::invalid_argument("sizes must look like 15x15,30x30");
        sizes.emplace_back(std::stoi(item.substr(0, x)),
                           std::stoi(item.substr(x + 1)));
    }
    return sizes;
}

int runSweepLambdaCommand(const std::string& valuesSpec, const std::string& sizesSpec,
                          double obstacleProb, const std::string& agentsSpec,
                          int reps, std::uint64_t seed, int workers,
                          const std::string& metric, const std::string& outPath) {
    ExperimentMatrix matrix;
    matrix.methods.clear();
    std::stringstream vs(valuesSpec);
    std::string item;
    while (std::getline(vs, item, ',')) {
        StrategyConfig s;
        s.kind = StrategyKind::CULVP;
        s.lambda = std::stod(item);
        s.label = "culvp_lambda=" + item;
        matrix.methods.push_back(s);
    }
    if (matrix.methods.empty())
        throw std::invalid_argument("no lambda values given");

    matrix.mazeSpecs.clear();
    for (auto [rows, cols] : parseSizes(sizesSpec))
        matrix.mazeSpecs.push_back(MazeSpec{rows, cols, obstacleProb});
    matrix.agentCounts.clear();
    {
        std::stringstream as(agentsSpec);
        while (std::getline(as, item, ','))
            matrix.agentCounts.push_back(std::stoi(item));
    }
    matrix.repetitions = reps;
    matrix.baseSeed = seed;

    std::vector<RunMetrics> results =
        runMatrix(matrix, resolveWorkers(workers), outPath);
    auto ranking =
        copelandRank(meansBySetting(results, metric), metricLowerIsBetter(metric));
    std::cout << "lambda,copeland_score\n";
    for (const auto& [method, score] : ranking) {
        std::string lambda = method.substr(method.find('=') + 1);
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%.10g", score);
        std::cout << lambda << buf << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiagent maze-exploration simulator and benchmark harness"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run one exploration");
    simulate->add_option("--rows", sim.config.rows, "Maze rows")->check(CLI::Range(3, 1000));
    simulate->add_option("--cols", sim.config.cols, "Maze columns")->check(CLI::Range(3, 1000));
    simulate->add_option("--obstacle-prob", sim.config.obstacleProbability,
                         "Obstacle retention probability")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--agents", sim.config.agentCount, "Number of agents")
        ->check(CLI::Range(1, 1000));
    simulate->add_option("--method", sim.method,
                         "culvp|nearest|cumnm|cujgr|cubso|hedac");
    simulate->add_option("--seed", sim.config.seed, "Run seed");
    simulate->add_option("--view-range", sim.config.viewRange, "Sensor range in cells");
    simulate->add_option("--broadcast-frac", sim.config.broadcastFraction,
                         "Broadcast range as a fraction of max(rows, cols)");
    simulate->add_option("--lambda", sim.config.strategy.lambda, "CU-LVP lambda");
    simulate->add_option("--lambda-jgr", sim.config.strategy.lambdaJgr, "CU-JGR weight");
    simulate->add_option("--hedac-iters", sim.config.strategy.hedacIterations,
                         "HEDAC Jacobi sweeps");
    simulate->add_option("--hedac-a", sim.config.strategy.hedacA, "HEDAC source strength");
    simulate->add_flag("--no-anti-collision", sim.noAntiCollision,
                       "Disable the HEDAC anti-collision rule");
    simulate->add_option("--max-rounds", sim.config.maxRounds,
                         "Round cap (0 = 50 * rows * cols)");
    simulate->add_option("--carve-steps", sim.config.carveStepFactor,
                         "Random-walk steps per cell during maze carving");
    simulate->add_option("--trace", sim.tracePath, "Write per-round JSON lines here");
    simulate->add_option("--dump-maze", sim.dumpMazePath, "Write the maze file");
    simulate->add_option("--load-maze", sim.loadMazePath,
                         "Load a maze file instead of generating");
    simulate->add_option("--dump-partition", sim.dumpPartitionPath,
                         "Write per-round region ids as CSV");

    std::string benchConfig, benchOut = "results.csv", benchManifest;
    int benchWorkers = 0, benchReps = 0;
    CLI::App* bench = app.add_subcommand("bench", "Run an experiment matrix");
    bench->add_option("--config", benchConfig, "Experiment matrix JSON")->required();
    bench->add_option("--out", benchOut, "Result CSV path");
    bench->add_option("--manifest", benchManifest,
                      "Completed-cell manifest (default <out>.manifest)");
    bench->add_option("--workers", benchWorkers,
                      "Worker threads (MAZESWARM_WORKERS overrides; 0 = all cores)");
    bench->add_option("--reps", benchReps, "Override repetitions from the config");

    std::string rankInput, rankMode = "composite", rankMetric = "cost", rankOut;
    CLI::App* rank = app.add_subcommand("rank", "Rank methods from a result CSV");
    rank->add_option("--input", rankInput, "Result CSV")->required();
    rank->add_option("--mode", rankMode, "copeland|composite");
    rank->add_option("--metric", rankMetric,
                     "Metric column for copeland mode (time_s|rounds|cost|"
                     "efficiency|map_quality|comm_bits)");
    rank->add_option("--out", rankOut, "Output CSV (default stdout)");

    std::string sweepValues = "0.0,0.2,0.5,1.0", sweepSizes = "15x15,30x30";
    std::string sweepAgents = "4,8", sweepMetric = "cost", sweepOut;
    double sweepProb = 0.15;
    int sweepReps = 50, sweepWorkers = 0;
    std::uint64_t sweepSeed = 1;
    CLI::App* sweep = app.add_subcommand(
        "sweep-lambda", "Copeland-compare CU-LVP lambda values");
    sweep->add_option("--values", sweepValues, "Comma-separated lambda values");
    sweep->add_option("--sizes", sweepSizes, "Maze sizes, e.g. 15x15,30x30");
    sweep->add_option("--obstacle-prob", sweepProb, "Obstacle probability");
    sweep->add_option("--agents", sweepAgents, "Comma-separated agent counts");
    sweep->add_option("--reps", sweepReps, "Repetitions per cell");
    sweep->add_option("--seed", sweepSeed, "Base seed");
    sweep->add_option("--workers", sweepWorkers, "Worker threads");
    sweep->add_option("--metric", sweepMetric, "Compared metric column");
    sweep->add_option("--out", sweepOut, "Also write raw rows to this CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return runSimulateCommand(sim);
        if (bench->parsed())
            return runBenchCommand(benchConfig, benchOut, benchManifest,
                                   benchWorkers, benchReps);
        if (rank->parsed())
            return runRankCommand(rankInput, rankMode, rankMetric, rankOut);
        if (sweep->parsed())
            return runSweepLambdaCommand(sweepValues, sweepSizes, sweepProb,
                                         sweepAgents, sweepReps, sweepSeed,
                                         sweepWorkers, sweepMetric, sweepOut);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
