#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mazeswarm/experiments.hpp"

using namespace mazeswarm;

namespace {

ExperimentMatrix smallMatrix() {
    ExperimentMatrix m;
    m.methods.clear();
    StrategyConfig culvp;
    culvp.kind = StrategyKind::CULVP;
    StrategyConfig nearest;
    nearest.kind = StrategyKind::NearestFrontier;
    m.methods = {culvp, nearest};
    m.agentCounts = {2};
    m.mazeSpecs = {MazeSpec{8, 8, 0.2}};
    m.repetitions = 3;
    m.baseSeed = 99;
    return m;
}

// Drops the time_s column so deterministic fields can be compared.
std::string stripTimeColumn(const std::string& csvBody) {
    std::istringstream in(csvBody);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        bool first = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == 6) continue;
            out << (first ? "" : ",") << fields[i];
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

std::string fileContents(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

RunMetrics syntheticRow(const std::string& method, int agents, double time,
                        long rounds, long cost, double efficiency,
                        double quality, long long comm) {
    RunMetrics m;
    m.method = method;
    m.rows = 30;
    m.cols = 30;
    m.obstacleProb = 0.85;
    m.agents = agents;
    m.timeSeconds = time;
    m.rounds = rounds;
    m.cost = cost;
    m.efficiency = efficiency;
    m.mapQuality = quality;
    m.commBits = comm;
    return m;
}

}  // namespace

TEST_CASE("runMatrix executes every cell of the grid") {
    std::vector<RunMetrics> results = runMatrix(smallMatrix(), 2);
    CHECK(results.size() == 6);  // 2 methods x 1 count x 1 spec x 3 reps
    int culvpRows = 0;
    for (const RunMetrics& m : results) {
        CHECK(m.agents == 2);
        CHECK(m.rows == 8);
        if (m.method == "culvp") ++culvpRows;
    }
    CHECK(culvpRows == 3);
}

TEST_CASE("methods see identical mazes within a cell") {
    std::vector<RunMetrics> results = runMatrix(smallMatrix(), 2);
    std::map<std::uint64_t, std::map<std::string, std::uint64_t>> hashesBySeed;
    for (const RunMetrics& m : results) hashesBySeed[m.seed][m.method] = m.mazeHash;
    CHECK(hashesBySeed.size() == 3);  // one seed per repetition
    for (const auto& [seed, byMethod] : hashesBySeed) {
        REQUIRE(byMethod.size() == 2);
        CHECK(byMethod.at("culvp") == byMethod.at("nearest"));
    }
}

TEST_CASE("identical matrices produce identical csv bodies modulo time") {
    std::string csvA = "test_runmatrix_a.csv";
    std::string csvB = "test_runmatrix_b.csv";
    runMatrix(smallMatrix(), 2, csvA);
    runMatrix(smallMatrix(), 1, csvB);  // different worker count on purpose
    CHECK(stripTimeColumn(fileContents(csvA)) ==
          stripTimeColumn(fileContents(csvB)));
    std::remove(csvA.c_str());
    std::remove(csvB.c_str());
}

TEST_CASE("an interrupted sweep resumes from the manifest") {
    std::string csvFull = "test_resume_full.csv";
    std::string csvPart = "test_resume_part.csv";
    std::string manifestFull = csvFull + ".manifest";
    std::string manifestPart = csvPart + ".manifest";
    runMatrix(smallMatrix(), 2, csvFull, manifestFull);

    // Cut both files after three completed cells to fake an interruption.
    {
        std::istringstream inCsv(fileContents(csvFull));
        std::ofstream outCsv(csvPart);
        std::string line;
        for (int i = 0; i < 4 && std::getline(inCsv, line); ++i)
            outCsv << line << '\n';  // header + 3 rows
        std::istringstream inManifest(fileContents(manifestFull));
        std::ofstream outManifest(manifestPart);
        for (int i = 0; i < 3 && std::getline(inManifest, line); ++i)
            outManifest << line << '\n';
    }

    std::vector<RunMetrics> resumed = runMatrix(smallMatrix(), 2, csvPart, manifestPart);
    CHECK(resumed.size() == 3);  // only the missing cells ran
    CHECK(stripTimeColumn(fileContents(csvPart)) ==
          stripTimeColumn(fileContents(csvFull)));
    CHECK(fileContents(manifestPart) == fileContents(manifestFull));

    for (const std::string& f :
         {csvFull, csvPart, manifestFull, manifestPart})
        std::remove(f.c_str());
}

TEST_CASE("experiment matrices round-trip through json") {
    ExperimentMatrix m = smallMatrix();
    m.methods[0].lambda = 0.35;
    m.methods[1].label = "baseline";
    m.maxRounds = 1234;
    ExperimentMatrix back = matrixFromJson(matrixToJson(m));
    CHECK(back.methods.size() == 2);
    CHECK(back.methods[0].kind == StrategyKind::CULVP);
    CHECK(back.methods[0].lambda == 0.35);
    CHECK(back.methods[1].reportedName() == "baseline");
    CHECK(back.agentCounts == m.agentCounts);
    CHECK(back.mazeSpecs.size() == 1);
    CHECK(back.mazeSpecs[0].obstacleProbability == 0.2);
    CHECK(back.repetitions == 3);
    CHECK(back.baseSeed == 99);
    CHECK(back.maxRounds == 1234);
}

TEST_CASE("copeland voting rewards unanimous winners") {
    std::map<std::string, std::map<std::string, double>> scores;
    scores["s1"] = {{"a", 1.0}, {"b", 5.0}};
    scores["s2"] = {{"a", 2.0}, {"b", 9.0}};
    scores["s3"] = {{"a", 3.0}, {"b", 4.0}};
    auto ranking = copelandRank(scores, /*lowerIsBetter=*/true);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].first == "a");
    CHECK(ranking[0].second == 3.0);
    CHECK(ranking[1].second == -3.0);
}

TEST_CASE("copeland voting gives equal scores to identical methods") {
    std::map<std::string, std::map<std::string, double>> scores;
    scores["s1"] = {{"a", 2.0}, {"b", 2.0}, {"c", 2.0}};
    scores["s2"] = {{"a", 7.0}, {"b", 7.0}, {"c", 7.0}};
    for (const auto& [method, score] : copelandRank(scores, false))
        CHECK(score == 0.0);
}

TEST_CASE("copeland votes are invariant under monotone score transforms") {
    std::map<std::string, std::map<std::string, double>> scores;
    scores["s1"] = {{"a", 1.0}, {"b", 5.0}, {"c", 3.0}};
    scores["s2"] = {{"a", 4.0}, {"b", 2.0}, {"c", 6.0}};
    scores["s3"] = {{"a", 9.0}, {"b", 9.0}, {"c", 1.0}};
    auto base = copelandRank(scores, true);

    std::map<std::string, std::map<std::string, double>> transformed;
    for (const auto& [setting, byMethod] : scores)
        for (const auto& [method, x] : byMethod)
            transformed[setting][method] = x * x * x + 5.0;  // strictly increasing
    CHECK(copelandRank(transformed, true) == base);
}

TEST_CASE("worker resolution prefers the environment override") {
    setenv("MAZESWARM_WORKERS", "3", 1);
    CHECK(resolveWorkers(8) == 3);
    unsetenv("MAZESWARM_WORKERS");
    CHECK(resolveWorkers(8) == 8);
    CHECK(resolveWorkers(0) >= 1);
}

TEST_CASE("copeland voting matches the hand table on a cycle") {
    // Rock-paper-scissors across three settings plus one all-tie setting:
    // every pairwise win cancels and all totals land on zero.
    std::map<std::string, std::map<std::string, double>> scores;
    scores["s1"] = {{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};
    scores["s2"] = {{"a", 1.0}, {"b", 3.0}, {"c", 2.0}};
    scores["s3"] = {{"a", 2.0}, {"b", 1.0}, {"c", 3.0}};
    scores["s4"] = {{"a", 5.0}, {"b", 5.0}, {"c", 5.0}};
    auto ranking = copelandRank(scores, false);
    REQUIRE(ranking.size() == 3);
    for (const auto& [method, score] : ranking) CHECK(score == 0.0);
    // Ties fall back to name order.
    CHECK(ranking[0].first == "a");
    CHECK(ranking[2].first == "c");
}

TEST_CASE("a lone method in a group receives the degenerate composite") {
    std::vector<RunMetrics> rows{
        syntheticRow("only", 4, 1.0, 100, 400, 2.0, 1.0, 1000)};
    RankingTable table = compositeIndex(rows);
    REQUIRE(table.groups.size() == 1);
    CHECK(table.groups[0].composite.at("only") == Catch::Approx(6.0));
}

TEST_CASE("a dominating method outranks the dominated one") {
    std::vector<RunMetrics> rows{
        syntheticRow("good", 4, 1.0, 100, 400, 2.0, 1.0, 1000),
        syntheticRow("bad", 4, 2.0, 200, 800, 1.0, 0.9, 2000)};
    RankingTable table = compositeIndex(rows);
    CHECK(table.groups[0].composite.at("good") == Catch::Approx(6.0));
    CHECK(table.groups[0].composite.at("bad") == Catch::Approx(0.0));
}

TEST_CASE("composite scores equal the hand-computed normalized sums") {
    std::vector<RunMetrics> rows{
        syntheticRow("a", 4, 1.0, 100, 400, 2.0, 1.0, 1000),
        syntheticRow("b", 4, 2.0, 200, 800, 1.0, 1.0, 2000),
        syntheticRow("c", 4, 3.0, 150, 600, 1.5, 0.9, 3000)};
    RankingTable table = compositeIndex(rows);
    REQUIRE(table.groups.size() == 1);
    const auto& composite = table.groups[0].composite;
    CHECK(composite.at("a") == Catch::Approx(6.0));
    CHECK(composite.at("b") == Catch::Approx(2.0));
    CHECK(composite.at("c") == Catch::Approx(1.5));
}

TEST_CASE("improving one metric never lowers a composite score") {
    std::vector<RunMetrics> rows{
        syntheticRow("a", 4, 1.0, 100, 400, 2.0, 1.0, 1000),
        syntheticRow("b", 4, 2.0, 200, 800, 1.0, 1.0, 2000),
        syntheticRow("c", 4, 3.0, 150, 600, 1.5, 0.9, 3000)};
    double before = compositeIndex(rows).groups[0].composite.at("b");
    rows[1].cost = 500;  // b improves its exploration cost
    double after = compositeIndex(rows).groups[0].composite.at("b");
    CHECK(after >= before);
}

TEST_CASE("a method missing from a group is an error") {
    std::vector<RunMetrics> rows{
        syntheticRow("a", 4, 1.0, 100, 400, 2.0, 1.0, 1000),
        syntheticRow("b", 4, 2.0, 200, 800, 1.0, 1.0, 2000),
        syntheticRow("a", 8, 1.0, 100, 400, 2.0, 1.0, 1000)};
    CHECK_THROWS_AS(compositeIndex(rows), std::runtime_error);
}

TEST_CASE("result csv files parse back into metric rows") {
    std::string path = "test_parse_results.csv";
    {
        std::ofstream out(path);
        out << metricsCsvHeader() << '\n';
        RunMetrics m = syntheticRow("culvp", 4, 0.25, 100, 400, 2.25, 1.0, 3600);
        m.seed = 42;
        m.mazeHash = 0xdeadbeefull;
        out << toCsvRow(m) << '\n';
    }
    std::vector<RunMetrics> rows = parseResultsCsv(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].method == "culvp");
    CHECK(rows[0].agents == 4);
    CHECK(rows[0].seed == 42);
    CHECK(rows[0].rounds == 100);
    CHECK(rows[0].cost == 400);
    CHECK(rows[0].efficiency == Catch::Approx(2.25));
    CHECK(rows[0].mazeHash == 0xdeadbeefull);
    CHECK_FALSE(rows[0].hitMaxRounds);
    std::remove(path.c_str());

    auto means = meansBySetting(rows, "cost");
    REQUIRE(means.size() == 1);
    CHECK(means.begin()->second.at("culvp") == Catch::Approx(400.0));
    CHECK(metricLowerIsBetter("cost"));
    CHECK_FALSE(metricLowerIsBetter("efficiency"));
    CHECK_THROWS_AS(metricLowerIsBetter("bogus"), std::invalid_argument);
}
