#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracle/dense_lp.hpp"
#include "scnd/io.hpp"
#include "scnd/report.hpp"

using namespace scnd;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SCND_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "scnd_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int scnd_run(std::vector<std::string> args) { return cli::run(args); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("generate is deterministic and produces a valid instance") {
    const auto dir = scratch("generate");
    const auto a = (dir / "a.json").string(), b = (dir / "b.json").string();
    CHECK(scnd_run({"generate", "--seed", "42", "--size", "20", "-o", a}) == cli::kOk);
    CHECK(scnd_run({"generate", "--seed", "42", "--size", "20", "-o", b}) == cli::kOk);
    CHECK(slurp(a) == slurp(b));
    CHECK(validate_instance(instance_from_json(load_json(a))).ok());
    CHECK(scnd_run({"validate", a}) == cli::kOk);
}

TEST_CASE("invalid sizes and inputs exit with the configuration code") {
    const auto dir = scratch("invalid");
    CHECK(scnd_run({"generate", "--size", "0", "-o", (dir / "x.json").string()}) == cli::kConfig);
    CHECK(!fs::exists(dir / "x.json"));
    CHECK(scnd_run({"pipeline", "-c", (dir / "missing.json").string()}) == cli::kConfig);
    CHECK(scnd_run({"frobnicate"}) == cli::kConfig);

    auto doc = to_json(generate_instance(3, 2, 2, 2));
    doc["beta"][0][1] = 2.0;
    save_json(dir / "bad.json", doc);
    CHECK(scnd_run({"validate", (dir / "bad.json").string()}) == cli::kConfig);

    save_json(dir / "cfg.json", json{{"noise", {{"scale", "big"}}}});
    CHECK(scnd_run({"pipeline", "-c", (dir / "cfg.json").string()}) == cli::kConfig);
    save_json(dir / "cfg.json", json{{"noize", json::object()}});
    CHECK(scnd_run({"pipeline", "-c", (dir / "cfg.json").string()}) == cli::kConfig);
}

TEST_CASE("solve on the tiny fixture matches the enumeration oracle") {
    const auto dir = scratch("tiny");
    const auto instance = (kFixtures / "tiny_instance.json").string();
    const double recorded = load_json(kFixtures / "tiny_expected.json")["tc"].get<double>();
    // The recorded value must still be what the oracle finds.
    const auto oracle = oracle::enumerate_milp(build_stage1(instance_from_json(load_json(instance))));
    CHECK(oracle.objective == doctest::Approx(recorded).epsilon(1e-12));

    REQUIRE(scnd_run({"solve", "-i", instance, "--gap", "1e-9", "-d", dir.string(), "--write-lp"}) == cli::kOk);
    const auto sol = stage1_from_json(load_json(dir / "stage1.json"));
    CHECK(sol.tc == doctest::Approx(recorded).epsilon(1e-6));
    CHECK(fs::exists(dir / "stage2.json"));
    CHECK(line_count(dir / "stage2.csv") == 3);
    CHECK(slurp(dir / "summary.txt").find("tc1") != std::string::npos);
    CHECK(slurp(dir / "model.lp").rfind("\\ network design MILP: 22 columns, 26 rows\n", 0) == 0);
}

TEST_CASE("solve reports infeasibility and timeouts") {
    const auto dir = scratch("solve_codes");
    auto doc = to_json(generate_instance(4, 3, 3, 3));
    for (auto& p : doc["p_upper"]) p = 1.0;
    save_json(dir / "short.json", doc);
    CHECK(scnd_run({"solve", "-i", (dir / "short.json").string(), "-d", (dir / "a").string()}) == cli::kInfeasible);
    CHECK(scnd_run({"solve", "--size", "20", "--time-limit", "0", "-d", (dir / "b").string()}) == cli::kTimeout);
}

TEST_CASE("perturb with the default suite") {
    const auto dir = scratch("perturb");
    REQUIRE(scnd_run({"solve", "--size", "5", "-d", dir.string()}) == cli::kOk);

    REQUIRE(scnd_run({"perturb", "-d", dir.string(), "--n", "10"}) == cli::kOk);
    const auto table = [&] {
        std::ifstream is(dir / "deviation_table.csv");
        return parse_deviation_csv(is);
    };
    const auto t = table();
    REQUIRE(t.rows.size() == 6);
    for (const auto& r : t.rows) {
        CHECK(r.sigma > 0.0);
        CHECK(r.n == 10);
    }
    CHECK(load_json(dir / "ensembles.json").size() == 6);
    CHECK(fs::exists(dir / "diff_qij_pareto_a0.01.csv"));
    CHECK(fs::exists(dir / "plot.py"));

    // The report command rebuilds the same CSV bytes from the saved summaries.
    const auto before = slurp(dir / "deviation_table.csv");
    const auto diff_before = slurp(dir / "diff_qjk_gaussian.csv");
    fs::remove(dir / "deviation_table.csv");
    CHECK(scnd_run({"report", "-d", dir.string()}) == cli::kOk);
    CHECK(slurp(dir / "deviation_table.csv") == before);
    CHECK(slurp(dir / "diff_qjk_gaussian.csv") == diff_before);

    REQUIRE(scnd_run({"perturb", "-d", dir.string(), "--scale", "0", "--n", "4"}) == cli::kOk);
    for (const auto& r : table().rows) {
        CHECK(r.sigma == 0.0);
        CHECK(r.feasible == 4);
    }
    CHECK(scnd_run({"perturb", "-d", dir.string(), "--n", "1"}) == cli::kDegenerate);
}

TEST_CASE("pipeline replays to identical artifacts") {
    const auto a = scratch("pipe_a"), b = scratch("pipe_b");
    const std::vector<std::string> common = {"pipeline", "--size", "3", "--n", "6"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"-d", a.string(), "--threads", "1"});
    args_b.insert(args_b.end(), {"-d", b.string(), "--threads", "3"});
    REQUIRE(scnd_run(args_a) == cli::kOk);
    REQUIRE(scnd_run(args_b) == cli::kOk);
    const auto manifest = load_json(a / "manifest.json");
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    for (const auto& [name, hash] : manifest["files"].items()) {
        CHECK(file_hash(a / name) == hash.get<std::string>());
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(manifest["files"].contains("deviation_table.csv"));
    CHECK(manifest["seeds"]["noise"].size() == 6);
}
