#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scnd/error.hpp"
#include "scnd/report.hpp"

using namespace scnd;

namespace {

// One plant, one warehouse, no customers: cells are P_0 and Qij(0,0).
NoiseEnsemble tiny_ensemble(std::vector<double> values, std::size_t n) {
    NoiseEnsemble ens;
    ens.noise.label = "hand";
    ens.n = n;
    ens.n_plants = 1;
    ens.n_warehouses = 1;
    ens.values = std::move(values);
    ens.feasible.assign(n, 1);
    summarize(ens);
    return ens;
}

Stage1Solution tiny_solution(double p, double q) {
    Stage1Solution s;
    s.p = {p};
    s.q_ij = Grid(1, 1);
    s.q_ij(0, 0) = q;
    s.q_jk = Grid(1, 0);
    s.w = {0.0};
    return s;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("difference against a hand-built ensemble") {
    // Two replicates of two inner draws each; every Qij draw is 5.
    const auto ens = tiny_ensemble({1, 5, 1, 5, 1, 5, 1, 5}, 2);
    const auto det = tiny_solution(1.0, 3.0);
    const auto q = diff_matrix(det, ens, VariableGroup::Qij);
    CHECK(q.rows == 1);
    CHECK(q.cols == 1);
    CHECK(q(0, 0) == -2.0);
    const auto p = diff_matrix(det, ens, VariableGroup::P);
    CHECK(p.values == std::vector<double>{0.0});
}

TEST_CASE("diff matrix needs a contributing replicate") {
    auto ens = tiny_ensemble({1, 5, 1, 5}, 2);
    ens.feasible = {0, 0};
    summarize(ens);
    CHECK_THROWS_AS(diff_matrix(tiny_solution(1, 3), ens, VariableGroup::Qij), ConfigError);
}

TEST_CASE("sample standard deviation") {
    const double zeros[] = {0.0, 0.0, 0.0, 0.0};
    CHECK(sample_std(zeros) == 0.0);
    const double pair[] = {0.0, 2.0};
    CHECK(sample_std(pair) == std::sqrt(2.0));
    const double one[] = {4.0};
    CHECK_THROWS_AS(sample_std(one), SingleCell);
    // Independent two-pass evaluation.
    const double v[] = {3.5, -1.25, 8.0, 0.5, 2.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= 5.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(sample_std(v) == doctest::Approx(std::sqrt(ss / 4.0)).epsilon(1e-15));
}

TEST_CASE("deviation table from a single-cell group") {
    const auto ens = tiny_ensemble({1, 5, 1, 5}, 2);
    const NoiseEnsemble list[] = {ens};
    CHECK_THROWS_AS(deviation_table(tiny_solution(1, 3), list), SingleCell);
}

TEST_CASE("2x2 zero matrix exports as three lines") {
    DiffMatrix m{VariableGroup::Qij, 2, 2, {0.0, 0.0, 0.0, 0.0}};
    std::ostringstream os;
    write_csv(os, m);
    CHECK(count_lines(os.str()) == 3);
    CHECK(os.str() == "i,0,1\n0,0,0\n1,0,0\n");
}

TEST_CASE("diff CSV round-trips bit for bit") {
    DiffMatrix m{VariableGroup::Qjk, 2, 3, {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, -0.0, 5e-324}};
    std::stringstream ss;
    write_csv(ss, m);
    const auto back = parse_diff_csv(ss, VariableGroup::Qjk);
    REQUIRE(back.values.size() == m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i)
        CHECK(std::bit_cast<std::uint64_t>(back.values[i]) == std::bit_cast<std::uint64_t>(m.values[i]));
    CHECK(back.rows == 2);
    CHECK(back.cols == 3);
}

TEST_CASE("malformed diff CSV is rejected") {
    std::istringstream bad_header("x,0\n0,1\n");
    CHECK_THROWS_AS(parse_diff_csv(bad_header, VariableGroup::Qij), IoFailure);
    std::istringstream ragged("i,0,1\n0,1\n");
    CHECK_THROWS_AS(parse_diff_csv(ragged, VariableGroup::Qij), IoFailure);
    std::istringstream junk("i,0\n0,abc\n");
    CHECK_THROWS_AS(parse_diff_csv(junk, VariableGroup::Qij), IoFailure);
}

TEST_CASE("two-decimal deviation rows round-trip through the table format") {
    DeviationTable t;
    const char* labels[] = {"gaussian", "lognormal", "pareto_a0.01", "pareto_a0.05", "pareto_a0.5"};
    const double sigma[] = {27.92, 97.65, 70.16, 29.39, 18.97};
    for (int i = 0; i < 5; ++i) t.rows.push_back({labels[i], sigma[i], 50, 50});
    std::stringstream ss;
    write_csv(ss, t);
    CHECK(ss.str().rfind("label,sigma,feasible,n\n", 0) == 0);
    CHECK(count_lines(ss.str()) == 6);
    CHECK(parse_deviation_csv(ss) == t);
}

TEST_CASE("labels with separators are quoted") {
    DeviationTable t;
    t.rows.push_back({"a,\"b\"", 1.5, 2, 3});
    std::stringstream ss;
    write_csv(ss, t);
    CHECK(ss.str() == "label,sigma,feasible,n\n\"a,\"\"b\"\"\",1.5,2,3\n");
    CHECK(parse_deviation_csv(ss) == t);
}

TEST_CASE("export to an unwritable path fails with the cause") {
    DiffMatrix m{VariableGroup::Qij, 1, 1, {0.0}};
    const auto path = std::filesystem::path("/nonexistent-dir-for-test") / "out.csv";
    try {
        export_csv(m, path);
        FAIL("expected IoFailure");
    } catch (const IoFailure& e) {
        CHECK(std::string(e.what()).find("No such file") != std::string::npos);
    }
}

TEST_CASE("export writes the same bytes as the stream writer") {
    DiffMatrix m{VariableGroup::Qij, 1, 2, {1.25, -7.5}};
    const auto path = std::filesystem::temp_directory_path() / "scnd_report_export.csv";
    export_csv(m, path);
    std::ifstream is(path);
    std::stringstream file;
    file << is.rdbuf();
    std::ostringstream direct;
    write_csv(direct, m);
    CHECK(file.str() == direct.str());
    std::filesystem::remove(path);
}

TEST_CASE("tensor round-trip") {
    const std::uint64_t dims[] = {2, 1, 3};
    const double values[] = {1.0, -2.5, 1e-310, 3.0, 0.1, -0.0};
    std::stringstream ss;
    write_tensor(ss, dims, values);
    CHECK(ss.str().size() == 8 + 8 + 3 * 8 + 6 * 8);
    CHECK(ss.str().substr(0, 8) == "SCNDTEN1");
    const Tensor t = read_tensor(ss);
    CHECK(t.dims == std::vector<std::uint64_t>{2, 1, 3});
    REQUIRE(t.values.size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(std::bit_cast<std::uint64_t>(t.values[i]) == std::bit_cast<std::uint64_t>(values[i]));

    std::istringstream truncated(ss.str().substr(0, 30));
    CHECK_THROWS_AS(read_tensor(truncated), IoFailure);
}
