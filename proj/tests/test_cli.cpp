#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qsc/cli.hpp"
#include "qsc/plot.hpp"

using namespace qsc;
using nlohmann::json;

TEST_SUITE_BEGIN("cli");

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"qsc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream captured;
    auto* old = std::cout.rdbuf(captured.rdbuf());
    const int code = cli::cli_main(int(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return {code, captured.str()};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/qsc_test_") + name;
}

}  // namespace

TEST_CASE("exact-stats prints the frozen rationals") {
    const auto res = run_cli({"exact-stats", "--n", "3", "--json"});
    CHECK(res.exit_code == cli::kExitOk);
    const auto j = json::parse(res.out);
    CHECK(j["kappa"] == "8/3");
    CHECK(j["var_k"] == "2/9");

    const auto res_t = run_cli({"exact-stats", "--t", "50", "--json"});
    CHECK(res_t.exit_code == cli::kExitOk);
    const auto jt = json::parse(res_t.out);
    CHECK(jt["mean_k_poisson"].get<double>() > 0);

    CHECK(run_cli({"exact-stats"}).exit_code == cli::kExitValidation);
}

TEST_CASE("sweep-lemmas small grid exits clean") {
    const auto res = run_cli({"sweep-lemmas", "--nmax", "8"});
    CHECK(res.exit_code == cli::kExitOk);
    const auto j = json::parse(res.out);
    CHECK(j["passed"].get<bool>());
    CHECK(j["sign_checks"]["delta2"].get<uint64_t>() > 0);

    // global flags are accepted after the subcommand and shard identically
    const auto sharded = run_cli({"sweep-lemmas", "--nmax", "8", "--jobs", "3"});
    CHECK(sharded.exit_code == cli::kExitOk);
    CHECK(json::parse(sharded.out)["checks"] == j["checks"]);
}

TEST_CASE("cov-table and cov-poisson") {
    const std::string csv = temp_path("cov.csv");
    const auto res = run_cli({"cov-table", "--nmax", "8", "--mode", "exact", "--out", csv});
    CHECK(res.exit_code == cli::kExitOk);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,a,b,numerator,denominator");

    const auto cp = run_cli({"cov-poisson", "--pw", "0.5", "--t", "8"});
    CHECK(cp.exit_code == cli::kExitOk);
    const auto j = json::parse(cp.out);
    CHECK(j["value"].get<double>() == doctest::Approx(36.6846).epsilon(1e-3));

    CHECK(run_cli({"cov-poisson", "--pw", "1.5", "--t", "8"}).exit_code ==
          cli::kExitValidation);
}

TEST_CASE("check-condition matches the geometric series") {
    const auto res =
        run_cli({"check-condition", "--source", "memoryless:0.5,0.5", "--depth", "60"});
    CHECK(res.exit_code == cli::kExitOk);
    const auto j = json::parse(res.out);
    const double r = 1.0 / std::sqrt(2.0);
    const double oracle = (1.0 - std::pow(r, 61)) / (1.0 - r);
    CHECK(j["partial_sum"].get<double>() == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("simulate then report round trips bit for bit") {
    const std::string csv = temp_path("runs.csv");
    const auto sim = run_cli({"simulate", "--source", "memoryless:1/2,1/2", "--t", "9", "--runs",
                              "120", "--seed", "5", "--depth", "2", "--out", csv});
    REQUIRE(sim.exit_code == cli::kExitOk);
    const auto rep = run_cli({"report", "--in", csv});
    REQUIRE(rep.exit_code == cli::kExitOk);
    const auto sim_j = json::parse(sim.out);
    const auto rep_j = json::parse(rep.out);
    CHECK(rep_j["estimates"] == sim_j);

    // corrupt one cell: level-0 prefix count != key comparisons
    std::ifstream in(csv);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const auto header_end = text.find("total_symbols");
    auto line_start = text.find('\n', text.find('\n', header_end) + 1) + 1;
    auto next_comma = line_start;
    for (int commas = 0; commas < 4; ++commas) next_comma = text.find(',', next_comma + 1);
    text.insert(next_comma + 1, "9");
    const std::string bad = temp_path("runs_bad.csv");
    std::ofstream out(bad, std::ios::binary);
    out << text;
    out.close();
    CHECK(run_cli({"report", "--in", bad}).exit_code == cli::kExitVerification);
}

TEST_CASE("report emits a deterministic plot") {
    const std::string csv = temp_path("runs_plot.csv");
    run_cli({"simulate", "--source", "memoryless:1/2,1/2", "--t", "9", "--runs", "60", "--seed",
             "6", "--depth", "1", "--out", csv});
    const std::string svg1 = temp_path("plot1.svg");
    const std::string svg2 = temp_path("plot2.svg");
    CHECK(run_cli({"report", "--in", csv, "--plot", svg1}).exit_code == cli::kExitOk);
    CHECK(run_cli({"report", "--in", csv, "--plot", svg2}).exit_code == cli::kExitOk);
    std::ifstream f1(svg1), f2(svg2);
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    CHECK(b1.str() == b2.str());
    CHECK(b1.str().find("<svg") == 0);
}

TEST_CASE("svg structure") {
    plot::PlotSpec empty;
    const auto svg = plot::render_svg(empty);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<path") == std::string::npos);  // axes only

    plot::PlotSpec one;
    one.series.push_back({"s", {0, 1, 2}, {1, 0, 2}});
    one.has_reference = true;
    one.reference_y = 0.5;
    const auto svg2 = plot::render_svg(one);
    size_t paths = 0, at = 0;
    while ((at = svg2.find("<path", at)) != std::string::npos) {
        ++paths;
        ++at;
    }
    CHECK(paths == 2);  // one series, one reference line
}

TEST_CASE("config file feeds defaults") {
    const std::string cfg = temp_path("cfg.json");
    {
        std::ofstream out(cfg);
        out << R"({"n": 4, "json": true})";
    }
    const auto res = run_cli({"exact-stats", "--config", cfg});
    CHECK(res.exit_code == cli::kExitOk);
    const auto j = json::parse(res.out);
    CHECK(j["kappa"] == "29/6");
}

TEST_CASE("check-distribution subcommand") {
    const auto res = run_cli({"check-distribution", "--w", "0", "--t", "10", "--runs", "400",
                              "--seed", "12"});
    CHECK(res.exit_code == cli::kExitOk);
    const auto j = json::parse(res.out);
    CHECK(j["passed"].get<bool>());
}

TEST_SUITE_END();
