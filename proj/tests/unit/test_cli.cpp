#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cli.hpp"
#include "xol/severity.hpp"

using Catch::Approx;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = xol::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("xol_cli_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

fs::path pareto_csv(const fs::path& dir, std::size_t n, std::uint64_t seed) {
    const auto x = xol::sample(xol::SeverityModel::pareto(9, 8), n, seed);
    std::ostringstream s;
    s << "loss\n";
    s.precision(17);
    for (double v : x) s << v << '\n';
    const auto p = dir / "losses.csv";
    write_file(p, s.str());
    return p;
}

} // namespace

TEST_CASE("optimize reports the decreasing-rule optimum", "[cli]") {
    const auto r = run({"optimize", "--model", "pareto", "--alpha", "9", "--lambda", "8", "--rule", "decreasing",
                        "--delta", "0.5", "--p", "0.75", "--N", "100", "--measure", "var:0.75"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["d_star"].get<double>() == Approx(0.5472).margin(1e-3));
    CHECK(j["manifest"]["command"] == "optimize");
}

TEST_CASE("optimize exit codes", "[cli]") {
    const auto wang = run({"optimize", "--model", "pareto", "--alpha", "9", "--lambda", "8", "--rule", "decreasing",
                           "--delta", "0.5", "--N", "100", "--measure", "wang:0"});
    CHECK(wang.code == 2);
    CHECK(wang.out.find("NonpositivePhi") != std::string::npos);

    const auto sl = run({"optimize", "--rule", "sl", "--rho", "0.2", "--p", "0.75", "--model", "pareto", "--alpha", "9",
                         "--lambda", "8"});
    REQUIRE(sl.code == 0);
    CHECK(json::parse(sl.out)["d_star"].get<double>() == Approx(0.16372).margin(5e-6));

    CHECK(run({"optimize", "--rule", "decreasing", "--delta", "0.5"}).code == 64);
    CHECK(run({"optimize", "--model", "pareto", "--alpha", "9", "--lambda", "8", "--order", "7"}).code == 64);
    CHECK(run({"frobnicate"}).code == 64);
    CHECK(run({}).code == 64);
}

TEST_CASE("estimate on a Pareto sample", "[cli]") {
    const auto dir = scratch("estimate");
    const auto csv = pareto_csv(dir, 10000, 3);
    const auto r = run({"estimate", "--input", csv.string(), "--rule", "decreasing", "--delta", "0.5", "--p", "0.75"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const double d = j["d_hat"].get<double>();
    const double se = j["std_error"].get<double>();
    CHECK(std::abs(d - 0.5472) < 3.0 * se);
    CHECK(j["ci_lo"].get<double>() < d);
    CHECK(j["ci_hi"].get<double>() > d);
    CHECK(j["level"].get<double>() == 0.95);
    CHECK(j["warnings"].is_array());
    CHECK(j["manifest"]["input_digest"].is_string());
    fs::remove_all(dir);
}

TEST_CASE("estimate data errors exit 65 with the line", "[cli]") {
    const auto dir = scratch("parse");
    write_file(dir / "empty.csv", "");
    write_file(dir / "neg.csv", "loss\n1.0\n-2.0\n3.0\n");
    const auto empty = run({"estimate", "--input", (dir / "empty.csv").string()});
    CHECK(empty.code == 65);
    const auto neg = run({"estimate", "--input", (dir / "neg.csv").string()});
    CHECK(neg.code == 65);
    const auto j = json::parse(neg.out);
    CHECK(j["error"]["line"].get<int>() == 3);
    CHECK(run({"estimate", "--input", (dir / "missing.csv").string()}).code == 65);
    fs::remove_all(dir);
}

TEST_CASE("analyze writes summary, lorenz, density and curves", "[cli]") {
    const auto dir = scratch("analyze");
    write_file(dir / "eq.csv", "loss\n1\n1\n1\n");
    REQUIRE(run({"--out", (dir / "eq").string(), "analyze", "--input", (dir / "eq.csv").string()}).code == 0);
    const auto lorenz = read_csv(dir / "eq" / "lorenz.csv");
    REQUIRE(lorenz.size() == 5);
    for (std::size_t i = 1; i < lorenz.size(); ++i) CHECK(std::stod(lorenz[i][0]) == Approx(std::stod(lorenz[i][1])));
    CHECK(std::stod(lorenz[1][1]) == 0.0);
    CHECK(std::stod(lorenz.back()[1]) == 1.0);

    const auto out = dir / "standin";
    const auto r = run({"--out", out.string(), "--json", "analyze", "--input", XOL_STANDIN_CSV, "--sweep", "p",
                        "--fixed-rho", "0.005", "--steps", "8", "--svg"});
    REQUIRE(r.code == 0);
    const auto s = json::parse(slurp(out / "summary.json"));
    CHECK(s["count"].get<int>() == 10000);
    for (const char* f : {"density.csv", "curve.csv", "density.svg", "lorenz.svg", "curve.svg"}) CHECK(fs::exists(out / f));
    const auto curve = read_csv(out / "curve.csv");
    REQUIRE(curve.size() == 1 + 3 * 8);
    CHECK(curve[0][0] == "rule");
    for (std::size_t i = 2; i < curve.size(); ++i) {
        INFO(curve[i][0] << " " << curve[i][1] << " " << curve[i].back());
        CHECK(curve[i].back() == "ok");
        if (curve[i][0] == curve[i - 1][0]) CHECK(std::stod(curve[i][3]) <= std::stod(curve[i - 1][3]));
    }
    fs::remove_all(dir);
}

TEST_CASE("simulate table1 restricted to one rule", "[cli]") {
    const auto dir = scratch("table1");
    const auto r = run({"--out", dir.string(), "simulate", "table1", "--only", "decreasing", "--B", "2000"});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "table1.csv");
    CHECK(rows.size() == 1 + 3);
    CHECK(rows[0] == std::vector<std::string>{"rule", "rule_value", "N", "approx_order", "d_actual", "d_approx", "diff_pct"});
    const auto m = json::parse(slurp(dir / "table1.manifest.json"));
    CHECK(m["seed"].get<std::uint64_t>() == 20240917);
    fs::remove_all(dir);
}

TEST_CASE("same seed gives byte-identical outputs", "[cli]") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run({"--seed", "42", "--out", d.string(), "simulate", "insolvency", "--N", "3", "--B", "2000",
                     "--turning-points"})
                    .code == 0);
        REQUIRE(run({"--seed", "42", "--out", d.string(), "simulate", "table2", "--M", "100", "--sizes", "500",
                     "--only", "decreasing"})
                    .code == 0);
    }
    for (const char* f : {"insolvency.csv", "turning_points.csv", "table2.csv"}) {
        INFO(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(!slurp(a / f).empty());
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("selfcheck command", "[cli]") {
    const auto text = run({"selfcheck"});
    CHECK(text.code == 0);
    CHECK(text.out.find("PASS normal_quantile") != std::string::npos);
    const auto j = run({"--json", "selfcheck"});
    REQUIRE(j.code == 0);
    const auto report = json::parse(j.out);
    CHECK(report["passed"].get<bool>());
    CHECK(report["checks"].size() >= 6);
}
