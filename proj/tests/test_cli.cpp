#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "leontief/cli.hpp"
#include "leontief/expectation.hpp"

using namespace leontief;
using namespace leontief::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "leontief");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Data rows of a CSV output (header comments and column line dropped).
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    bool header_seen = false;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream cs(line);
        for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string column_line(const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') return line;
    }
    return {};
}

RunConfig resolve(const std::string& yaml, Task task, std::vector<std::string> overrides = {}) {
    auto root = load_config_string(yaml);
    for (const auto& o : overrides) apply_override(root, o);
    return resolve_config(root, task);
}

Table figure(const std::string& id) { return run_figure(resolve("task: {figure: '" + id + "'}", Task::Figure)); }

// Polylines of a figure table keyed by series.
std::map<std::string, std::vector<Point>> series_points(const Table& t) {
    std::map<std::string, std::vector<Point>> out;
    const auto s = t.column("series"), x = t.column("x"), y = t.column("y");
    for (const auto& row : t.rows) {
        out[std::get<std::string>(row[s])].push_back({std::get<double>(row[x]), std::get<double>(row[y])});
    }
    return out;
}

const char* kResidual = R"(
technology:
  inputs: [w, c]
  requirements: [[1, 1], [0.6, 0.3]]
task:
  points: [[1, 0.8]]
  exogenous: [0.5]
)";

const char* kUniform = R"(
technology:
  inputs: [w, c]
  requirements: [[1, 1], [1, 1]]
demand:
  dependence: independent
task:
  points: [[1, 1]]
)";

}  // namespace

TEST_CASE("eval examples") {
    auto r = run({"eval", "--set", "technology.requirements=[[2, 5]]", "--set", "task.points=[[10, 10]]"});
    REQUIRE(r.code == 0);
    CHECK(column_line(r.out) == "w,c,output,model");
    CHECK(csv_rows(r.out).at(0) == std::vector<std::string>{"10", "10", "2", "leontief"});

    const auto residual = run_task(resolve(kResidual, Task::Eval));
    CHECK(std::get<double>(residual.rows.at(0).at(residual.column("output"))) == doctest::Approx(0.65).epsilon(1e-15));

    r = run({"eval", "--set", "ces={tfp: 1, share: 0.5, rho: 1, scale: 1}", "--set", "task.points=[[4, 4]]"});
    REQUIRE(r.code == 0);
    CHECK(csv_rows(r.out).at(0) == std::vector<std::string>{"4", "4", "4", "ces"});
}

TEST_CASE("expect with the closed form gives 0.5 exactly") {
    const auto t = run_task(resolve(kUniform, Task::Expect, {"task.method=closed_form"}));
    CHECK(std::get<double>(t.rows.at(0).at(t.column("expected"))) == 0.5);
    CHECK(std::get<std::string>(t.rows.at(0).at(t.column("method"))) == "closed_form");
}

TEST_CASE("expect output is byte-identical across runs and worker counts") {
    const std::string yaml = std::string(kUniform);
    const auto config = resolve(yaml, Task::Expect, {"task.method=mc", "task.n=200000", "seed=42"});
    std::ostringstream a, b, c;
    write_output(run_task(config, Execution{1}), config, a);
    write_output(run_task(config, Execution{1}), config, b);
    write_output(run_task(config, Execution{4}), config, c);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
    CHECK(a.str().find("\"seed\":42") != std::string::npos);
}

TEST_CASE("Monte Carlo and closed form agree on a 5x5 grid") {
    const std::vector<std::string> grid{"task.points=null", "task.grid={w: [0.5, 2.5], c: [0.5, 2.5], resolution: 5}",
                                        "technology.requirements=[[1, 1], [0.6, 0.3]]"};
    auto mc_over = grid;
    mc_over.insert(mc_over.end(), {"task.method=mc", "task.n=100000", "seed=7"});
    auto cf_over = grid;
    cf_over.push_back("task.method=closed_form");
    const auto mc = run_task(resolve(kUniform, Task::Expect, mc_over), Execution{4});
    const auto cf = run_task(resolve(kUniform, Task::Expect, cf_over));
    REQUIRE(mc.rows.size() == 25);
    REQUIRE(cf.rows.size() == 25);
    const auto e = mc.column("expected"), se = mc.column("std_error");
    double worst = 0.0, max_se = 0.0;
    for (std::size_t i = 0; i < 25; ++i) {
        worst = std::max(worst, std::abs(std::get<double>(mc.rows[i][e]) - std::get<double>(cf.rows[i][e])));
        max_se = std::max(max_se, std::get<double>(mc.rows[i][se]));
    }
    CHECK(worst <= 3 * max_se);
    // Row-major with w outer.
    CHECK(std::get<double>(cf.rows[1][cf.column("w")]) == 0.5);
    CHECK(std::get<double>(cf.rows[1][cf.column("c")]) == 1.0);
}

TEST_CASE("figure 2b kinks") {
    const auto lines = series_points(figure("2b"));
    REQUIRE(lines.size() == 2);
    CHECK(lines.at("level=1").at(1) == Point{1, 2});
    CHECK(lines.at("level=2").at(1) == Point{2, 4});
}

TEST_CASE("figure 3 shifts the kink by r2 * y2 exactly") {
    const auto lines = series_points(figure("3"));
    for (const char* level : {"level=1", "level=2"}) {
        const Point base = lines.at(std::string("y2=0 ") + level).at(1);
        const Point shifted = lines.at(std::string("y2=1 ") + level).at(1);
        CHECK(shifted == Point{base.w + 0.5 * 1.0, base.c + 0.25 * 1.0});
    }
}

TEST_CASE("figure 4b points sit on the closed-form level") {
    const auto t = figure("4b");
    const TechnologyMatrix tech({{1, 1}, {1, 0.2}});
    const auto z = t.column("z"), x = t.column("x"), y = t.column("y");
    REQUIRE_FALSE(t.rows.empty());
    for (const auto& row : t.rows) {
        const double in[] = {std::get<double>(row[x]), std::get<double>(row[y])};
        const double e = expected_output_closed_form(tech, in, ClampPolicy::Raw).value;
        CHECK(std::abs(e - std::get<double>(row[z])) <= 1e-6);
    }
}

TEST_CASE("every figure id runs and unknown ids are config errors") {
    for (const auto& id : figure_ids()) {
        const auto r = run({"figure", "--set", "task.figure=" + id});
        CHECK_MESSAGE(r.code == 0, id);
        CHECK(r.out.find("# params:") != std::string::npos);
    }
    const auto bad = run({"figure", "--set", "task.figure=6"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("task.figure") != std::string::npos);
}

TEST_CASE("rts classifications") {
    auto r = run({"rts", "--set", "technology.requirements=[[1, 2]]", "--set", "task.base=[1, 1]"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# classification: Constant") != std::string::npos);
    r = run({"rts", "--set", "technology.requirements=[[1, 1], [0.6, 0.3]]", "--set", "task.base=[1, 1]", "--set",
             "task.exogenous=[0.3]"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# classification: Increasing") != std::string::npos);
}

TEST_CASE("isoquant on the expected surface is convex on emitted points") {
    const auto config = resolve(kUniform, Task::Isoquant,
                                {"technology.requirements=[[1, 1], [1, 0.2]]", "task.levels=[1]", "task.angles=41"});
    const auto t = run_task(config);
    const auto w = t.column("w"), c = t.column("c");
    const TechnologyMatrix tech({{1, 1}, {1, 0.2}});
    REQUIRE(t.rows.size() > 10);
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < t.rows.size(); ++j) {
            const double mid[] = {0.5 * (std::get<double>(t.rows[i][w]) + std::get<double>(t.rows[j][w])),
                                  0.5 * (std::get<double>(t.rows[i][c]) + std::get<double>(t.rows[j][c]))};
            CHECK(expected_output_closed_form(tech, mid, ClampPolicy::Raw).value >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("config errors exit with code 2 and carry line numbers") {
    auto r = run({"eval", "--set", "technology.requirements=[[1, -1]]", "--set", "task.points=[[1, 1]]"});
    CHECK(r.code == 2);
    try {
        resolve("technology:\n  inputs: [w, c]\n  requirements: [[1, 1]]\n  colour: red\n", Task::Eval);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(e.field() == "technology.colour");
    }
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"eval", "--config", "/nonexistent/config.yaml"}).code == 2);
    CHECK(run({"expect", "--set", "technology.requirements=[[1, 1], [1, 1]]"}).code == 2);
    CHECK(run({"eval", "--set", "task.points=[[1, 1]]", "--format", "svg"}).code == 2);
}

TEST_CASE("overrides win over the file and the seed is always echoed") {
    const auto config = resolve(kUniform, Task::Expect, {"seed=99", "task.method=mc", "task.n=1000"});
    CHECK(config.seed == 99);
    CHECK(config.method == ExpectationMethod::MonteCarlo);
    CHECK(to_json(resolve(kUniform, Task::Expect))["seed"] == 0);
    const auto r = run({"expect", "--set", "technology.requirements=[[1, 1], [1, 1]]", "--set",
                        "demand={dependence: independent}", "--set", "task.points=[[1, 1]]", "--seed", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"seed\":5") != std::string::npos);
}

TEST_CASE("json output is the same records keyed by column") {
    const auto r = run({"eval", "--set", "technology.requirements=[[2, 5]]", "--set", "task.points=[[10, 10], [4, 5]]",
                        "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["records"].size() == 2);
    CHECK(doc["records"][0]["output"] == 2.0);
    CHECK(doc["records"][1]["output"] == 1.0);
    CHECK(doc["config"]["task"]["kind"] == "eval");
}

TEST_CASE("svg output draws one polyline per series") {
    const auto r = run({"figure", "--set", "task.figure=2b", "--format", "svg"});
    REQUIRE(r.code == 0);
    std::size_t count = 0;
    for (auto pos = r.out.find("<polyline"); pos != std::string::npos; pos = r.out.find("<polyline", pos + 1)) ++count;
    CHECK(count == 2);
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(19.0 / 30.0) == "0.6333333333333333");
    CHECK(std::stod(format_double(19.0 / 30.0)) == 19.0 / 30.0);
    CHECK(format_double(2.0) == "2");
}
