#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pe/scenario.hpp"

using namespace pe;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(PEGAME_FIXTURE_DIR) + "/" + name;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_file = "cli_out_" + std::to_string(counter++) + ".txt";
    std::string cmd =
        std::string(PEGAME_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return {code, ss.str()};
}

} // namespace

TEST_CASE("parse_scenario: valid fixtures load") {
    Scenario s = load_scenario(fixture("point_cost.json"));
    CHECK(s.dimension == 2);
    CHECK(s.params.size() == 1);
    CHECK(s.params[0].alpha == doctest::Approx(2.0));
    CHECK_FALSE(s.defense);
    CHECK(s.cost.kind == TerminalCost::Kind::PointDistance);

    Scenario d = load_scenario(fixture("defense_boundary.json"));
    CHECK(d.defense);
    CHECK(d.target.kind == TargetShape::Kind::Disk);
    CHECK(d.options.grid.empty());

    Scenario u = load_scenario(fixture("defense_union.json"));
    CHECK(u.options.grid == std::vector<int>{9, 9});
    REQUIRE(u.options.grid_min.has_value());
}

TEST_CASE("parse_scenario: validation errors carry field paths") {
    auto expect_error = [](const json& j, const std::string& needle) {
        try {
            parse_scenario(j);
            FAIL_CHECK("expected ValidationError for ", needle);
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    json base = {
        {"schema_version", 1},
        {"dimension", 2},
        {"evader", {0.0, 0.0}},
        {"pursuers",
         {{{"position", {1.0, 0.0}}, {"alpha", 2.0}, {"capture_radius", 0.0}}}},
        {"cost", {{"kind", "point-distance"}, {"anchor", {-1.0, 0.0}}}},
    };
    CHECK_NOTHROW(parse_scenario(base));

    json bad = base;
    bad["pursuers"][0]["alpha"] = 0.5;
    expect_error(bad, "pursuers[0].alpha");

    bad = base;
    bad["pursuers"][0].erase("position");
    expect_error(bad, "pursuers[0].position");

    bad = base;
    bad["evader"] = {0.0, 0.0, 0.0};
    expect_error(bad, "$.evader");

    bad = base;
    bad["target"] = {{"kind", "disk"}, {"center", {0.0, 0.0}}, {"radius", 1.0}};
    expect_error(bad, "exactly one of 'cost' and 'target'");

    bad = base;
    bad["cost"] = {{"kind", "mystery"}};
    expect_error(bad, "$.cost.kind");

    bad = base;
    bad["schema_version"] = 2;
    expect_error(bad, "schema_version");
}

TEST_CASE("shape JSON round-trips") {
    Vec a(2), b(2), c(2);
    a << 0, 0;
    b << 2, 0;
    c << 0, 2;
    auto shape = TargetShape::union_of({TargetShape::disk(Vec(Vec::Zero(2)), 1.5),
                                        TargetShape::box(Vec(-Vec::Ones(2)), Vec(Vec::Ones(2))),
                                        TargetShape::polygon({a, b, c})});

    json j = shape_to_json(shape);
    TargetShape back = shape_from_json(j, "$");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 200; ++k) {
        Vec x(2);
        x << u(rng), u(rng);
        REQUIRE(signed_distance(shape, x) == doctest::Approx(signed_distance(back, x)));
    }
}

TEST_CASE("cli: value command emits the expected value and exit codes") {
    auto r = run_cli("value " + fixture("point_cost.json"));
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(std::abs(j["value"].get<double>() - 9.0) < 1e-5);
    CHECK(j["optima"].size() >= 1);

    CHECK(run_cli("value " + fixture("malformed.json")).exit_code == 2);
    CHECK(run_cli("value " + fixture("invalid_alpha.json")).exit_code == 2);
    CHECK(run_cli("value " + fixture("terminal.json")).exit_code == 3);
    CHECK(run_cli("value /nonexistent.json").exit_code == 2);
}

TEST_CASE("cli: deterministic output under a fixed seed") {
    auto a = run_cli("value " + fixture("two_optima.json") + " --seed 7");
    auto b = run_cli("value " + fixture("two_optima.json") + " --seed 7");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("cli: simulate flee scenario captures near t = 1.5") {
    auto r = run_cli("simulate " + fixture("flee_capture.json") + " --evader-policy flee");
    REQUIRE(r.exit_code == 0);
    auto pos = r.output.find("# capture_time=");
    REQUIRE(pos != std::string::npos);
    double t = std::stod(r.output.substr(pos + 15));
    CHECK(std::abs(t - 1.5) <= 2e-3);
    CHECK(r.output.rfind("t,", 0) == 0); // CSV header first
}

TEST_CASE("cli: simulate optimal-vs-optimal payoff matches the value command") {
    auto rv = run_cli("value " + fixture("point_cost.json"));
    double value = json::parse(rv.output)["value"].get<double>();
    auto rs = run_cli("simulate " + fixture("point_cost.json") + " --evader-policy optimal");
    REQUIRE(rs.exit_code == 0);
    auto pos = rs.output.find("# payoff=");
    REQUIRE(pos != std::string::npos);
    double payoff = std::stod(rs.output.substr(pos + 9));
    CHECK(std::abs(payoff - value) <= 1e-2 * (1.0 + std::abs(value)) + 2e-2);
}

TEST_CASE("cli: sweep ordering and mode mismatch") {
    auto r = run_cli("sweep " + fixture("defense_union.json") + " --grid 5,5");
    REQUIRE(r.exit_code == 0);
    int rows = 0;
    std::stringstream ss(r.output);
    std::string line;
    bool saw_header = false;
    while (std::getline(ss, line)) {
        if (line.rfind("#", 0) == 0) continue;
        if (line.rfind("x,", 0) == 0) {
            saw_header = true;
            continue;
        }
        if (!line.empty()) ++rows;
    }
    CHECK(saw_header);
    CHECK(rows == 25);

    CHECK(run_cli("sweep " + fixture("point_cost.json")).exit_code == 2);
}

TEST_CASE("cli: verify reports named checks with zero failures") {
    auto r = run_cli("verify " + fixture("point_cost.json") + " --samples 20");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["fails_total"].get<int>() == 0);
    std::vector<std::string> names;
    for (const auto& c : j["checks"]) names.push_back(c["name"].get<std::string>());
    for (const char* expect : {"boundary_angle_gap", "region_shrinkage", "subsolution_samples",
                               "supersolution_equality", "pde_residual"})
        CHECK(std::find(names.begin(), names.end(), expect) != names.end());

    CHECK(run_cli("verify " + fixture("invalid_alpha.json")).exit_code == 2);
}

TEST_CASE("cli: oracle-compare passes on bundled scenarios, rejects n = 4") {
    auto r = run_cli("oracle-compare " + fixture("point_cost.json") + " --resolution 360");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["pass"].get<bool>());
    CHECK(j["max_discrepancy"].get<double>() <= j["bound"].get<double>());

    CHECK(run_cli("oracle-compare " + fixture("dim4.json")).exit_code == 4);
}
