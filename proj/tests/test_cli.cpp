#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "expression.hpp"
#include "scenario.hpp"

using namespace egrowth;
using namespace egrowth::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "egrowth_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "egrowth");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error(const std::string& text, const std::string& command) {
    try {
        (void)parse_scenario(text, command);
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "no error";
}

}  // namespace

TEST_CASE("expressions") {
    CHECK(Expression::parse("1 + 2*3")(0, 0) == 7.0);
    CHECK(Expression::parse("x*y + r2")(2, 3) == 19.0);
    CHECK(Expression::parse("-(x - 1) * 2")(4, 0) == -6.0);
    CHECK(Expression::parse("exp(2*r2)")(0.5, 0) == doctest::Approx(std::exp(0.5)));
    CHECK(Expression::parse("pow(besseli0(1), 2)")(0, 0) == doctest::Approx(1.266065877752008 * 1.266065877752008));
    CHECK(Expression::parse("1e-3 * x")(2, 0) == doctest::Approx(2e-3));
    try {
        (void)Expression::parse("1 + sin(x)");
        FAIL("expected an error");
    } catch (const ExpressionError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(Expression::parse("(x"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("x y"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
}

TEST_CASE("config diagnostics") {
    CHECK(config_error(R"({"grid": {"n": 64, "spacing": 1}})", "green") == "grid.spacing");
    CHECK(config_error(R"({"domain": {"shape": "square"}})", "green") == "domain.shape");
    CHECK(config_error(R"({"operator": {"kind": "beltrami"}})", "green") == "operator.lambda");
    CHECK(config_error(R"({"operator": {"kind": "beltrami", "lambda": "1 + "}})", "green") == "operator.lambda");
    CHECK(config_error(R"({"run": {"t_end": 1}})", "green") == "run");
    CHECK(config_error(R"({"command": "grow"})", "green") == "command");
    CHECK(config_error(R"({"balayage": {"atoms": [{"w": [0, 0], "mass": -1}]}})", "balayage") == "balayage.atoms[0].mass");
    CHECK(config_error("{\n  \"grid\": {\n    \"n\": 64,\n  }\n}", "green").rfind("line 4", 0) == 0);

    const ScenarioConfig c = parse_scenario(
        R"({"grid": {"origin": [-1, -1], "h": 0.02, "nx": 101, "ny": 51}, "source": {"w": [0.1, 0], "Q": 2}})", "green");
    CHECK(c.grid.spec().upper().x == doctest::Approx(1.0));
    CHECK(c.source.Q == 2.0);
    GridConfig g = c.grid;
    g.resample(201);
    CHECK(g.h == doctest::Approx(0.01));
    CHECK(g.ny == 101);
}

TEST_CASE("exit codes and artifacts") {
    const fs::path dir = scratch("green");
    std::string err;
    CHECK(run({"--help"}) == exit_ok);
    CHECK(run({"frobnicate"}) == exit_config);
    CHECK(run({"green", "--config", (dir / "missing.json").string()}, &err) == exit_config);
    CHECK(err.find("cannot open") != std::string::npos);
    CHECK(run({"green", "--config", write_config(dir, R"({"domian": {}})").string()}, &err) == exit_config);
    CHECK(err.find("domian") != std::string::npos);

    const std::string good = R"({"grid": {"n": 96}, "source": {"w": [0.2, 0.1]}, "probes": [[0, 0]]})";
    const std::string cfg = write_config(dir, good).string();
    REQUIRE(run({"green", "--config", cfg, "--out", (dir / "a").string(), "--quiet"}) == exit_ok);
    REQUIRE(run({"green", "--config", cfg, "--out", (dir / "b").string(), "--quiet"}) == exit_ok);
    for (const char* f : {"green.pgm", "mask.pgm", "boundary.csv", "probes.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["inputs"]["grid"]["n"] == 96);
    CHECK(manifest["artifacts"].size() == 4);

    const std::string near_edge = write_config(dir, R"({"grid": {"n": 96}, "source": {"w": [0.99, 0]}})").string();
    CHECK(run({"green", "--config", near_edge, "--out", (dir / "c").string(), "--quiet"}) == exit_solver);
    CHECK(nlohmann::json::parse(slurp(dir / "c" / "manifest.json"))["status"] == "solver_failure");
}

TEST_CASE("reproduce reports failing criteria with exit 3") {
    const fs::path dir = scratch("reproduce");
    CHECK(run({"reproduce", "--only", "12", "--grid-n", "128", "--out", (dir / "ok").string(), "--quiet"}) == exit_ok);
    CHECK(run({"reproduce", "--only", "3", "--grid-n", "128", "--out", (dir / "bad").string(), "--quiet"}) == exit_check);
    const std::string csv = slurp(dir / "bad" / "acceptance.csv");
    CHECK(csv.rfind("id,name,pass,seconds,detail\n3,", 0) == 0);
}
