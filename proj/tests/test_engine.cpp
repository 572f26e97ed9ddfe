#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <variant>

#include <json.hpp>

#include "projlab/engine.hpp"
#include "projlab/errors.hpp"
#include "projlab/serialize.hpp"

using namespace projlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() /
                         ("projlab-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "missing file " << p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json coordinate_generator(std::initializer_list<int> idx) {
    json proj;
    proj["kind"] = "coordinate";
    proj["index_set"] = json::array();
    for (int i : idx) proj["index_set"].push_back(i);
    json gen;
    gen["projection"] = proj;
    return gen;
}

json matrix_generator(const ComplexMatrix& m) {
    json gen;
    gen["matrix"] = to_json(m);
    return gen;
}

json l2_config(const fs::path& out, std::size_t dim = 2) {
    json cfg;
    cfg["space"] = json{{"dim", dim}, {"p", 2.0}};
    cfg["seed"] = 0;
    cfg["output"] = out.string();
    cfg["generators"] = json::array();
    cfg["expressions"] = json::array();
    cfg["checks"] = json::array();
    return cfg;
}

json check(const std::string& name, json params) {
    return json{{"name", name}, {"params", std::move(params)}};
}

// T = P1 P2 on l^inf(2): the alternating product with amplitude 2.
const ComplexMatrix kAlternating{{0.0, 1.0}, {0.0, -1.0}};

int cli_exit(const std::string& args) {
    const char* cli = std::getenv("PROJLAB_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "PROJLAB_CLI not set (run under ctest)");
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("config JSON parses, dumps, and round-trips") {
    json cfg = l2_config("somewhere");
    cfg["seed"] = 7;
    cfg["generators"].push_back(coordinate_generator({0}));
    cfg["generators"].push_back(matrix_generator(kAlternating));
    cfg["expressions"].push_back(
        to_json(SemigroupExpr::product({SemigroupExpr::leaf(1), SemigroupExpr::leaf(2)})));
    cfg["checks"].push_back(check("iterate", json{{"generator", 1}}));

    const RunConfig parsed = config_from_json(cfg);
    CHECK(parsed.space.dim == 2);
    CHECK(parsed.space.p == 2.0);
    CHECK(parsed.seed == 7);
    CHECK(parsed.output == "somewhere");
    REQUIRE(parsed.generators.size() == 2);
    CHECK(std::holds_alternative<ProjectionSpec>(parsed.generators[0]));
    CHECK(std::holds_alternative<ComplexMatrix>(parsed.generators[1]));
    CHECK(parsed.expressions.size() == 1);
    REQUIRE(parsed.checks.size() == 1);
    CHECK(parsed.checks[0].name == "iterate");

    // Dump -> parse -> dump is the identity on the wire format.
    const json once = to_json(parsed);
    CHECK(to_json(config_from_json(once)) == once);
}

TEST_CASE("config parse rejections") {
    CHECK_THROWS_AS(config_from_json(json::array()), input_error);
    CHECK_THROWS_AS(config_from_json(json{{"seed", 0}}), input_error);

    json neg = l2_config("x");
    neg["seed"] = -3;
    CHECK_THROWS_AS(config_from_json(neg), input_error);

    json badgen = l2_config("x");
    badgen["generators"].push_back(json::object());
    CHECK_THROWS_AS(config_from_json(badgen), input_error);

    json noname = l2_config("x");
    noname["checks"].push_back(json{{"params", json::object()}});
    CHECK_THROWS_AS(config_from_json(noname), input_error);

    json badparams = l2_config("x");
    badparams["checks"].push_back(json{{"name", "iterate"}, {"params", 3}});
    CHECK_THROWS_AS(config_from_json(badparams), input_error);
}

TEST_CASE("run(): reports on disk and exit codes") {
    const fs::path dir = fresh_dir("run");

    json ok = l2_config(dir / "ok");
    ok["generators"].push_back(coordinate_generator({0}));
    ok["checks"].push_back(check("orthoprojection", json{{"generator", 1}}));
    CHECK(run(config_from_json(ok)) == 0);
    const json rep = json::parse(slurp(dir / "ok" / "check-01-orthoprojection.json"));
    CHECK(rep.at("check") == "orthoprojection");
    CHECK(rep.at("ordinal") == 1);
    REQUIRE(rep.at("results").size() == 1);
    CHECK(rep.at("results")[0].at("verdict") == "pass");
    const std::string csv = slurp(dir / "ok" / "summary.csv");
    CHECK(csv.rfind("check,instance,verdict,lhs,rhs,slack,runtime_ms\n", 0) == 0);

    // A failing check flips the exit code to 1 but still writes everything.
    json bad = l2_config(dir / "bad");
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cxd{0.5, 0.0};
    bad["generators"].push_back(matrix_generator(half));
    bad["checks"].push_back(check("orthoprojection", json{{"generator", 1}}));
    CHECK(run(config_from_json(bad)) == 1);
    const json failed = json::parse(slurp(dir / "bad" / "check-01-orthoprojection.json"));
    CHECK(failed.at("results")[0].at("verdict") == "fail");

    // No checks at all: header-only summary, exit 0.
    CHECK(run(config_from_json(l2_config(dir / "empty"))) == 0);
    CHECK(slurp(dir / "empty" / "summary.csv") ==
          "check,instance,verdict,lhs,rhs,slack,runtime_ms\n");

    fs::remove_all(dir);
}

TEST_CASE("run(): vacuous rows and handler errors are data, not crashes") {
    const fs::path dir = fresh_dir("verdicts");

    // Amplitude 2 admits no decay bound: vacuous, exit stays 0.
    json vac = l2_config(dir / "vac");
    vac["space"] = json{{"dim", 2}, {"p", "inf"}};
    vac["generators"].push_back(matrix_generator(kAlternating));
    vac["checks"].push_back(check("decay-bound", json{{"generator", 1}, {"n_max", 64}}));
    CHECK(run(config_from_json(vac)) == 0);
    CHECK(json::parse(slurp(dir / "vac" / "check-01-decay-bound.json"))
              .at("results")[0]
              .at("verdict") == "vacuous");

    // A handler that throws on its data (amplitude-omega needs norm one)
    // becomes a fail row with the message preserved, not a config error.
    json thrower = l2_config(dir / "throw");
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cxd{0.5, 0.0};
    thrower["generators"].push_back(matrix_generator(half));
    thrower["checks"].push_back(check("amplitude-omega", json{{"generator", 1}}));
    CHECK(run(config_from_json(thrower)) == 1);
    const json doc = json::parse(slurp(dir / "throw" / "check-01-amplitude-omega.json"));
    CHECK(doc.at("results")[0].at("verdict") == "fail");
    CHECK(doc.at("detail").contains("error"));

    fs::remove_all(dir);
}

TEST_CASE("run(): structural problems throw before any check executes") {
    const fs::path dir = fresh_dir("structural");
    json cfg = l2_config(dir / "never");
    cfg["generators"].push_back(coordinate_generator({0}));

    json unknown = cfg;
    unknown["checks"].push_back(check("no-such-check", json::object()));
    CHECK_THROWS_AS(run(config_from_json(unknown)), input_error);

    json dangling = cfg;
    dangling["checks"].push_back(check("orthoprojection", json{{"generator", 5}}));
    CHECK_THROWS_AS(run(config_from_json(dangling)), input_error);

    json no_operand = cfg;
    no_operand["checks"].push_back(check("orthoprojection", json::object()));
    CHECK_THROWS_AS(run(config_from_json(no_operand)), input_error);

    json wrong_shape = cfg;
    wrong_shape["generators"].push_back(matrix_generator(ComplexMatrix::identity(3)));
    CHECK_THROWS_AS(run(config_from_json(wrong_shape)), input_error);

    json bad_expr = cfg;
    bad_expr["expressions"].push_back(to_json(SemigroupExpr::leaf(4)));
    CHECK_THROWS_AS(run(config_from_json(bad_expr)), input_error);

    CHECK(fs::exists(dir / "never") == false);
    fs::remove_all(dir);
}

TEST_CASE("run(): unwritable output directory reports I/O failure") {
    const fs::path dir = fresh_dir("io");
    std::ofstream(dir / "blocker") << "in the way\n";
    json cfg = l2_config(dir / "blocker" / "out");
    cfg["generators"].push_back(coordinate_generator({0}));
    cfg["checks"].push_back(check("orthoprojection", json{{"generator", 1}}));
    CHECK(run(config_from_json(cfg)) == 3);
    fs::remove_all(dir);
}

TEST_CASE("CLI: exit codes for run, scenario, and usage errors") {
    const fs::path dir = fresh_dir("cli");

    json ok = l2_config(dir / "out");
    ok["generators"].push_back(coordinate_generator({0}));
    ok["checks"].push_back(check("orthoprojection", json{{"generator", 1}}));
    std::ofstream(dir / "ok.json") << ok.dump(2);
    CHECK(cli_exit("run " + (dir / "ok.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "summary.csv"));

    std::ofstream(dir / "mangled.json") << "{ this is not json";
    CHECK(cli_exit("run " + (dir / "mangled.json").string()) == 2);

    CHECK(cli_exit("run " + (dir / "no-such-file.json").string()) == 3);

    json unknown = ok;
    unknown["output"] = (dir / "out2").string();
    unknown["checks"][0]["name"] = "no-such-check";
    std::ofstream(dir / "unknown.json") << unknown.dump(2);
    CHECK(cli_exit("run " + (dir / "unknown.json").string()) == 2);

    json failing = ok;
    failing["output"] = (dir / "out3").string();
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cxd{0.5, 0.0};
    failing["generators"][0] = matrix_generator(half);
    std::ofstream(dir / "failing.json") << failing.dump(2);
    CHECK(cli_exit("run " + (dir / "failing.json").string()) == 1);

    CHECK(cli_exit("scenario no-such-scenario") == 2);
    CHECK(cli_exit("") == 2);          // a subcommand is required
    CHECK(cli_exit("--help") == 0);

    fs::remove_all(dir);
}

TEST_CASE("CLI: same-seed scenario reruns are byte-identical") {
    const fs::path dir = fresh_dir("determinism");
    const std::string a = (dir / "a").string();
    const std::string b = (dir / "b").string();
    CHECK(cli_exit("scenario counterexample --seed 0 --out " + a) == 0);
    CHECK(cli_exit("scenario counterexample --seed 0 --out " + b) == 0);
    CHECK(fs::exists(dir / "a" / "config.json"));

    std::map<std::string, std::string> reports;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("check-", 0) == 0) reports[name] = slurp(entry.path());
    }
    CHECK(reports.size() >= 5); // the scenario exercises several checks
    for (const auto& [name, bytes] : reports) {
        CHECK_MESSAGE(slurp(dir / "b" / name) == bytes, name << " differs between runs");
    }
    fs::remove_all(dir);
}
