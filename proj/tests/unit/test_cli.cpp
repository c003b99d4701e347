#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracheat/cli.hpp"
#include "fracheat/expr.hpp"

using namespace fracheat;
using nlohmann::json;
namespace fs = std::filesystem;

static int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "fracheat");
    std::vector<char *> argv;
    for (auto &a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

static std::string slurp(const fs::path &p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

static std::string write_config(const std::string &name, const json &j)
{
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << j.dump();
    return p.string();
}

TEST_CASE("expression grammar")
{
    const double x[2] = {0.5, -2.0};
    CHECK(parse_expression("1 + 2*3", 1)(x, 0) == 7.0);
    CHECK(parse_expression("2^3^2", 1)(x, 0) == 512.0);
    CHECK(parse_expression("-2^2", 1)(x, 0) == -4.0);
    CHECK(parse_expression("(1+2)*t", 1)(x, 2.0) == 6.0);
    CHECK(parse_expression("x1 + x2", 2)(x, 0) == -1.5);
    CHECK(parse_expression("x", 1)(x, 0) == 0.5);
    CHECK(parse_expression("r^2", 2)(x, 0) == doctest::Approx(4.25));
    CHECK(parse_expression("cos(pi)", 1)(x, 0) == doctest::Approx(-1.0));
    CHECK(parse_expression("step(t) + step(-t)", 1)(x, 0) == 2.0);
    CHECK(parse_expression("bump(x1)", 1)(x, 0) == doctest::Approx(std::exp(-1.0 / 0.75)));
    CHECK(parse_expression("bump(2)", 1)(x, 0) == 0.0);
    CHECK(parse_expression("1e-3*exp(0)", 1)(x, 0) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_expression("x3", 2), Error);
    CHECK_THROWS_AS(parse_expression("sin(t", 1), Error);
    CHECK_THROWS_AS(parse_expression("foo(t)", 1), Error);
    CHECK_THROWS_AS(parse_expression("1 +", 1), Error);
}

TEST_CASE("presets resolve and user keys override them")
{
    for (const char *p : {"example_8_1", "remark_r00", "plane_wave", "gaussian_bump"}) CHECK_NOTHROW(build_problem({{"preset", p}}));
    const json c = resolve_config({{"preset", "example_8_1"}, {"nt", 64}});
    CHECK(c.at("nt") == 64);
    CHECK(c.at("theta") == 0.5);
    const ProblemSpec ps = build_problem({{"preset", "example_8_1"}});
    CHECK(static_cast<bool>(ps.exact));
    CHECK(ps.problem.f.time.M == 2048);
    CHECK_FALSE(build_problem({{"preset", "remark_r00"}}).problem.strict);
}

TEST_CASE("config hash is stable and key-order independent")
{
    const json a = json::parse(R"({"theta":0.5,"alpha":0.5})");
    const json b = json::parse(R"({"alpha":0.5,"theta":0.5})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(json::parse(R"({"theta":0.6,"alpha":0.5})")));
}

TEST_CASE("exit codes")
{
    const fs::path out = fs::temp_directory_path() / "fracheat_cli_exit";
    CHECK(run({"--out", out.string(), "solve", "/nonexistent/config.json"}) == 2);
    CHECK(run({"--out", out.string(), "solve", "--preset", "nope"}) == 2);
    CHECK(run({"--bogus"}) == 2);

    json bad = preset_config("plane_wave");
    bad["theta"] = 2.0;
    CHECK(run({"--out", out.string(), "solve", write_config("fh_bad.json", bad)}) == 2);

    json incompatible = preset_config("plane_wave");
    incompatible["f"] = "1";
    incompatible["nt"] = 64;
    const std::string inc = write_config("fh_inc.json", incompatible);
    CHECK(run({"--out", out.string(), "--strict", "solve", inc}) == 3);
    CHECK(run({"--out", out.string(), "--strict", "check", inc}) == 3);
    CHECK(run({"--out", out.string(), "--lax", "solve", inc}) == 0);
    fs::remove_all(out);
}

TEST_CASE("solve writes artifacts listed in the manifest")
{
    const fs::path out = fs::temp_directory_path() / "fracheat_cli_solve";
    fs::remove_all(out);
    json c = preset_config("example_8_1");
    c["nt"] = 256;
    REQUIRE(run({"--out", out.string(), "solve", write_config("fh_ex.json", c)}) == 0);
    const json rep = json::parse(slurp(out / "report.json"));
    CHECK(rep.at("rel_err").get<double>() <= 1e-3);
    const json man = json::parse(slurp(out / "manifest.json"));
    CHECK(man.at("command") == "solve");
    CHECK(man.at("config_hash") == config_hash(man.at("config")));
    for (const auto &a : man.at("artifacts")) CHECK(fs::exists(a.get<std::string>()));
    CHECK(man.at("artifacts").size() == 3);
    const std::string u = slurp(out / "u.csv");
    CHECK(u.find("config.hash") != std::string::npos);
    CHECK(u.find("units") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("solver output is byte-identical across runs and thread counts")
{
    const fs::path a = fs::temp_directory_path() / "fracheat_det_a";
    const fs::path b = fs::temp_directory_path() / "fracheat_det_b";
    json c = preset_config("gaussian_bump");
    c["nt"] = 64;
    const std::string path = write_config("fh_det.json", c);
    REQUIRE(run({"--threads", "1", "--out", a.string(), "solve", path}) == 0);
    REQUIRE(run({"--threads", "4", "--out", b.string(), "solve", path}) == 0);
    CHECK(slurp(a / "u.csv") == slurp(b / "u.csv"));
    CHECK(slurp(a / "residual.csv") == slurp(b / "residual.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("other subcommands run")
{
    const fs::path out = fs::temp_directory_path() / "fracheat_cli_misc";
    fs::remove_all(out);
    CHECK(run({"--out", out.string(), "mollify-demo", "--alpha", "0.5", "--nt", "512"}) == 0);
    CHECK(fs::exists(out / "blowup.csv"));
    CHECK(run({"--out", out.string(), "multiplier", "--preset", "plane_wave", "--checks", "partition", "dilation"}) == 0);
    const json m = json::parse(slurp(out / "multiplier.json"));
    CHECK(m.at("partition_deviation").get<double>() <= 1e-14);

    json lift = preset_config("plane_wave");
    lift["theta"] = 1.6;
    lift["alpha"] = 0.3;
    lift["f"] = "0";
    lift["nt"] = 128;
    lift["traces"] = {"cos(x1)", "0"};
    CHECK(run({"--out", out.string(), "lift", write_config("fh_lift.json", lift)}) == 0);
    const json l = json::parse(slurp(out / "lift.json"));
    CHECK(l.at("path") == "direct");

    json conv = preset_config("example_8_1");
    conv["nt"] = 64;
    conv["nx"] = {8};
    CHECK(run({"--out", out.string(), "convergence", write_config("fh_conv.json", conv), "--levels", "3", "--refine", "t"}) == 0);
    CHECK(fs::exists(out / "convergence.csv"));
    CHECK(run({"--out", out.string(), "seminorm", "--l", "0.5", "--axis", "x9", "missing.csv"}) == 2);
    CHECK(run({"--out", out.string(), "fract", "t^2", "--theta", "0.5", "--nt", "256"}) == 0);
    CHECK(run({"--out", out.string(), "fract", "x^2", "--theta", "0.5"}) == 2);
    CHECK(run({"--out", out.string(), "fract", "t", "--theta", "1.5", "--op", "rl"}) == 2);
    CHECK(run({"--out", out.string(), "fract", "t", "--theta", "1", "--op", "caputo"}) == 3);
    fs::remove_all(out);
}
