#include "vwak/cli.hpp"
#include "vwak/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vwak;
namespace fs = std::filesystem;

namespace {

const std::string kCantor = std::string(VWAK_DATA_DIR) + "/cantor.json";

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "vwak_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("config loading")
{
    CHECK(load_config(kCantor).size() == 2);
    CHECK_THROWS_AS(load_config("/nonexistent/ifs.json"), ConfigError);
    CHECK_THROWS_AS(parse_ifs(Json::parse(R"({"maps":[{"c":"3/2","b":"0"}]})")), ConfigError);
    CHECK_THROWS_AS(parse_ifs(Json::parse(R"({"maps":[{"c":"1/3"}]})")), ConfigError);
    CHECK_THROWS_AS(parse_ifs(Json::parse(R"([])")), ConfigError);
    try {
        parse_ifs(Json::parse(R"({"maps":[{"c":"1/3","b":"0"},{"c":"x","b":"0"}]})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "maps[1].c");
    }
    CHECK(parse_exponent("v", "5/4", true) == Rational(5, 4));
    CHECK_THROWS_AS(parse_exponent("v", "1", true), ConfigError);
    CHECK(parse_range("m", "6..14").last == 14);
    CHECK(parse_range("m", "7").first == 7);
    CHECK_THROWS_AS(parse_range("m", "9..3"), ConfigError);
    CHECK_THROWS_AS(parse_range("m", "a..3"), ConfigError);
}

TEST_CASE("dim prints s")
{
    const Run r = run({"dim", "--ifs", kCantor});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "0.630929753571\n");
}

TEST_CASE("bad configs exit 3")
{
    const fs::path bad = scratch("bad.json");
    std::ofstream(bad) << R"({"maps":[{"c":"3/2","b":"0"}]})";
    CHECK(run({"dim", "--ifs", bad.string()}).code == kExitConfig);
    CHECK(run({"dim"}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
    CHECK(run({"cantor", "build", "--ifs", kCantor, "--v", "1"}).code == kExitConfig);
    CHECK(run({"covers", "--ifs", kCantor, "--m", "0..2"}).code == kExitConfig);
}

TEST_CASE("hull and osc")
{
    CHECK(run({"hull", "--ifs", kCantor}).out == "[0/1, 1/1]\n");
    CHECK(run({"osc", "--ifs", kCantor}).code == kExitOk);
    const fs::path overlap = scratch("overlap.json");
    std::ofstream(overlap) << R"({"maps":[{"c":"2/3","b":"0"},{"c":"2/3","b":"1/3"}]})";
    const Run r = run({"osc", "--ifs", overlap.string()});
    CHECK(r.code == kExitViolation);
    CHECK(r.err.find("OpenSetCondition") != std::string::npos);
}

TEST_CASE("hit exit codes")
{
    CHECK(run({"hit", "--ifs", kCantor, "--interval", "0,1/9"}).code == kExitOk);
    CHECK(run({"hit", "--ifs", kCantor, "--interval", "2/5,3/5"}).code == kExitOk);
    CHECK(run({"hit", "--ifs", kCantor, "--interval", "1/4,1/4", "--depth", "5"}).code == kExitUndecided);
}

TEST_CASE("covers far from the hull")
{
    const Run r = run({"covers", "--ifs", kCantor, "--v", "3/2", "--m", "3..4", "--window", "10,11"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("m,count_all,count_hits,count_undecided,log2_radius_hi\n", 0) == 0);
}

TEST_CASE("cantor build starves at huge v")
{
    const Run r = run({"cantor", "build", "--ifs", kCantor, "--v", "10", "--m0", "3", "--depth", "2"});
    CHECK(r.code == kExitViolation);
    CHECK(r.err.find("ZeroChildren") != std::string::npos);
}

TEST_CASE("build, verify, mass and frostman pipeline")
{
    const fs::path tree = scratch("tree.json");
    REQUIRE(run({"cantor", "build", "--ifs", kCantor, "--v", "5/4", "--u", "2", "--m0", "3", "--depth", "2", "--out",
                 tree.string()})
                .code == kExitOk);
    const fs::path again = scratch("tree_again.json");
    REQUIRE(run({"cantor", "build", "--ifs", kCantor, "--v", "5/4", "--depth", "2", "--workers", "3", "--out",
                 again.string()})
                .code == kExitOk);
    CHECK(slurp(tree) == slurp(again));
    CHECK(run({"cantor", "verify", "--tree", tree.string()}).code == kExitOk);
    const Run mass = run({"mass", "--tree", tree.string()});
    CHECK(mass.code == kExitOk);
    CHECK(Json::parse(mass.out).at("level_totals") == Json::array({"1/1", "1/1", "1/1"}));
    CHECK(run({"frostman", "--tree", tree.string(), "--t", "0.05"}).code == kExitOk);
    const Run fail = run({"frostman", "--tree", tree.string(), "--t", "1", "--scales", "12..20"});
    CHECK(fail.code == kExitViolation);
    CHECK(fail.err.find("FrostmanBound") != std::string::npos);
    CHECK(Json::parse(fail.out).at("pass") == false);
    CHECK(run({"mass", "--tree", scratch("missing.json").string()}).code == kExitConfig);
}
