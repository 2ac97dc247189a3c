#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <doctest.h>

#include "lelab/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path configs = LELAB_CONFIGS;

int run(const std::string& args)
{
    const std::string cmd = std::string("\"") + LELAB_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("lelab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes")
{
    const auto out = scratch("codes");
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("solve") == 2);
    CHECK(run("solve --domain " + (configs / "unit_interval.dom").string() + " --q 2.5 --out " + out.string()) == 2);
    CHECK(run("solve --domain /nonexistent.dom") == 2);
    CHECK(run("verify --out " + out.string()) == 2);
    CHECK(run("experiment nonsense --out " + out.string()) == 2);
    CHECK(run("cones --sweep-beta 0:1 --out " + out.string()) == 2);
    CHECK(run("cones --sweep-beta 0:0.9:4 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "cones.csv"));
}

TEST_CASE("solve writes a report")
{
    const auto out = scratch("solve");
    REQUIRE(run("solve --domain " + (configs / "unit_interval.dom").string() + " --level 6 --out " + out.string()) ==
            0);
    const auto j = lelab::Json::parse(lelab::read_text_file(out / "solve.json"));
    CHECK(j["q"] == 1.5);
    CHECK(j["lambda1"].get<double>() > 0.0);
    CHECK(j["residual"].get<double>() <= 1e-8);
    CHECK(fs::exists(out / "w.csv"));
}

TEST_CASE("spectrum of a union")
{
    const auto out = scratch("spectrum");
    REQUIRE(run("spectrum --domain " + (configs / "two_intervals.dom").string() + " --kmax 3 --out " +
                out.string()) == 0);
    CHECK(fs::exists(out / "spectrum.csv"));
    CHECK(fs::exists(out / "spectrum.json"));
}

TEST_CASE("verify is deterministic for a fixed seed")
{
    const auto a = scratch("verify_a"), b = scratch("verify_b");
    const std::string args = "verify --domain " + (configs / "two_intervals.dom").string() + " --level 5 --seed 7";
    const int first = run(args + " --out " + a.string());
    CHECK(first == 0);
    CHECK(run(args + " --out " + b.string()) == first);
    CHECK(lelab::read_text_file(a / "verify.json") == lelab::read_text_file(b / "verify.json"));
    const auto j = lelab::Json::parse(lelab::read_text_file(a / "verify.json"));
    CHECK(j["seed"] == 7);
    CHECK(j["checks"].size() >= 5);
}

}
