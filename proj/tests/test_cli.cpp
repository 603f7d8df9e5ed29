#include <doctest.h>

#include "gbevolve/io.hpp"

#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gbevolve;
namespace fs = std::filesystem;

namespace {

struct Captured {
    int code;
    std::string out;
    std::string err;
};

Captured invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gbevolve");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out;
    std::ostringstream err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / ("gbevolve_cli_" + std::to_string(getpid()));
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = workdir() / name;
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_CASE("simulate the constant-drift preset") {
    const fs::path out = workdir() / "drift";
    const fs::path cfg = write_config("drift.json", R"({"alpha3": 1.0, "B": 0.5, "n": 32, "initial": "constant"})");
    const auto r = invoke({"simulate", "-c", cfg.string(), "-o", out.string(), "-q"});
    CHECK(r.code == 0);
    const Trajectory t = read_trajectory_csv(out / "trajectory.csv", make_grid(0.0, 6.283185307179586, 32));
    CHECK(t.final_time() == 1.0);
    for (double v : t.final_state().values()) CHECK(std::abs(v - 0.5) <= 1e-10);
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("hilbert-test prints the check table and passes") {
    const auto r = invoke({"hilbert-test"});
    CHECK(r.code == 0);
    CHECK(r.out.find("pi sin(x)") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify-estimates on a pure diffusion run") {
    const fs::path cfg = write_config("verify.json", R"({"B": 1.0, "kappa": 0.1, "n": 64, "t_end": 0.5,
        "scheme": "explicit_euler", "output_dir": ")" + (workdir() / "verify").string() + "\"}");
    const auto r = invoke({"verify-estimates", "-c", cfg.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("mass drift") != std::string::npos);
}

TEST_CASE("sweeps and twins write per-run outputs") {
    const std::string common = R"("alpha2": 0.05, "alpha3": 0.1, "n": 64, "t_end": 0.5, "snapshot_interval": 0.05,
        "image_terms": 8, )";
    const fs::path kcfg = write_config("k.json", "{" + common + R"("kappa": 0.2, "kappas": [0.2, 0.1], "output_dir": ")" +
                                                     (workdir() / "k").string() + "\"}");
    const auto k = invoke({"sweep-kappa", "-c", kcfg.string()});
    CHECK(k.code == 0);
    CHECK(fs::exists(workdir() / "k" / "member_00" / "trajectory.csv"));
    CHECK(fs::exists(workdir() / "k" / "member_01" / "report.json"));
    CHECK(fs::exists(workdir() / "k" / "sweep.json"));

    const fs::path tcfg = write_config("t.json", "{" + common + R"("output_dir": ")" + (workdir() / "t").string() + "\"}");
    const auto t = invoke({"twin-stability", "-c", tcfg.string()});
    CHECK(t.code == 0);
    CHECK(fs::exists(workdir() / "t" / "twin.csv"));
}

TEST_CASE("configuration problems exit with 2") {
    CHECK(invoke({"simulate", "-c", "/nonexistent/cfg.json"}).code == 2);
    const auto unknown = invoke({"simulate", "-c", write_config("bad.json", R"({"aplha1": 1})").string()});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("aplha1") != std::string::npos);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"simulate"}).code == 2);
    CHECK(invoke({"hilbert-test", "-n", "9"}).code == 2);
}

TEST_CASE("a failed check exits with 1") {
    // Three explicit steps cannot reach t_end: the run is cut short.
    const fs::path cfg = write_config("short.json", R"({"n": 32, "t_end": 1.0, "scheme": "explicit_euler",
        "max_steps": 3, "output_dir": ")" + (workdir() / "short").string() + "\"}");
    const auto r = invoke({"verify-estimates", "-c", cfg.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL") != std::string::npos);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("twin-stability without B is a configuration error") {
    const auto twin = invoke({"twin-stability", "-c", write_config("b0.json", R"({"B": 0.0})").string()});
    CHECK(twin.code == 2);
}
