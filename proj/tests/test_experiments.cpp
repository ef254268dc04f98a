#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "spinbath/cli.hpp"
#include "spinbath/experiments.hpp"

using namespace spinbath;
using namespace spinbath::experiments;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("spinbath_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("default configs exist for every experiment") {
    for (const char* name : {"fig1", "fig2_sweep", "twosite", "convergence", "regime_scan", "ri_trace"})
        REQUIRE(default_config(name)["experiment"] == name);
    REQUIRE_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("twosite experiment runs, passes and is deterministic") {
    const fs::path dir = fresh_dir("twosite");
    json cfg = default_config("twosite");
    cfg["t_final"] = 5.0;
    const RunResult first = run_experiment(cfg, dir.string());
    REQUIRE(first.exit_code == 0);
    REQUIRE(first.summary["pass"].get<bool>());
    REQUIRE(fs::exists(dir / "twosite.csv"));
    REQUIRE(fs::exists(dir / "summary.json"));

    const std::string csv = slurp(dir / "twosite.csv");
    REQUIRE(csv.rfind("t,X,Y,z1,z2,X_engine,Y_engine,z1_engine,z2_engine,max_dev", 0) == 0);

    // bit-identical rerun
    const fs::path dir2 = fresh_dir("twosite_rerun");
    run_experiment(cfg, dir2.string());
    REQUIRE(slurp(dir2 / "twosite.csv") == csv);
}

TEST_CASE("convergence experiment produces the expected schema") {
    const fs::path dir = fresh_dir("conv");
    json cfg = default_config("convergence");
    cfg["tau_list"] = json::array({0.1, 0.02, 0.005});
    const RunResult res = run_experiment(cfg, dir.string());
    REQUIRE(res.exit_code == 0);
    const std::string csv = slurp(dir / "convergence.csv");
    REQUIRE(csv.rfind("tau,error,slope_running", 0) == 0);
    REQUIRE(res.summary["checks"]["slope_at_least_half_order"].get<bool>());
    REQUIRE(res.summary["checks"]["fixed_v_does_not_converge"].get<bool>());
}

TEST_CASE("ri_trace experiment checks its interval invariants") {
    const fs::path dir = fresh_dir("ri");
    json cfg = default_config("ri_trace");
    cfg["steps"] = 30;
    const RunResult res = run_experiment(cfg, dir.string());
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.summary["checks"]["first_law_per_collision"].get<bool>());
    REQUIRE(res.summary["checks"]["entropy_balance"].get<bool>());
    const std::string csv = slurp(dir / "ri_trace.csv");
    REQUIRE(csv.rfind("t,Wdot,Qdot_L,Qdot_R,diS_dt,S,E_S", 0) == 0);
}

TEST_CASE("small fig2-style sweep hits both special points") {
    const fs::path dir = fresh_dir("fig2_small");
    json cfg = default_config("fig2_sweep");
    cfg["N"] = 3;
    cfg["h"] = json::array({0.0, 5.0, 2.0});
    cfg["hL_min"] = 1.0;
    cfg["hL_max"] = 4.0;
    cfg["hL_step"] = 0.5;
    const RunResult res = run_experiment(cfg, dir.string());
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.summary["checks"]["equilibrium_at_hL3"].get<bool>());
    REQUIRE(res.summary["checks"]["non_driven_at_hL2"].get<bool>());
    REQUIRE(res.summary["checks"]["rate_paths_agree"].get<bool>());
}

TEST_CASE("invalid configs exit with code 2") {
    const fs::path dir = fresh_dir("bad");
    json cfg = default_config("twosite");
    cfg["lambda"] = 0.0;
    REQUIRE(run_experiment(cfg, dir.string()).exit_code == 2);

    json cfg2 = default_config("convergence");
    cfg2["N"] = 0;
    REQUIRE(run_experiment(cfg2, dir.string()).exit_code == 2);

    json cfg3 = default_config("ri_trace");
    cfg3["tau"] = -1.0;
    REQUIRE(run_experiment(cfg3, dir.string()).exit_code == 2);

    json cfg4 = json{{"experiment", "mystery"}};
    REQUIRE(run_experiment(cfg4, dir.string()).exit_code == 2);
}

TEST_CASE("cli entry point") {
    SECTION("run with overrides") {
        const fs::path dir = fresh_dir("cli_run");
        const std::string out = dir.string();
        const char* argv[] = {"spinbath", "run", "-e", "twosite", "-o", out.c_str(),
                              "--override", "t_final=4.0"};
        REQUIRE(cli_main(8, argv) == 0);
        REQUIRE(fs::exists(dir / "summary.json"));
    }

    SECTION("missing experiment name is a usage error") {
        const char* argv[] = {"spinbath", "run"};
        REQUIRE(cli_main(2, argv) == 2);
    }

    SECTION("malformed override is a usage error") {
        const char* argv[] = {"spinbath", "run", "-e", "twosite", "--override", "oops"};
        REQUIRE(cli_main(6, argv) == 2);
    }

    SECTION("config file overrides defaults") {
        const fs::path dir = fresh_dir("cli_cfg");
        const fs::path cfg_path = dir / "cfg.json";
        {
            std::ofstream out(cfg_path);
            out << R"({"experiment": "twosite", "t_final": 3.0})";
        }
        const std::string out_dir = (dir / "out").string();
        const std::string cfg_str = cfg_path.string();
        const char* argv[] = {"spinbath", "run", "-e", "twosite", "-c", cfg_str.c_str(),
                              "-o", out_dir.c_str()};
        REQUIRE(cli_main(8, argv) == 0);
        const json summary = json::parse(slurp(fs::path(out_dir) / "summary.json"));
        REQUIRE(summary["pass"].get<bool>());
    }
}
