// cli.hpp — command-line front end: `run` executes a declarative experiment
// config; `--selftest` runs the built-in invariant suites without configs.

#pragma once

#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinbath/experiments.hpp"

namespace spinbath::experiments {

// ---------------------------------------------------------------- selftest

namespace detail {

inline Mat random_density(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cdouble(g(rng), g(rng));
    Mat rho = a * a.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

}  // namespace detail

inline int selftest(std::ostream& out) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };
    std::mt19937_64 rng(20240817);

    {  // kernel sanity: reconstruction and unitarity
        Mat a(48, 48);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int i = 0; i < 48; ++i)
            for (int j = 0; j < 48; ++j) a(i, j) = cdouble(g(rng), g(rng));
        const Mat h = hermitized(a);
        const EigResult e = herm_eig(h);
        Mat lam = Mat::zero(48, 48);
        for (int k = 0; k < 48; ++k) lam(k, k) = e.values[k];
        const double rec = (e.vectors * lam * e.vectors.adjoint() - h).fro_norm() / h.fro_norm();
        const Mat u = expm_unitary(h, 1.0);
        const double uni = (u * u.adjoint() - Mat::identity(48)).fro_norm();
        report("eigendecomposition", rec < 1e-10 && uni < 1e-12,
               "reconstruction " + fmt12(rec) + ", unitarity " + fmt12(uni));
    }
    {  // microscopic vs explicit dissipator across a parameter grid
        double worst = 0.0, worst_ratio = 0.0;
        for (double beta : {0.0, 0.5, 1.0, 2.5})
            for (double h : {-1.5, 0.3, 1.0, 2.0})
                for (double lambda : {0.4, 1.0, 1.7}) {
                    ChainSpec chain{2, {h, 0.7}, 0.9, 1.2};
                    const LindbladModel m =
                        make_boundary_driven_model(chain, {BathSpec{Side::left, beta, h, lambda}});
                    const Mat rho = detail::random_density(rng, 4);
                    worst = std::max(worst, (m.baths[0].micro.apply(rho) - m.baths[0].channels.apply(rho)).fro_norm());
                    const double gp = m.baths[0].channels.channels[0].gamma;
                    const double gm = m.baths[0].channels.channels[1].gamma;
                    const double expected = std::exp(-beta * h);
                    worst_ratio = std::max(worst_ratio, std::fabs(gp / gm - expected) / expected);
                }
        report("dissipator_equivalence", worst < 1e-12 && worst_ratio < 1e-12,
               "superoperator gap " + fmt12(worst) + ", detailed-balance ratio gap " + fmt12(worst_ratio));
    }
    {  // two-site closed form against the engine steady state
        TwoSiteParams p;
        p.beta_l = 0.5;
        p.beta_r = 2.0;
        const NessResult nr = ness(p.model());
        const ThermoRecord rates = lindblad_rates(p.model(), nr.rho);
        const TwoSiteNess closed = ness_closed_form(p);
        const double gap = std::max({std::fabs(rates.j_s - closed.j_s),
                                     std::fabs(rates.wdot() - closed.wdot),
                                     std::fabs(rates.dis_dt - closed.dis_dt)});
        report("twosite_closed_form", gap < 1e-10, "max observable gap " + fmt12(gap));
    }
    {  // collision-model first law and entropy split on random configurations
        double worst_fl = 0.0, worst_term = 0.0;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 20; ++k) {
            const int n = 1 + int(u(rng) * 3.0);
            ChainSpec chain{n, {}, u(rng) * 2.0 - 1.0, u(rng) * 2.0 - 1.0};
            for (int j = 0; j < n; ++j) chain.h.push_back(u(rng) * 4.0 - 2.0);
            RIConfig cfg;
            cfg.chain = chain;
            cfg.baths.push_back(BathSpec{Side::left, 3.0 * u(rng), u(rng) * 4.0 - 2.0, 0.1 + 2.0 * u(rng)});
            if (u(rng) < 0.6)
                cfg.baths.push_back(BathSpec{Side::right, 3.0 * u(rng), u(rng) * 4.0 - 2.0, 0.1 + 2.0 * u(rng)});
            cfg.tau = 0.02 + 0.4 * u(rng);
            const CollisionRecord rec = ri_step(detail::random_density(rng, chain.dim()), cfg);
            const double scale = std::max({1.0, std::fabs(rec.dw_l), std::fabs(rec.dq_l)});
            worst_fl = std::max(worst_fl, rec.first_law_residual / scale);
            worst_term = std::max(worst_term, std::max(-rec.d_term, -rec.i_term));
        }
        report("collision_first_law", worst_fl < 1e-10 && worst_term < 1e-10,
               "first-law residual " + fmt12(worst_fl) + ", entropy-term floor " + fmt12(worst_term));
    }
    {  // τ → 0 limit, coarse grid
        ChainSpec chain{2, {1.0, 1.0}, 1.0, 1.0};
        std::vector<BathSpec> baths = {BathSpec{Side::left, 0.5, 1.0, 1.0},
                                       BathSpec{Side::right, 2.0, 1.0, 1.0}};
        const ConvergenceStudy s =
            ri_lindblad_convergence(maximally_mixed(4), chain, baths, 1.0, {0.1, 0.02, 0.005});
        report("lindblad_limit", s.monotone && s.slope >= 0.45,
               "slope " + fmt12(s.slope) + (s.monotone ? ", monotone" : ", NOT monotone"));
    }
    out << (failures == 0 ? "selftest: all suites passed\n"
                          : "selftest: " + std::to_string(failures) + " suite(s) failed\n");
    return failures == 0 ? 0 : 3;
}

// ---------------------------------------------------------------- main

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"boundary-driven spin-chain thermodynamics toolkit"};
    bool selftest_flag = false;
    app.add_flag("--selftest", selftest_flag, "run the built-in invariant suites and exit");

    std::string experiment, config_path, out_dir = "out";
    std::vector<std::string> overrides;
    CLI::App* run = app.add_subcommand("run", "run an experiment and write CSV + summary JSON");
    run->add_option("-e,--experiment", experiment,
                    "one of: fig1, fig2_sweep, twosite, convergence, regime_scan, ri_trace")
        ->required();
    run->add_option("-c,--config", config_path, "JSON config file (embedded defaults when omitted)");
    run->add_option("-o,--out", out_dir, "output directory");
    run->add_option("--override", overrides, "key=value config overrides (value parsed as JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (selftest_flag) return selftest(std::cout);
    if (!run->parsed()) {
        std::cout << app.help();
        return 2;
    }

    json cfg;
    try {
        cfg = default_config(experiment);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config file " << config_path << "\n";
                return 2;
            }
            const json file_cfg = json::parse(in);
            if (file_cfg.contains("experiment") && file_cfg["experiment"] != experiment) {
                std::cerr << "error: config file names experiment " << file_cfg["experiment"]
                          << " but --experiment is " << experiment << "\n";
                return 2;
            }
            cfg.update(file_cfg);
        }
        for (const std::string& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "error: override must look like key=value: " << ov << "\n";
                return 2;
            }
            const std::string key = ov.substr(0, eq);
            const std::string value = ov.substr(eq + 1);
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::parse_error&) {
                parsed = value;  // plain string
            }
            cfg[key] = parsed;
        }
        cfg["experiment"] = experiment;
    } catch (const json::parse_error& e) {
        std::cerr << "error: bad config JSON: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const RunResult result = run_experiment(cfg, out_dir);
    if (result.summary.contains("error"))
        std::cerr << "error: " << result.summary["error"].get<std::string>() << "\n";
    if (result.summary.contains("checks"))
        for (const auto& [name, ok] : result.summary["checks"].items())
            std::cout << (ok.get<bool>() ? "[PASS] " : "[FAIL] ") << name << "\n";
    std::cout << "summary: " << out_dir << "/summary.json"
              << (result.exit_code == 0 ? " (pass)" : " (FAIL)") << "\n";
    return result.exit_code;
}

}  // namespace spinbath::experiments
