// Acceptance suite: end-to-end criteria with pinned tolerances and runtime
// budgets. Prints one PASS/FAIL line per criterion; exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "spinbath/cli.hpp"
#include "spinbath/experiments.hpp"
#include "spinbath/repeated_interaction.hpp"
#include "spinbath/thermo.hpp"
#include "spinbath/twosite.hpp"

using namespace spinbath;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void criterion(int id, const char* label, double budget_s, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = elapsed < budget_s;
    const bool ok = o.pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %d: %s  (%.2fs of %gs)%s%s\n", ok ? "PASS" : "FAIL", id, label,
                elapsed, budget_s, o.detail.empty() ? "" : " — ", o.detail.c_str());
    std::fflush(stdout);
}

fs::path out_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("spinbath_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Mat seeded_density(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cdouble(g(rng), g(rng));
    Mat rho = a * a.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

std::string fmt(double x) { return experiments::fmt12(x); }

// --------------------------------------------------------------- criteria

Outcome two_site_quantitative() {
    TwoSiteParams p;  // λ=1, J=1, h_L=h_R=1
    p.beta_l = 0.5;
    p.beta_r = 2.0;
    // frozen oracle values from the closed forms: j_s = (M_R − M_L)/2 with
    // M_r = −tanh(β_r h_r / 2)
    const double js_expected = -0.2583377467760279;
    const double dis_expected = 0.3875066201640419;

    const LindbladModel model = p.model();
    const NessResult nr = ness(model);
    const ThermoRecord rates = lindblad_rates(model, nr.rho);

    const double gap = std::max({std::fabs(rates.j_s - js_expected),
                                 std::fabs(rates.qdot_l + js_expected),
                                 std::fabs(rates.wdot()),
                                 std::fabs(rates.dis_dt - dis_expected)});
    Outcome o;
    o.pass = gap < 1e-8;
    o.detail = "j_s=" + fmt(rates.j_s) + ", diS/dt=" + fmt(rates.dis_dt) + ", max gap " + fmt(gap);
    return o;
}

Outcome oracle_equivalence() {
    TwoSiteParams p;
    p.beta_l = 0.5;
    p.beta_r = 2.0;
    p.h_l = 1.5;
    p.h_r = 0.7;
    auto rng = std::mt19937_64(1234);
    const OracleComparison cmp = oracle_vs_engine(p, seeded_density(rng, 4), 20.0);
    Outcome o;
    o.pass = cmp.ness_deviation < 1e-8 && cmp.max_deviation < 1e-6;
    o.detail = "transient " + fmt(cmp.max_deviation) + ", NESS " + fmt(cmp.ness_deviation);
    return o;
}

Outcome fig2_special_points() {
    const fs::path dir = out_dir("fig2");
    const auto res = experiments::run_experiment(experiments::default_config("fig2_sweep"), dir.string());
    Outcome o;
    o.pass = res.exit_code == 0 && res.summary["checks"]["equilibrium_at_hL3"].get<bool>() &&
             res.summary["checks"]["non_driven_at_hL2"].get<bool>();
    o.detail = "max rate at h_L=3: " + fmt(res.summary["metrics"]["hL3_max_rate"].get<double>()) +
               ", Wdot at h_L=2: " + fmt(res.summary["metrics"]["hL2_wdot"].get<double>());
    return o;
}

Outcome fig1_qualitative() {
    const fs::path dir = out_dir("fig1");
    const auto res = experiments::run_experiment(experiments::default_config("fig1"), dir.string());
    const auto& checks = res.summary["checks"];
    Outcome o;
    o.pass = res.exit_code == 0 && checks["xx_rates_decay_by_t50"].get<bool>() &&
             checks["xx_final_state_is_thermal_product"].get<bool>() &&
             checks["xy_identity_beta_w"].get<bool>() && checks["xy_plateau"].get<bool>() &&
             checks["xy_driven"].get<bool>();
    o.detail = "xx state gap " + fmt(res.summary["metrics"]["xx_final_state_deviation"].get<double>()) +
               ", xy identity rel " + fmt(res.summary["metrics"]["xy_identity_rel"].get<double>());
    return o;
}

Outcome second_law_grid() {
    const fs::path dir = out_dir("regime");
    const auto res = experiments::run_experiment(experiments::default_config("regime_scan"), dir.string());
    Outcome o;
    o.pass = res.exit_code == 0 &&
             res.summary["checks"]["entropy_production_nonnegative"].get<bool>() &&
             res.summary["checks"]["equilibrium_on_affinity_surface"].get<bool>();
    o.detail = "min diS/dt " + fmt(res.summary["metrics"]["min_diS_dt"].get<double>()) +
               " over 625 NESS points";
    return o;
}

Outcome first_law_collisions() {
    auto rng = std::mt19937_64(20250809);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_rel = 0.0, worst_term = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 1 + int(u(rng) * 3.0);
        ChainSpec chain{n, {}, 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
        for (int j = 0; j < n; ++j) chain.h.push_back(4.0 * u(rng) - 2.0);
        RIConfig cfg;
        cfg.chain = chain;
        cfg.tau = 0.02 + 0.5 * u(rng);
        if (u(rng) < 0.85)
            cfg.baths.push_back(BathSpec{Side::left, 3.0 * u(rng), 4.0 * u(rng) - 2.0, 0.1 + 2.0 * u(rng)});
        if (u(rng) < 0.6 || cfg.baths.empty())
            cfg.baths.push_back(BathSpec{Side::right, 3.0 * u(rng), 4.0 * u(rng) - 2.0, 0.1 + 2.0 * u(rng)});
        if (u(rng) < 0.5) cfg.scaling = RIScaling::fixed_v;
        const CollisionRecord rec = ri_step(seeded_density(rng, chain.dim()), cfg);
        const double scale = std::max({1.0, std::fabs(rec.dw_l) + std::fabs(rec.dw_r),
                                       std::fabs(rec.dq_l) + std::fabs(rec.dq_r)});
        worst_rel = std::max(worst_rel, rec.first_law_residual / scale);
        worst_term = std::max(worst_term, std::max(-rec.d_term, -rec.i_term));
    }
    Outcome o;
    o.pass = worst_rel < 1e-10 && worst_term < 1e-10;
    o.detail = "worst relative residual " + fmt(worst_rel) + ", entropy-term floor " + fmt(-worst_term);
    return o;
}

Outcome lindblad_limit() {
    const ChainSpec chain = uniform_chain(2, 1.0, 1.0, 1.0);
    const std::vector<BathSpec> baths = {BathSpec{Side::left, 0.5, 1.0, 1.0},
                                         BathSpec{Side::right, 2.0, 1.0, 1.0}};
    const std::vector<double> taus = {0.1, 0.05, 0.02, 0.01, 0.005};
    const Mat rho0 = maximally_mixed(4);
    const ConvergenceStudy scaled = ri_lindblad_convergence(rho0, chain, baths, 2.0, taus);
    const ConvergenceStudy fixed =
        ri_lindblad_convergence(rho0, chain, baths, 2.0, taus, RIScaling::fixed_v);
    const bool fixed_stalls = fixed.points.back().error > 0.5 * fixed.points.front().error;
    Outcome o;
    o.pass = scaled.monotone && scaled.slope >= 0.45 && fixed_stalls;
    o.detail = "slope " + fmt(scaled.slope) + (scaled.monotone ? ", monotone" : ", NOT monotone") +
               ", fixed-V error " + fmt(fixed.points.back().error);
    return o;
}

Outcome efficiency_bounds() {
    auto rng = std::mt19937_64(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_formula = 0.0;
    bool bounds_ok = true;
    for (int k = 0; k < 200; ++k) {
        TwoSiteParams p;
        p.beta_l = 0.3 + 1.2 * u(rng);
        p.beta_r = p.beta_l * (1.1 + 1.9 * u(rng));
        p.h_l = 0.5 + 3.0 * u(rng);
        const double lo = p.beta_l / p.beta_r;
        p.h_r = p.h_l * (lo + (1.0 - lo) * (0.05 + 0.9 * u(rng)));  // engine window
        const LindbladModel m = p.model();
        const ThermoRecord rates = lindblad_rates(m, ness(m).rho);
        const RegimeReport rep = classify_regime(rates, m.baths[0].spec, m.baths[1].spec);
        if (rep.regime != Regime::engine) {
            bounds_ok = false;
            continue;
        }
        worst_formula = std::max(worst_formula, std::fabs(rep.eta - (1.0 - p.h_r / p.h_l)));
        if (rep.eta > 1.0 - p.beta_l / p.beta_r + 1e-9) bounds_ok = false;
    }
    double worst_fridge = 0.0;
    for (int k = 0; k < 200; ++k) {
        TwoSiteParams p;
        p.beta_l = 0.3 + 1.2 * u(rng);
        p.beta_r = p.beta_l * (1.1 + 1.9 * u(rng));
        p.h_l = 0.5 + 3.0 * u(rng);
        p.h_r = p.h_l * (p.beta_l / p.beta_r) * (0.1 + 0.8 * u(rng));  // refrigerator window
        const LindbladModel m = p.model();
        const ThermoRecord rates = lindblad_rates(m, ness(m).rho);
        const RegimeReport rep = classify_regime(rates, m.baths[0].spec, m.baths[1].spec);
        if (rep.regime != Regime::refrigerator) {
            bounds_ok = false;
            continue;
        }
        const double carnot = 1.0 / (p.beta_r / p.beta_l - 1.0);
        if (rep.eta > carnot + 1e-9) bounds_ok = false;
        worst_fridge = std::max(worst_fridge, std::fabs(rep.eta - 1.0 / (p.h_l / p.h_r - 1.0)));
    }
    Outcome o;
    o.pass = bounds_ok && worst_formula < 1e-8 && worst_fridge < 1e-8;
    o.detail = "max |η − (1 − h_R/h_L)| = " + fmt(worst_formula) +
               ", max |η^F − 1/(h_L/h_R−1)| = " + fmt(worst_fridge);
    return o;
}

Outcome dissipator_equivalence() {
    double worst_super = 0.0, worst_ratio = 0.0;
    const ChainSpec chain{2, {1.0, 0.5}, 0.8, 1.1};
    for (double beta : {0.0, 0.5, 1.0, 2.0, 4.0})
        for (double h : {-2.0, -0.5, 0.5, 1.0, 2.0})
            for (double lambda : {0.2, 1.0, 2.5}) {
                const LindbladModel m =
                    make_boundary_driven_model(chain, {BathSpec{Side::left, beta, h, lambda}});
                const auto& bath = m.baths[0];
                // compare column by column on the matrix units
                for (int col = 0; col < 16; ++col) {
                    Mat unit = Mat::zero(4, 4);
                    unit(col % 4, col / 4) = 1.0;
                    worst_super = std::max(
                        worst_super, (bath.micro.apply(unit) - bath.channels.apply(unit)).max_abs());
                }
                const double gp = bath.channels.channels[0].gamma;
                const double gm = bath.channels.channels[1].gamma;
                const double expected = std::exp(-beta * h);
                worst_ratio = std::max(worst_ratio, std::fabs(gp / gm - expected) / expected);
            }
    Outcome o;
    o.pass = worst_super < 1e-12 && worst_ratio < 1e-12;
    o.detail = "superoperator gap " + fmt(worst_super) + ", rate-ratio gap " + fmt(worst_ratio);
    return o;
}

}  // namespace

int main() {
    std::printf("spinbath acceptance suite\n");
    criterion(1, "two-site closed-form NESS observables (1e-8)", 1.0, two_site_quantitative);
    criterion(2, "engine vs exact two-site solution, transient and NESS", 5.0, oracle_equivalence);
    criterion(3, "fig2 sweep special points at h_L = 3 and h_L = 2", 30.0, fig2_special_points);
    criterion(4, "fig1 relaxation (XX) and driven steady state (XY)", 120.0, fig1_qualitative);
    criterion(5, "second law across the 5^4 two-site NESS grid", 60.0, second_law_grid);
    criterion(6, "collision-exact first law over 1000 random configurations", 120.0, first_law_collisions);
    criterion(7, "repeated interactions converge to the Lindblad limit", 300.0, lindblad_limit);
    criterion(8, "engine and refrigerator efficiencies at their bounds", 60.0, efficiency_bounds);
    criterion(9, "microscopic vs explicit dissipator as superoperators", 10.0, dissipator_equivalence);
    if (g_failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
