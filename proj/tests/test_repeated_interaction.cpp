#include <catch2/catch_amalgamated.hpp>

#include "spinbath/repeated_interaction.hpp"
#include "spinbath/thermo.hpp"
#include "support.hpp"

using namespace spinbath;
using testsupport::random_density;

namespace {

RIConfig two_bath_config(int n = 2, double tau = 0.1) {
    RIConfig cfg;
    cfg.chain = uniform_chain(n, 1.0, 1.0, 1.0);
    cfg.baths = {BathSpec{Side::left, 0.5, 1.0, 1.0}, BathSpec{Side::right, 2.0, 1.0, 1.0}};
    cfg.tau = tau;
    return cfg;
}

}  // namespace

TEST_CASE("decoupled collision is free unitary evolution") {
    auto gen = testsupport::rng(51);
    RIConfig cfg = two_bath_config(2, 0.3);
    cfg.coupling_override = 0.0;  // copies attached, interaction switched off
    const Mat rho0 = random_density(gen, 4);
    const CollisionRecord rec = ri_step(rho0, cfg);

    REQUIRE(std::fabs(rec.dw_l) < 1e-13);
    REQUIRE(std::fabs(rec.dw_r) < 1e-13);
    REQUIRE(std::fabs(rec.dq_l) < 1e-13);
    REQUIRE(std::fabs(rec.dq_r) < 1e-13);
    REQUIRE(std::fabs(rec.dis) < 1e-11);

    const Mat u = expm_unitary(chain_hamiltonian(cfg.chain), cfg.tau);
    REQUIRE((rec.rho_s - u * rho0 * u.adjoint()).fro_norm() < 1e-12);
}

TEST_CASE("matched thermal product state produces no entropy") {
    // XX chain, uniform field, single bath at the same β and h
    RIConfig cfg;
    cfg.chain = uniform_chain(3, 1.0, 1.0, 1.0);
    cfg.baths = {BathSpec{Side::left, 1.0, 1.0, 1.0}};
    cfg.tau = 0.2;
    const Mat rho0 = thermal_product_state(1.0, cfg.chain.h);
    const CollisionSimulator sim(cfg);
    const CollisionRecord rec = sim.step(rho0);

    REQUIRE(std::fabs(rec.dis) < 1e-10);
    REQUIRE(rec.d_term < 1e-10);
    REQUIRE(rec.i_term < 1e-10);
    // the used copy leaves in its initial state
    const Mat evolved = sim.joint_unitary() * sim.join(rho0) * sim.joint_unitary().adjoint();
    const Mat copy_after = partial_trace(evolved, sim.joint_layout().space(),
                                         {sim.joint_layout().copy_factor(Side::left)});
    REQUIRE((copy_after - thermal_spin(1.0, 1.0).matrix).fro_norm() < 1e-10);
    // and the chain state is unchanged
    REQUIRE((rec.rho_s - rho0).fro_norm() < 1e-10);
}

TEST_CASE("per-collision first law closes at round-off") {
    auto gen = testsupport::rng(52);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 1 + int(u(gen) * 3.0);
        ChainSpec chain{n, {}, 2.0 * u(gen) - 1.0, 2.0 * u(gen) - 1.0};
        for (int j = 0; j < n; ++j) chain.h.push_back(4.0 * u(gen) - 2.0);
        RIConfig cfg;
        cfg.chain = chain;
        cfg.baths.push_back(BathSpec{Side::left, 3.0 * u(gen), 4.0 * u(gen) - 2.0, 0.1 + 2.0 * u(gen)});
        if (u(gen) < 0.5)
            cfg.baths.push_back(BathSpec{Side::right, 3.0 * u(gen), 4.0 * u(gen) - 2.0, 0.1 + 2.0 * u(gen)});
        cfg.tau = 0.02 + 0.5 * u(gen);
        if (u(gen) < 0.5) cfg.scaling = RIScaling::fixed_v;

        const CollisionRecord rec = ri_step(random_density(gen, chain.dim()), cfg);
        const double scale = std::max({1.0, std::fabs(rec.dw_l) + std::fabs(rec.dw_r),
                                       std::fabs(rec.dq_l) + std::fabs(rec.dq_r)});
        REQUIRE(rec.first_law_residual / scale < 1e-10);
        REQUIRE(rec.d_term > -1e-10);
        REQUIRE(rec.i_term > -1e-10);
        REQUIRE(rec.joint_trace_err < 1e-10);
        REQUIRE(rec.joint_purity_err < 1e-10);
        REQUIRE(rec.incoming_work_residual < 1e-12);
    }
}

TEST_CASE("trajectory bookkeeping") {
    auto gen = testsupport::rng(53);
    RIConfig cfg = two_bath_config(2, 0.15);
    cfg.steps = 60;
    const Mat rho0 = random_density(gen, 4);
    const double s0 = vn_entropy(rho0);
    const RITrajectory traj = ri_trajectory(rho0, cfg);
    REQUIRE(int(traj.records.size()) == cfg.steps);

    for (const auto& rec : traj.records) REQUIRE(rec.dis > -1e-10);

    // cumulative ΔS = Σ_r β_r Q_r + Σ Δ_iS
    const double ds = vn_entropy(traj.records.back().rho_s) - s0;
    const double balance = 0.5 * traj.cum_q_l + 2.0 * traj.cum_q_r + traj.cum_dis;
    REQUIRE(std::fabs(ds - balance) < 1e-8);
}

TEST_CASE("scaled collisions reproduce the Lindblad rates as tau shrinks") {
    const ChainSpec chain = uniform_chain(2, 1.0, 1.0, 1.0);
    const std::vector<BathSpec> baths = {BathSpec{Side::left, 0.5, 1.0, 1.0},
                                         BathSpec{Side::right, 2.0, 1.0, 1.0}};
    const LindbladModel model = make_boundary_driven_model(chain, baths);
    const Mat rho = thermal_product_state(1.0, chain.h);
    const ThermoRecord limit = lindblad_rates(model, rho);

    double previous_gap = std::numeric_limits<double>::infinity();
    for (double tau : {0.04, 0.01, 0.0025}) {
        RIConfig cfg;
        cfg.chain = chain;
        cfg.baths = baths;
        cfg.tau = tau;
        const CollisionRecord rec = ri_step(rho, cfg);
        const double gap = std::max(std::fabs(rec.dw_l / tau - limit.wdot_l),
                                    std::fabs(rec.dq_l / tau - limit.qdot_l));
        REQUIRE(gap < previous_gap);
        previous_gap = gap;
    }
    REQUIRE(previous_gap < 0.02);
}

TEST_CASE("tau to zero convergence study") {
    const ChainSpec chain = uniform_chain(2, 1.0, 1.0, 1.0);
    const std::vector<BathSpec> baths = {BathSpec{Side::left, 0.5, 1.0, 1.0},
                                         BathSpec{Side::right, 2.0, 1.0, 1.0}};
    const Mat rho0 = maximally_mixed(4);

    const ConvergenceStudy scaled =
        ri_lindblad_convergence(rho0, chain, baths, 2.0, {0.1, 0.05, 0.02, 0.01, 0.005});
    REQUIRE(scaled.monotone);
    REQUIRE(scaled.slope >= 0.45);

    const ConvergenceStudy fixed = ri_lindblad_convergence(rho0, chain, baths, 2.0,
                                                           {0.1, 0.05, 0.02, 0.01, 0.005},
                                                           RIScaling::fixed_v);
    REQUIRE(fixed.points.back().error > 0.5 * fixed.points.front().error);

    REQUIRE_THROWS_AS(ri_lindblad_convergence(rho0, chain, baths, 2.0, {0.3}),
                      std::invalid_argument);
}

TEST_CASE("configuration validation") {
    RIConfig cfg = two_bath_config();
    cfg.tau = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = two_bath_config();
    cfg.baths.push_back(BathSpec{Side::left, 1.0, 1.0, 1.0});
    REQUIRE_THROWS_AS(CollisionSimulator(cfg), std::invalid_argument);
}
