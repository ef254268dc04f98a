// repeated_interaction.hpp — exact collision-model simulator. The chain is
// joined to fresh thermal bath copies for intervals τ, evolved with the
// exact joint unitary U = e^{−iτ(H_S + H_L + H_R + V_L + V_R)} (both copies
// collide simultaneously), and the copies are traced out. Work, heat and
// entropy production are accounted at the universe level per interval.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "spinbath/densemat.hpp"
#include "spinbath/entropy.hpp"
#include "spinbath/lindblad.hpp"
#include "spinbath/spin_system.hpp"

namespace spinbath {

enum class RIScaling { fixed_v, scaled_v };

struct RIConfig {
    ChainSpec chain;
    std::vector<BathSpec> baths;  // at most one per side; may be empty (free evolution)
    double tau = 0.1;
    int steps = 1;
    RIScaling scaling = RIScaling::scaled_v;
    // fixed_v only: the coupling is frozen at J_r = √(λ_r/tau_ref)
    double tau_ref = 0.0;
    // explicit coupling strength override (e.g. 0 for the decoupled limit)
    std::optional<double> coupling_override;

    double coupling_strength(const BathSpec& b) const {
        if (coupling_override) return *coupling_override;
        if (scaling == RIScaling::scaled_v) return std::sqrt(b.lambda / tau);
        const double tref = tau_ref > 0.0 ? tau_ref : tau;
        return std::sqrt(b.lambda / tref);
    }

    void validate() const {
        chain.validate();
        if (!(tau > 0.0)) throw std::invalid_argument("RIConfig: tau must be positive");
        if (steps < 0) throw std::invalid_argument("RIConfig: negative step count");
        for (const auto& b : baths) b.validate();
    }
};

struct CollisionRecord {
    int n = 0;      // collision index, 1-based
    Mat rho_s;      // system state after the collision
    double dw_l = 0.0, dw_r = 0.0;  // work per side
    double dq_l = 0.0, dq_r = 0.0;  // heat per side
    double dis = 0.0;               // entropy production Δ_iS = D + I
    double d_term = 0.0;            // D(ρ'_n || ρ_n)
    double i_term = 0.0;            // I(S':n')
    double energy = 0.0;            // Tr(H_S ρ_S) after

    // per-interval diagnostics (all should sit at round-off)
    double first_law_residual = 0.0;      // |ΔTr(H_S ρ) − Σ_r(ΔW_r + ΔQ_r)|
    double joint_trace_err = 0.0;         // |Tr ρ_joint − 1| after U
    double joint_purity_err = 0.0;        // |Tr ρ² − Tr ρ₀²| across the interval
    double incoming_work_residual = 0.0;  // |Tr(V ρ_S' ⊗ ρ_n)|, vanishes by freshness
};

class CollisionSimulator {
public:
    explicit CollisionSimulator(RIConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        joint_.n_sites = cfg_.chain.n_sites;
        for (const auto& b : cfg_.baths) {
            if (b.side == Side::left) {
                if (joint_.left_copy) throw std::invalid_argument("CollisionSimulator: duplicate left bath");
                joint_.left_copy = true;
            } else {
                if (joint_.right_copy) throw std::invalid_argument("CollisionSimulator: duplicate right bath");
                joint_.right_copy = true;
            }
        }
        h_sys_ = chain_hamiltonian(cfg_.chain);
        const int d = joint_.dim();
        Mat h_tot = joint_.embed_system(h_sys_);
        v_total_ = Mat::zero(d, d);
        for (const auto& b : cfg_.baths) {
            const Mat v = boundary_coupling(joint_, b.side, cfg_.coupling_strength(b));
            Mat h_copy = site_op(joint_.space(), joint_.copy_factor(b.side), Pauli::z);
            h_copy *= 0.5 * b.h;
            h_tot += h_copy;
            v_total_ += v;
            const ThermalSpinState omega = thermal_spin(b.beta, b.h);
            if (b.side == Side::left) { v_l_ = v; omega_l_ = omega; }
            else { v_r_ = v; omega_r_ = omega; }
            check_freshness(v, b.side, omega);
        }
        h_tot += v_total_;
        u_ = expm_unitary(h_tot, cfg_.tau);
    }

    const RIConfig& config() const { return cfg_; }
    const SpinLayout& joint_layout() const { return joint_; }
    const Mat& system_hamiltonian() const { return h_sys_; }
    const Mat& joint_unitary() const { return u_; }

    // Fresh copies joined to the system state, in layout order.
    Mat join(const Mat& rho_s) const {
        Mat rho = joint_.left_copy ? kron(omega_l_->matrix, rho_s) : rho_s;
        if (joint_.right_copy) rho = kron(rho, omega_r_->matrix);
        return rho;
    }

    // State map only — used by the convergence sweeps.
    Mat step_state(const Mat& rho_s) const {
        const Mat evolved = u_ * join(rho_s) * u_.adjoint();
        return partial_trace(evolved, joint_.space(), joint_.site_factors());
    }

    // One collision with full thermodynamic bookkeeping.
    CollisionRecord step(const Mat& rho_s, int index = 1) const {
        CollisionRecord rec;
        rec.n = index;
        const Mat joined = join(rho_s);
        const Mat evolved = u_ * joined * u_.adjoint();
        const TensorSpace space = joint_.space();

        rec.rho_s = partial_trace(evolved, space, joint_.site_factors());
        rec.energy = expectation(h_sys_, rec.rho_s);
        rec.joint_trace_err = std::abs(evolved.trace() - cdouble(1.0));
        rec.joint_purity_err = std::fabs(purity(evolved) - purity(joined));

        const std::vector<int> copies = joint_.copy_factors();
        if (!copies.empty()) {
            // ΔW_r = −Tr(V_r U (ρ⊗ρ_n) U†)
            if (joint_.left_copy) rec.dw_l = -trace_product(*v_l_, evolved).real();
            if (joint_.right_copy) rec.dw_r = -trace_product(*v_r_, evolved).real();
            // ΔQ_r = Tr(H_r (ρ_n − ρ'_n)) via the reduced copy states
            if (joint_.left_copy) {
                const Mat after = partial_trace(evolved, space, {joint_.copy_factor(Side::left)});
                rec.dq_l = 0.5 * omega_l_->h *
                           (omega_l_->magnetization - trace_product(pauli_matrix(Pauli::z), after).real());
            }
            if (joint_.right_copy) {
                const Mat after = partial_trace(evolved, space, {joint_.copy_factor(Side::right)});
                rec.dq_r = 0.5 * omega_r_->h *
                           (omega_r_->magnetization - trace_product(pauli_matrix(Pauli::z), after).real());
            }
            // Δ_iS = D(ρ'_n || ρ_n) + I(S':n')
            const Mat copies_after = partial_trace(evolved, space, copies);
            Mat copies_before = Mat::identity(1);
            if (joint_.left_copy) copies_before = kron(copies_before, omega_l_->matrix);
            if (joint_.right_copy) copies_before = kron(copies_before, omega_r_->matrix);
            rec.d_term = rel_entropy(copies_after, copies_before);
            rec.i_term = vn_entropy(rec.rho_s) + vn_entropy(copies_after) - vn_entropy(evolved);
            rec.dis = rec.d_term + rec.i_term;
            // the incoming interaction carries no work because the next copy is fresh
            rec.incoming_work_residual = std::fabs(trace_product(v_total_, join(rec.rho_s)).real());
        }

        const double de = rec.energy - expectation(h_sys_, rho_s);
        rec.first_law_residual = std::fabs(de - (rec.dw_l + rec.dw_r + rec.dq_l + rec.dq_r));
        return rec;
    }

private:
    void check_freshness(const Mat& v, Side side, const ThermalSpinState& omega) const {
        // Tr_r(V_r (I ⊗ ω_r)) must vanish identically on the rest of the register
        const int c = joint_.copy_factor(side);
        Mat omega_ext = Mat::identity(1);
        for (int f = 0; f < joint_.n_factors(); ++f)
            omega_ext = kron(omega_ext, f == c ? omega.matrix : Mat::identity(2));
        std::vector<int> rest;
        for (int f = 0; f < joint_.n_factors(); ++f)
            if (f != c) rest.push_back(f);
        const Mat residue = partial_trace(v * omega_ext, joint_.space(), rest);
        if (residue.max_abs() > 1e-12 * std::max(1.0, v.max_abs()))
            throw std::invalid_argument("CollisionSimulator: Tr_r(V_r omega_r) != 0");
    }

    RIConfig cfg_;
    SpinLayout joint_;
    Mat h_sys_;
    Mat u_;
    Mat v_total_;
    std::optional<Mat> v_l_, v_r_;
    std::optional<ThermalSpinState> omega_l_, omega_r_;
};

inline CollisionRecord ri_step(const Mat& rho_s, const RIConfig& cfg) {
    return CollisionSimulator(cfg).step(rho_s);
}

// ---------------------------------------------------------------- trajectory

struct RITrajectory {
    std::vector<CollisionRecord> records;
    double cum_w_l = 0.0, cum_w_r = 0.0;
    double cum_q_l = 0.0, cum_q_r = 0.0;
    double cum_dis = 0.0;
};

inline RITrajectory ri_trajectory(const Mat& rho0, const RIConfig& cfg) {
    const CollisionSimulator sim(cfg);
    RITrajectory traj;
    Mat rho = rho0;
    for (int n = 1; n <= cfg.steps; ++n) {
        CollisionRecord rec = sim.step(rho, n);
        rho = rec.rho_s;
        traj.cum_w_l += rec.dw_l;
        traj.cum_w_r += rec.dw_r;
        traj.cum_q_l += rec.dq_l;
        traj.cum_q_r += rec.dq_r;
        traj.cum_dis += rec.dis;
        traj.records.push_back(std::move(rec));
    }
    return traj;
}

// ---------------------------------------------------------------- τ → 0 limit

struct ConvergencePoint {
    double tau;
    double error;  // ||ρ_RI(t_final; τ) − ρ_Lindblad(t_final)||_F
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    double slope = 0.0;  // least-squares slope of log error vs log τ
    bool monotone = true;
};

// Repeated collisions at each τ against a tightly integrated Lindblad
// reference at the same final time. t_final must be an integer multiple of
// every τ. With scaled_v the error should vanish as τ → 0; with fixed_v the
// couplings are frozen at tau_ref = max τ and no convergence is expected.
inline ConvergenceStudy ri_lindblad_convergence(const Mat& rho0, const ChainSpec& chain,
                                                const std::vector<BathSpec>& baths, double t_final,
                                                const std::vector<double>& tau_list,
                                                RIScaling scaling = RIScaling::scaled_v) {
    if (tau_list.empty()) throw std::invalid_argument("ri_lindblad_convergence: empty tau list");
    const LindbladModel model = make_boundary_driven_model(chain, baths);
    EvolveOptions eopt;
    eopt.dt = std::min(1e-3, default_dt(model));
    eopt.record_stride = 1 << 20;
    const Mat reference = evolve(model, rho0, t_final, eopt).samples.back().rho;

    double tau_max = 0.0;
    for (double tau : tau_list) tau_max = std::max(tau_max, tau);

    ConvergenceStudy study;
    for (double tau : tau_list) {
        const double ratio = t_final / tau;
        const long n = std::lround(ratio);
        if (n < 1 || std::fabs(ratio - double(n)) > 1e-9 * ratio)
            throw std::invalid_argument("ri_lindblad_convergence: t_final not a multiple of tau");
        RIConfig cfg;
        cfg.chain = chain;
        cfg.baths = baths;
        cfg.tau = tau;
        cfg.steps = int(n);
        cfg.scaling = scaling;
        cfg.tau_ref = tau_max;
        const CollisionSimulator sim(cfg);
        Mat rho = rho0;
        for (long k = 0; k < n; ++k) rho = sim.step_state(rho);
        study.points.push_back({tau, (rho - reference).fro_norm()});
    }

    std::sort(study.points.begin(), study.points.end(),
              [](const ConvergencePoint& a, const ConvergencePoint& b) { return a.tau > b.tau; });
    for (size_t i = 1; i < study.points.size(); ++i)
        if (study.points[i].error > study.points[i - 1].error) study.monotone = false;

    // least-squares fit of log error against log τ
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const auto& p : study.points) {
        if (p.error <= 0.0) continue;
        const double lx = std::log(p.tau), ly = std::log(p.error);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m >= 2) study.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return study;
}

}  // namespace spinbath
