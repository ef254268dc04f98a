// lindblad.hpp — boundary-driven Lindblad engine: dissipators built from the
// microscopic system–copy coupling and from explicit jump channels, RK4 time
// evolution, Liouvillian vectorization (column-stacking) and NESS extraction.
//
// Dissipator convention carries the factor 2:
//   D(ρ) = Σ_μ γ^μ (2 L^μ ρ L^μ† − {L^μ† L^μ, ρ}).

#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "spinbath/densemat.hpp"
#include "spinbath/spin_system.hpp"

namespace spinbath {

// ---------------------------------------------------------------- channels

struct Channel {
    double gamma = 0.0;
    Mat jump;           // L
    Mat jump_dag_jump;  // L†L, cached

    Channel() = default;
    Channel(double g, Mat l) : gamma(g), jump(std::move(l)) {
        if (gamma < 0.0) throw std::invalid_argument("Channel: negative rate");
        jump_dag_jump = jump.adjoint() * jump;
    }
};

// Jump-channel dissipator acting on the system space (factor-2 convention).
struct Dissipator {
    Side side = Side::left;
    std::vector<Channel> channels;

    Mat apply(const Mat& rho) const {
        Mat out = Mat::zero(rho.rows(), rho.cols());
        for (const Channel& ch : channels) {
            if (ch.gamma == 0.0) continue;
            Mat term = ch.jump * rho * ch.jump.adjoint();
            term *= 2.0;
            term -= ch.jump_dag_jump * rho;
            term -= rho * ch.jump_dag_jump;
            term *= ch.gamma;
            out += term;
        }
        return out;
    }
};

// ---------------------------------------------------------------- microscopic

// D_r(ρ) = Tr_r[v (ρ⊗ω) v] − ½ Tr_r{v², ρ⊗ω} for a coupling v on the
// system-plus-one-copy space. The scaling √λ_r is part of v.
struct MicroscopicDissipator {
    SpinLayout ext;  // system plus this bath's copy
    Side side = Side::left;
    Mat v;
    Mat v_sq;
    Mat omega;  // 2×2 copy state

    // ρ⊗ω in the layout's factor order
    Mat join_with_copy(const Mat& rho_s) const {
        return side == Side::left ? kron(omega, rho_s) : kron(rho_s, omega);
    }

    Mat apply(const Mat& rho_s) const {
        const Mat joint = join_with_copy(rho_s);
        Mat inner = v * joint * v;
        Mat acomm = v_sq * joint;
        acomm += joint * v_sq;
        acomm *= 0.5;
        inner -= acomm;
        return partial_trace(inner, ext.space(), ext.site_factors());
    }
};

// Builds the microscopic dissipator and enforces Tr_r(v·(I⊗ω)) = 0, the
// precondition behind the work/heat splitting.
inline MicroscopicDissipator dissipator_from_coupling(const Mat& v, const ThermalSpinState& omega,
                                                      const SpinLayout& ext, Side side) {
    if (v.rows() != ext.dim()) throw std::invalid_argument("dissipator_from_coupling: dimension mismatch");
    if (!v.is_hermitian(1e-10 * std::max(v.fro_norm(), 1.0)))
        throw std::invalid_argument("dissipator_from_coupling: coupling not Hermitian");
    MicroscopicDissipator d;
    d.ext = ext;
    d.side = side;
    d.v = v;
    d.v_sq = v * v;
    d.omega = omega.matrix;

    const Mat omega_ext = side == Side::left ? kron(omega.matrix, Mat::identity(1 << ext.n_sites))
                                             : kron(Mat::identity(1 << ext.n_sites), omega.matrix);
    const Mat residue = partial_trace(v * omega_ext, ext.space(), ext.site_factors());
    if (residue.max_abs() > 1e-12 * std::max(1.0, v.max_abs()))
        throw std::invalid_argument("dissipator_from_coupling: Tr_r(v omega) != 0");
    return d;
}

// D_r(A) = Tr[(v A v − ½{v², A}) (ρ_S ⊗ ω)] for Hermitian A on the extended
// space; the heat and work rates are D_r applied to H_r and H_S + H_r.
inline double d_functional(const MicroscopicDissipator& d, const Mat& rho_s, const Mat& a_ext) {
    if (a_ext.rows() != d.ext.dim()) throw std::invalid_argument("d_functional: dimension mismatch");
    Mat t = d.v * a_ext * d.v;
    Mat acomm = d.v_sq * a_ext;
    acomm += a_ext * d.v_sq;
    acomm *= 0.5;
    t -= acomm;
    return trace_product(t, d.join_with_copy(rho_s)).real();
}

// ---------------------------------------------------------------- model

struct BoundaryBath {
    BathSpec spec;
    ThermalSpinState omega;
    MicroscopicDissipator micro;
    Dissipator channels;
    Mat h_copy_ext;  // (h_r/2) σ_r^z on the extended space
    Mat h_sys_ext;   // H_S on the extended space
    // Effective system operators so that Ẇ_r = Tr(w_op ρ), Q̇_r = Tr(q_op ρ).
    Mat w_op;
    Mat q_op;
};

struct LindbladModel {
    ChainSpec chain;
    Mat h_s;
    std::vector<BoundaryBath> baths;

    int dim() const { return h_s.rows(); }
    const BoundaryBath* bath(Side s) const {
        for (const auto& b : baths)
            if (b.spec.side == s) return &b;
        return nullptr;
    }
};

namespace detail {

// Tr_copy[W · (I_S ⊗ ω)] as a system operator, so full-space traces against
// ρ⊗ω reduce to system-space traces.
inline Mat reduce_against_copy(const Mat& w, const SpinLayout& ext, Side side, const Mat& omega) {
    const Mat omega_ext = side == Side::left ? kron(omega, Mat::identity(1 << ext.n_sites))
                                             : kron(Mat::identity(1 << ext.n_sites), omega);
    return partial_trace(w * omega_ext, ext.space(), ext.site_factors());
}

inline Mat rate_generator(const MicroscopicDissipator& d, const Mat& a_ext) {
    Mat t = d.v * a_ext * d.v;
    Mat acomm = d.v_sq * a_ext;
    acomm += a_ext * d.v_sq;
    acomm *= 0.5;
    t -= acomm;
    return reduce_against_copy(t, d.ext, d.side, d.omega);
}

}  // namespace detail

// Assembles the boundary-driven model: XY chain plus one thermal spin bath
// per listed side, coupled through v_r = √λ_r (σ_r^x σ_b^x + σ_r^y σ_b^y).
// The equivalent explicit channels are γ^±_r = λ_r(1 ± M_r), L^± = σ_b^±.
inline LindbladModel make_boundary_driven_model(const ChainSpec& chain,
                                                const std::vector<BathSpec>& baths) {
    chain.validate();
    LindbladModel model;
    model.chain = chain;
    model.h_s = chain_hamiltonian(chain);
    const TensorSpace sys = TensorSpace::spins(chain.n_sites);

    bool seen_left = false, seen_right = false;
    for (const BathSpec& spec : baths) {
        spec.validate();
        if ((spec.side == Side::left && std::exchange(seen_left, true)) ||
            (spec.side == Side::right && std::exchange(seen_right, true)))
            throw std::invalid_argument("make_boundary_driven_model: duplicate bath side");

        BoundaryBath bath;
        bath.spec = spec;
        bath.omega = thermal_spin(spec.beta, spec.h);

        SpinLayout ext;
        ext.n_sites = chain.n_sites;
        ext.left_copy = spec.side == Side::left;
        ext.right_copy = spec.side == Side::right;

        const Mat v = boundary_coupling(ext, spec.side, std::sqrt(spec.lambda));
        bath.micro = dissipator_from_coupling(v, bath.omega, ext, spec.side);

        const int b = ext.boundary_site(spec.side) - 1;
        bath.channels.side = spec.side;
        // γ^± = λ(1 ± M) = 2λ p_{up/down}; the populations keep the
        // detailed-balance ratio γ^+/γ^- = e^{-βh} exact to round-off
        const double p_up = bath.omega.matrix(0, 0).real();
        const double p_down = bath.omega.matrix(1, 1).real();
        bath.channels.channels.emplace_back(2.0 * spec.lambda * p_up, site_op(sys, b, Pauli::plus));
        bath.channels.channels.emplace_back(2.0 * spec.lambda * p_down, site_op(sys, b, Pauli::minus));

        bath.h_copy_ext = site_op(ext.space(), ext.copy_factor(spec.side), Pauli::z);
        bath.h_copy_ext *= 0.5 * spec.h;
        bath.h_sys_ext = ext.embed_system(model.h_s);

        bath.w_op = detail::rate_generator(bath.micro, bath.h_sys_ext + bath.h_copy_ext);
        bath.q_op = detail::rate_generator(bath.micro, bath.h_copy_ext);
        bath.q_op *= -1.0;

        model.baths.push_back(std::move(bath));
    }
    return model;
}

// dρ/dt = −i[H_S, ρ] + Σ_r D_r(ρ), evaluated through the jump channels.
inline Mat lindblad_rhs(const LindbladModel& model, const Mat& rho) {
    Mat out = model.h_s * rho;
    out -= rho * model.h_s;
    out *= cdouble(0.0, -1.0);
    for (const auto& bath : model.baths) out += bath.channels.apply(rho);
    return out;
}

// Spectral norm of H_S, used by the default step-size policy.
inline double spectral_norm_herm(const Mat& h) {
    const EigResult e = herm_eig(h);
    return std::max(std::fabs(e.values.front()), std::fabs(e.values.back()));
}

// ---------------------------------------------------------------- evolve

struct TimedState {
    double t;
    Mat rho;
};

struct EvolveOptions {
    double dt = 0.0;        // 0 → 0.01 / max(λ_max, ||H_S||₂)
    int record_stride = 1;  // store every k-th step
    double tol_psd = tol::psd;
    int max_halvings = 3;
};

struct EvolveResult {
    std::vector<TimedState> samples;  // includes t=0 and t_final
    double dt_used = 0.0;
    double max_trace_drift = 0.0;         // raw |Tr ρ − 1| before renormalization
    double max_herm_drift = 0.0;          // raw ||ρ − ρ†||_F before re-Hermitization
    double max_positivity_violation = 0.0;
    int halvings = 0;
};

inline double default_dt(const LindbladModel& model) {
    double lam = 0.0;
    for (const auto& b : model.baths) lam = std::max(lam, b.spec.lambda);
    return 0.01 / std::max({lam, spectral_norm_herm(model.h_s), 1e-12});
}

// Fixed-step RK4. Recorded states are re-Hermitized and trace-renormalized;
// raw drifts are reported. A positivity violation beyond tol_psd restarts
// the integration with dt halved, then fails hard.
inline EvolveResult evolve(const LindbladModel& model, const Mat& rho0, double t_final,
                           EvolveOptions opt = {}) {
    if (!(t_final >= 0.0)) throw std::invalid_argument("evolve: negative t_final");
    if (rho0.rows() != model.dim()) throw std::invalid_argument("evolve: state dimension mismatch");
    double dt = opt.dt > 0.0 ? opt.dt : default_dt(model);
    const int stride = std::max(opt.record_stride, 1);

    for (int attempt = 0; ; ++attempt) {
        EvolveResult res;
        res.dt_used = dt;
        res.halvings = attempt;
        const long n_steps = t_final > 0.0 ? std::lround(std::ceil(t_final / dt - 1e-9)) : 0;

        Mat rho = hermitized(rho0);
        rho *= 1.0 / rho.trace().real();
        bool violated = false;

        auto record = [&](double t, const Mat& state) {
            const EigResult eig = herm_eig(state);
            const double viol = std::max(0.0, -eig.values.front());
            res.max_positivity_violation = std::max(res.max_positivity_violation, viol);
            if (viol > opt.tol_psd) violated = true;
            res.samples.push_back({t, state});
        };

        record(0.0, rho);
        for (long s = 1; s <= n_steps && !violated; ++s) {
            const double step = std::min(dt, t_final - (s - 1) * dt);
            const Mat k1 = lindblad_rhs(model, rho);
            const Mat k2 = lindblad_rhs(model, rho + (0.5 * step) * k1);
            const Mat k3 = lindblad_rhs(model, rho + (0.5 * step) * k2);
            const Mat k4 = lindblad_rhs(model, rho + step * k3);
            Mat incr = k1;
            incr += 2.0 * k2;
            incr += 2.0 * k3;
            incr += k4;
            incr *= step / 6.0;
            rho += incr;

            // raw per-step drifts, then re-Hermitize and renormalize
            res.max_trace_drift = std::max(res.max_trace_drift, std::abs(rho.trace() - cdouble(1.0)));
            res.max_herm_drift = std::max(res.max_herm_drift, (rho - rho.adjoint()).fro_norm());
            rho = hermitized(rho);
            rho *= 1.0 / rho.trace().real();

            const bool last = (s == n_steps);
            if (s % stride == 0 || last) record(std::min(s * dt, t_final), rho);
        }
        if (!violated) return res;
        if (attempt >= opt.max_halvings)
            throw std::runtime_error("evolve: positivity violation persists after step halving");
        dt *= 0.5;
    }
}

// ---------------------------------------------------------------- Liouvillian

// L̂ vec(ρ) = vec(lindblad_rhs(ρ)) under column-stacking.
inline Mat liouvillian_matrix(const LindbladModel& model) {
    const int d = model.dim();
    const Mat id = Mat::identity(d);
    Mat l = kron(id, model.h_s);
    l -= kron(model.h_s.transpose(), id);
    l *= cdouble(0.0, -1.0);
    for (const auto& bath : model.baths)
        for (const Channel& ch : bath.channels.channels) {
            if (ch.gamma == 0.0) continue;
            Mat term = kron(ch.jump.conjugate(), ch.jump);
            term *= 2.0;
            term -= kron(id, ch.jump_dag_jump);
            term -= kron(ch.jump_dag_jump.transpose(), id);
            term *= ch.gamma;
            l += term;
        }
    return l;
}

// ---------------------------------------------------------------- NESS

namespace detail {

// Weak U(1) symmetry: [H_S, Σσ^z] = 0 and every jump operator is a
// magnetization ladder operator. Then the Liouvillian preserves the grading
// by popcount(row) − popcount(col) and the (unique) NESS lives in grade 0.
inline bool has_magnetization_grading(const LindbladModel& model) {
    const Mat m = total_sz(model.chain.n_sites);
    const double hscale = std::max(1.0, model.h_s.fro_norm());
    if (commutator(model.h_s, m).fro_norm() > 1e-10 * hscale) return false;
    for (const auto& bath : model.baths)
        for (const Channel& ch : bath.channels.channels) {
            const double lnorm = ch.jump.fro_norm();
            if (lnorm == 0.0) continue;
            const Mat c = commutator(m, ch.jump);
            const cdouble coeff = trace_product(ch.jump.adjoint(), c) / cdouble(lnorm * lnorm);
            if ((c - coeff * ch.jump).fro_norm() > 1e-10 * std::max(1.0, c.fro_norm())) return false;
        }
    return true;
}

inline std::vector<int> grade_zero_vec_indices(int d) {
    std::vector<int> idx;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (__builtin_popcount(unsigned(i)) == __builtin_popcount(unsigned(j)))
                idx.push_back(j * d + i);
    return idx;
}

}  // namespace detail

struct NessOptions {
    bool use_symmetry = true;          // restrict to the magnetization-graded sector when valid
    NullMethod method = NullMethod::automatic;
    double tol_null = tol::null_space;
    bool cross_validate = false;       // compare against long-time integration
    double t_validate = 50.0;
    double dt_validate = 0.0;
};

struct NessResult {
    Mat rho;
    double null_residual = 0.0;   // smallest eigenvalue of L̂†L̂ (restricted solve if sector used)
    int multiplicity = 1;         // numerical null-space count of the solve
    double rhs_residual = 0.0;    // ||lindblad_rhs(ρ)||_F, the steady-state criterion
    bool used_symmetry_sector = false;
    bool degenerate = false;      // multiplicity > 1: caller decides
    std::optional<double> evolve_deviation;  // ||ρ − ρ(t_validate)||_F if requested
};

// Steady state from the numerical null space of the vectorized Liouvillian.
inline NessResult ness(const LindbladModel& model, NessOptions opt = {}) {
    const int d = model.dim();
    const Mat lhat = liouvillian_matrix(model);

    auto assemble = [&](Mat rho_raw, double residual, int multiplicity, bool sector) {
        NessResult r;
        // rotate the global phase so the trace is real positive, then clean up
        const cdouble tr = rho_raw.trace();
        if (std::abs(tr) < 1e-10)
            throw std::runtime_error("ness: null vector is traceless; no normalizable steady state");
        rho_raw *= std::conj(tr) / std::abs(tr);
        Mat rho = hermitized(rho_raw);
        rho *= 1.0 / rho.trace().real();
        r.rho = std::move(rho);
        r.null_residual = residual;
        r.multiplicity = multiplicity;
        r.degenerate = multiplicity > 1;
        r.used_symmetry_sector = sector;
        r.rhs_residual = lindblad_rhs(model, r.rho).fro_norm();
        return r;
    };

    NessResult result;
    bool have = false;
    if (opt.use_symmetry && detail::has_magnetization_grading(model)) {
        const std::vector<int> idx = detail::grade_zero_vec_indices(d);
        Mat sub(int(idx.size()), int(idx.size()));
        for (size_t a = 0; a < idx.size(); ++a) {
            const int pa = idx[a];
            for (size_t b = 0; b < idx.size(); ++b) sub(int(a), int(b)) = lhat(pa, idx[b]);
        }
        const NullVectorResult nv = null_vector(sub, opt.tol_null, opt.method);
        std::vector<cdouble> full(size_t(d) * d, 0.0);
        for (size_t a = 0; a < idx.size(); ++a) full[idx[a]] = nv.vector(int(a), 0);
        NessResult cand = assemble(unvec(full, d), nv.residual, nv.multiplicity, true);
        // the sector solve must reproduce a genuine steady state of the full generator
        if (cand.rhs_residual <= 1e-9 * std::max(1.0, lhat.max_abs())) {
            result = std::move(cand);
            have = true;
        }
    }
    if (!have) {
        const NullVectorResult nv = null_vector(lhat, opt.tol_null, opt.method);
        std::vector<cdouble> v(size_t(d) * d);
        for (int k = 0; k < d * d; ++k) v[k] = nv.vector(k, 0);
        result = assemble(unvec(v, d), nv.residual, nv.multiplicity, false);
    }

    if (opt.cross_validate) {
        EvolveOptions eopt;
        eopt.dt = opt.dt_validate;
        eopt.record_stride = 1 << 20;  // endpoints only
        const EvolveResult ev = evolve(model, maximally_mixed(d), opt.t_validate, eopt);
        result.evolve_deviation = (result.rho - ev.samples.back().rho).fro_norm();
    }
    return result;
}

}  // namespace spinbath
