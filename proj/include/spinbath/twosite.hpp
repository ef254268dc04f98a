// twosite.hpp — exact solution of the two-site XX boundary-driven chain:
// the closed ODE system for the four correlators (X, Y, <σ_1^z>, <σ_2^z>)
// and the closed-form NESS, used as ground truth for the Lindblad engine.
//
// The quoted correlator Y = i<σ_1^y σ_2^x − σ_1^x σ_2^y> is purely imaginary;
// it is stored as the real number y = −iY so the ODE system is real.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "spinbath/densemat.hpp"
#include "spinbath/lindblad.hpp"
#include "spinbath/spin_system.hpp"
#include "spinbath/thermo.hpp"

namespace spinbath {

struct TwoSiteParams {
    double j = 1.0;       // XX exchange (J_x = J_y = J)
    double h_l = 1.0;     // left field, tied to site 1
    double h_r = 1.0;     // right field, tied to site 2
    double lambda = 1.0;  // common coupling rate λ_L = λ_R
    double beta_l = 1.0;
    double beta_r = 1.0;

    double m_l() const { return -std::tanh(0.5 * beta_l * h_l); }
    double m_r() const { return -std::tanh(0.5 * beta_r * h_r); }

    ChainSpec chain() const { return ChainSpec{2, {h_l, h_r}, j, j}; }
    std::vector<BathSpec> baths() const {
        return {BathSpec{Side::left, beta_l, h_l, lambda}, BathSpec{Side::right, beta_r, h_r, lambda}};
    }
    LindbladModel model() const { return make_boundary_driven_model(chain(), baths()); }
};

struct CorrelatorState {
    double x = 0.0;   // <σ_1^x σ_2^x + σ_1^y σ_2^y>
    double y = 0.0;   // <σ_1^y σ_2^x − σ_1^x σ_2^y>  (quoted Y = i·y)
    double z1 = 0.0;  // <σ_1^z>
    double z2 = 0.0;  // <σ_2^z>
};

// The closed system, in the real bookkeeping:
//   dX/dt  = −4λX + (h_R − h_L) y
//   dz1/dt = 4λ(M_L − z1) − 2J y
//   dz2/dt = 4λ(M_R − z2) + 2J y
//   dy/dt  = (h_L − h_R) X − 4J(z2 − z1) − 4λ y
inline CorrelatorState correlator_rhs(const CorrelatorState& s, const TwoSiteParams& p) {
    CorrelatorState d;
    d.x = -4.0 * p.lambda * s.x + (p.h_r - p.h_l) * s.y;
    d.z1 = 4.0 * p.lambda * (p.m_l() - s.z1) - 2.0 * p.j * s.y;
    d.z2 = 4.0 * p.lambda * (p.m_r() - s.z2) + 2.0 * p.j * s.y;
    d.y = (p.h_l - p.h_r) * s.x - 4.0 * p.j * (s.z2 - s.z1) - 4.0 * p.lambda * s.y;
    return d;
}

inline CorrelatorState correlators_from_state(const Mat& rho) {
    if (rho.rows() != 4) throw std::invalid_argument("correlators_from_state: need a two-site state");
    const TensorSpace space = TensorSpace::spins(2);
    auto ex = [&](Pauli a, Pauli b) {
        return trace_product(site_op(space, 0, a) * site_op(space, 1, b), rho).real();
    };
    CorrelatorState s;
    s.x = ex(Pauli::x, Pauli::x) + ex(Pauli::y, Pauli::y);
    s.y = ex(Pauli::y, Pauli::x) - ex(Pauli::x, Pauli::y);
    s.z1 = trace_product(site_op(space, 0, Pauli::z), rho).real();
    s.z2 = trace_product(site_op(space, 1, Pauli::z), rho).real();
    return s;
}

// ---------------------------------------------------------------- NESS

struct TwoSiteNess {
    double j_s = 0.0;
    double wdot = 0.0;
    double qdot_l = 0.0;
    double qdot_r = 0.0;
    double dis_dt = 0.0;
    CorrelatorState correlators;
};

// j_s = 4λ · 4J²(M_R − M_L) / ((h_L − h_R)² + 16J² + 16λ²), then
// Q̇_L = −h_L j_s, Q̇_R = h_R j_s, Ẇ = (h_L − h_R) j_s and
// d_iS/dt = (β_L h_L − β_R h_R) j_s.
inline TwoSiteNess ness_closed_form(const TwoSiteParams& p) {
    if (!(p.lambda > 0.0)) throw std::invalid_argument("ness_closed_form: lambda must be positive");
    const double ml = p.m_l(), mr = p.m_r();
    const double denom = (p.h_l - p.h_r) * (p.h_l - p.h_r) + 16.0 * p.j * p.j + 16.0 * p.lambda * p.lambda;
    TwoSiteNess n;
    n.j_s = 4.0 * p.lambda * 4.0 * p.j * p.j * (mr - ml) / denom;
    n.qdot_l = -p.h_l * n.j_s;
    n.qdot_r = p.h_r * n.j_s;
    n.wdot = (p.h_l - p.h_r) * n.j_s;
    n.dis_dt = (p.beta_l * p.h_l - p.beta_r * p.h_r) * n.j_s;
    // stationary correlators: y from j_s = −J y, the rest by back substitution
    n.correlators.y = (p.j != 0.0) ? -n.j_s / p.j
                                   : 0.0;
    n.correlators.x = (p.h_r - p.h_l) * n.correlators.y / (4.0 * p.lambda);
    n.correlators.z1 = ml - p.j * n.correlators.y / (2.0 * p.lambda);
    n.correlators.z2 = mr + p.j * n.correlators.y / (2.0 * p.lambda);
    return n;
}

// ---------------------------------------------------------------- integration

// RK4 on the correlator system with the same fixed-step policy as the
// engine, so transient comparisons isolate modeling error.
inline std::vector<std::pair<double, CorrelatorState>> integrate_correlators(
    const CorrelatorState& s0, const TwoSiteParams& p, double t_final, double dt, int stride = 1) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_correlators: dt must be positive");
    auto axpy = [](const CorrelatorState& a, double c, const CorrelatorState& b) {
        return CorrelatorState{a.x + c * b.x, a.y + c * b.y, a.z1 + c * b.z1, a.z2 + c * b.z2};
    };
    std::vector<std::pair<double, CorrelatorState>> out;
    CorrelatorState s = s0;
    out.emplace_back(0.0, s);
    const long n_steps = std::lround(std::ceil(t_final / dt - 1e-9));
    for (long k = 1; k <= n_steps; ++k) {
        const double step = std::min(dt, t_final - (k - 1) * dt);
        const CorrelatorState k1 = correlator_rhs(s, p);
        const CorrelatorState k2 = correlator_rhs(axpy(s, 0.5 * step, k1), p);
        const CorrelatorState k3 = correlator_rhs(axpy(s, 0.5 * step, k2), p);
        const CorrelatorState k4 = correlator_rhs(axpy(s, step, k3), p);
        s.x += step / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.y += step / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        s.z1 += step / 6.0 * (k1.z1 + 2.0 * k2.z1 + 2.0 * k3.z1 + k4.z1);
        s.z2 += step / 6.0 * (k1.z2 + 2.0 * k2.z2 + 2.0 * k3.z2 + k4.z2);
        if (k % stride == 0 || k == n_steps) out.emplace_back(std::min(k * dt, t_final), s);
    }
    return out;
}

// ---------------------------------------------------------------- comparison

struct TwoSiteTraceRow {
    double t;
    CorrelatorState oracle;
    CorrelatorState engine;
};

struct OracleComparison {
    std::vector<TwoSiteTraceRow> trace;
    double max_deviation = 0.0;       // transient, all four correlators
    double ness_deviation = 0.0;      // NESS observables, engine vs closed form
    double ness_js_engine = 0.0;
    double ness_js_closed = 0.0;
    bool pass = false;                // max_deviation ≤ 1e−6
};

// Integrates the correlator system and the full Lindblad equation from the
// same initial data with the same stepper, then compares transients and the
// NESS observables.
inline OracleComparison oracle_vs_engine(const TwoSiteParams& p, const Mat& rho0, double t_final,
                                         double dt = 0.0, int stride = 10) {
    const LindbladModel model = p.model();
    if (dt <= 0.0) dt = default_dt(model);

    EvolveOptions eopt;
    eopt.dt = dt;
    eopt.record_stride = stride;
    const EvolveResult ev = evolve(model, rho0, t_final, eopt);
    const auto oracle = integrate_correlators(correlators_from_state(rho0), p, t_final, dt, stride);

    OracleComparison cmp;
    const size_t n = std::min(ev.samples.size(), oracle.size());
    for (size_t i = 0; i < n; ++i) {
        TwoSiteTraceRow row;
        row.t = ev.samples[i].t;
        row.oracle = oracle[i].second;
        row.engine = correlators_from_state(ev.samples[i].rho);
        const double dev = std::max({std::fabs(row.oracle.x - row.engine.x),
                                     std::fabs(row.oracle.y - row.engine.y),
                                     std::fabs(row.oracle.z1 - row.engine.z1),
                                     std::fabs(row.oracle.z2 - row.engine.z2)});
        cmp.max_deviation = std::max(cmp.max_deviation, dev);
        cmp.trace.push_back(std::move(row));
    }

    const NessResult nr = ness(model);
    const ThermoRecord rates = lindblad_rates(model, nr.rho);
    const TwoSiteNess closed = ness_closed_form(p);
    cmp.ness_js_engine = rates.j_s;
    cmp.ness_js_closed = closed.j_s;
    cmp.ness_deviation = std::max({std::fabs(rates.j_s - closed.j_s),
                                   std::fabs(rates.wdot() - closed.wdot),
                                   std::fabs(rates.qdot_l - closed.qdot_l),
                                   std::fabs(rates.qdot_r - closed.qdot_r),
                                   std::fabs(rates.dis_dt - closed.dis_dt)});
    cmp.pass = cmp.max_deviation <= 1e-6;
    return cmp;
}

}  // namespace spinbath
