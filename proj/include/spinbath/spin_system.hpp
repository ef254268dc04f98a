// spin_system.hpp — spin-1/2 operators, XY/XX chain Hamiltonians, boundary
// couplings to bath copies, and single-spin thermal states.
//
// Conventions (fixed project-wide):
//   * computational |0> is the σ^z = +1 ("up") eigenvector,
//     σ^+ = |up><down| = (σ^x + iσ^y)/2;
//   * factor order of an extended register is
//     [left bath copy] ⊗ [site 1 ... site N] ⊗ [right bath copy];
//   * ħ = k_B = 1.

#pragma once

#include <cmath>
#include <vector>

#include "spinbath/densemat.hpp"

namespace spinbath {

enum class Side { left, right };
enum class Pauli { x, y, z, plus, minus };

inline const char* side_name(Side s) { return s == Side::left ? "L" : "R"; }

inline Mat pauli_matrix(Pauli p) {
    Mat m(2, 2);
    switch (p) {
        case Pauli::x: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case Pauli::y: m(0, 1) = cdouble(0.0, -1.0); m(1, 0) = cdouble(0.0, 1.0); break;
        case Pauli::z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        case Pauli::plus: m(0, 1) = 1.0; break;   // |up><down|
        case Pauli::minus: m(1, 0) = 1.0; break;  // |down><up|
    }
    return m;
}

// Pauli operator on one factor of a spin register, identity elsewhere.
inline Mat site_op(const TensorSpace& space, int factor, Pauli p) {
    if (factor < 0 || factor >= space.n_factors())
        throw std::invalid_argument("site_op: factor out of range");
    if (space.factor_dims[factor] != 2)
        throw std::invalid_argument("site_op: factor is not a spin");
    Mat op = Mat::identity(1);
    for (int f = 0; f < space.n_factors(); ++f)
        op = kron(op, f == factor ? pauli_matrix(p) : Mat::identity(space.factor_dims[f]));
    return op;
}

// ---------------------------------------------------------------- layout

// Chain sites plus optionally attached bath copies, in the fixed order
// [left copy] ⊗ [sites] ⊗ [right copy]. Sites are 1-based.
struct SpinLayout {
    int n_sites = 0;
    bool left_copy = false;
    bool right_copy = false;

    int n_factors() const { return n_sites + (left_copy ? 1 : 0) + (right_copy ? 1 : 0); }
    int dim() const { return 1 << n_factors(); }
    TensorSpace space() const { return TensorSpace::spins(n_factors()); }

    int site_factor(int site) const {
        if (site < 1 || site > n_sites) throw std::invalid_argument("SpinLayout: site out of range");
        return (left_copy ? 1 : 0) + site - 1;
    }
    int copy_factor(Side s) const {
        if (s == Side::left) {
            if (!left_copy) throw std::invalid_argument("SpinLayout: no left copy");
            return 0;
        }
        if (!right_copy) throw std::invalid_argument("SpinLayout: no right copy");
        return n_factors() - 1;
    }
    int boundary_site(Side s) const { return s == Side::left ? 1 : n_sites; }

    std::vector<int> site_factors() const {
        std::vector<int> f(n_sites);
        for (int j = 1; j <= n_sites; ++j) f[j - 1] = site_factor(j);
        return f;
    }
    std::vector<int> copy_factors() const {
        std::vector<int> f;
        if (left_copy) f.push_back(copy_factor(Side::left));
        if (right_copy) f.push_back(copy_factor(Side::right));
        return f;
    }

    // Embed a system-space operator, identity on the copies.
    Mat embed_system(const Mat& op) const {
        if (op.rows() != (1 << n_sites)) throw std::invalid_argument("embed_system: dimension mismatch");
        Mat m = left_copy ? kron(Mat::identity(2), op) : op;
        return right_copy ? kron(m, Mat::identity(2)) : m;
    }
};

// ---------------------------------------------------------------- chain

struct ChainSpec {
    int n_sites = 1;
    std::vector<double> h;  // local fields h_j, one per site
    double jx = 0.0;
    double jy = 0.0;

    void validate() const {
        if (n_sites < 1) throw std::invalid_argument("ChainSpec: need at least one site");
        if (int(h.size()) != n_sites) throw std::invalid_argument("ChainSpec: field list length != N");
        for (double hj : h)
            if (!std::isfinite(hj)) throw std::invalid_argument("ChainSpec: non-finite field");
        if (!std::isfinite(jx) || !std::isfinite(jy)) throw std::invalid_argument("ChainSpec: non-finite coupling");
    }
    int dim() const { return 1 << n_sites; }
};

inline ChainSpec uniform_chain(int n, double h, double jx, double jy) {
    return ChainSpec{n, std::vector<double>(size_t(n), h), jx, jy};
}

// H_S = 1/2 Σ_j h_j σ_j^z − Σ_j (J_x σ^x_j σ^x_{j+1} + J_y σ^y_j σ^y_{j+1})
inline Mat chain_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    const TensorSpace space = TensorSpace::spins(spec.n_sites);
    Mat h = Mat::zero(spec.dim(), spec.dim());
    for (int j = 0; j < spec.n_sites; ++j)
        h += (0.5 * spec.h[j]) * site_op(space, j, Pauli::z);
    for (int j = 0; j + 1 < spec.n_sites; ++j) {
        h -= spec.jx * (site_op(space, j, Pauli::x) * site_op(space, j + 1, Pauli::x));
        h -= spec.jy * (site_op(space, j, Pauli::y) * site_op(space, j + 1, Pauli::y));
    }
    return h;
}

// Total magnetization Σ_j σ_j^z on the chain space.
inline Mat total_sz(int n_sites) {
    const TensorSpace space = TensorSpace::spins(n_sites);
    Mat m = Mat::zero(1 << n_sites, 1 << n_sites);
    for (int j = 0; j < n_sites; ++j) m += site_op(space, j, Pauli::z);
    return m;
}

// ---------------------------------------------------------------- baths

struct BathSpec {
    Side side = Side::left;
    double beta = 1.0;    // inverse temperature, ≥ 0
    double h = 1.0;       // copy field
    double lambda = 1.0;  // coupling rate, > 0

    void validate() const {
        if (!(beta >= 0.0)) throw std::invalid_argument("BathSpec: beta must be >= 0");
        if (!(lambda > 0.0)) throw std::invalid_argument("BathSpec: lambda must be > 0");
        if (!std::isfinite(h)) throw std::invalid_argument("BathSpec: non-finite field");
    }
};

// Single-spin thermal state ω_β = e^{−βhσ^z/2}/Z.
struct ThermalSpinState {
    double beta = 0.0;
    double h = 0.0;
    Mat matrix;            // 2×2, diagonal in the σ^z basis
    double magnetization;  // Tr(σ^z ω) = −tanh(βh/2)
    double z;              // partition normalizer 2 cosh(βh/2)
};

inline ThermalSpinState thermal_spin(double beta, double h) {
    ThermalSpinState s;
    s.beta = beta;
    s.h = h;
    const double x = beta * h;
    // populations written via the stable sigmoid: p_up = 1/(1+e^x)
    const double p_up = 1.0 / (1.0 + std::exp(x));
    s.matrix = Mat(2, 2);
    s.matrix(0, 0) = p_up;
    s.matrix(1, 1) = 1.0 - p_up;
    s.magnetization = -std::tanh(0.5 * x);
    s.z = 2.0 * std::cosh(0.5 * x);
    return s;
}

// Copy Hamiltonian H_r = (h_r/2) σ_r^z as a 2×2 block.
inline Mat copy_hamiltonian(double h) {
    Mat m = pauli_matrix(Pauli::z);
    m *= 0.5 * h;
    return m;
}

// V_r = strength · (σ_r^x σ_b^x + σ_r^y σ_b^y) with b the boundary site of
// the given side, on the layout's full space.
inline Mat boundary_coupling(const SpinLayout& layout, Side side, double strength) {
    const TensorSpace space = layout.space();
    const int c = layout.copy_factor(side);
    const int b = layout.site_factor(layout.boundary_site(side));
    Mat v = site_op(space, c, Pauli::x) * site_op(space, b, Pauli::x) +
            site_op(space, c, Pauli::y) * site_op(space, b, Pauli::y);
    v *= strength;
    return v;
}

// ---------------------------------------------------------------- states

inline Mat maximally_mixed(int dim) {
    Mat rho = Mat::identity(dim);
    rho *= 1.0 / dim;
    return rho;
}

// ⊗_j ω_β(h_j σ_j^z / 2): product of single-spin thermal states.
inline Mat thermal_product_state(double beta, const std::vector<double>& fields) {
    Mat rho = Mat::identity(1);
    for (double h : fields) rho = kron(rho, thermal_spin(beta, h).matrix);
    return rho;
}

}  // namespace spinbath
