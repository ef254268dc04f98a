// entropy.hpp — von Neumann and relative entropy with the 0·ln 0 = 0
// convention. k_B = 1, natural logarithms throughout.

#pragma once

#include <cmath>

#include "spinbath/densemat.hpp"

namespace spinbath {

// S(rho) = −Tr(rho ln rho)
inline double vn_entropy(const Mat& rho) {
    const EigResult eig = herm_eig(rho);
    double s = 0.0;
    for (double p : eig.values)
        if (p > 0.0) s -= p * std::log(p);
    return s;
}

// ln of a positive semidefinite operator, eigenvalues floored at `floor`.
inline Mat ln_psd(const Mat& rho, double floor = tol::eig_floor) {
    return herm_function(rho, [floor](double p) {
        return cdouble(std::log(std::max(p, floor)), 0.0);
    });
}

// D(a||b) = Tr(a ln a) − Tr(a ln b). The floor applies to b only; a uses
// the 0·ln 0 = 0 convention.
inline double rel_entropy(const Mat& a, const Mat& b, double floor = tol::eig_floor) {
    if (a.rows() != b.rows() || !a.square() || !b.square())
        throw std::invalid_argument("rel_entropy: shape mismatch");
    const EigResult ea = herm_eig(a);
    double tr_a_ln_a = 0.0;
    for (double p : ea.values)
        if (p > 0.0) tr_a_ln_a += p * std::log(p);
    const double tr_a_ln_b = trace_product(a, ln_psd(b, floor)).real();
    return tr_a_ln_a - tr_a_ln_b;
}

inline double purity(const Mat& rho) { return trace_product(rho, rho).real(); }

}  // namespace spinbath
