// Shared test helpers: seeded random matrices and states.

#pragma once

#include <random>

#include "spinbath/densemat.hpp"

namespace testsupport {

using spinbath::cdouble;
using spinbath::Mat;

inline std::mt19937_64 rng(uint64_t seed = 987654321) { return std::mt19937_64(seed); }

inline Mat random_matrix(std::mt19937_64& gen, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cdouble(g(gen), g(gen));
    return m;
}

inline Mat random_hermitian(std::mt19937_64& gen, int n) {
    return spinbath::hermitized(random_matrix(gen, n, n));
}

// Full-rank density matrix ρ = GG†/Tr(GG†).
inline Mat random_density(std::mt19937_64& gen, int n) {
    const Mat g = random_matrix(gen, n, n);
    Mat rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

}  // namespace testsupport
