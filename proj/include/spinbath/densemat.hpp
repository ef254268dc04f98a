// densemat.hpp — dense complex linear algebra for small Hilbert spaces:
// Kronecker products, partial traces, Hermitian eigendecomposition,
// unitary matrix exponentials and null-space extraction.
//
// Storage is row-major. Vectorization (vec/unvec) is column-stacking:
// vec(A)[j*rows + i] = A(i,j).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinbath {

using cdouble = std::complex<double>;

namespace tol {
// Hermiticity gate relative to ||H||_F
inline constexpr double herm_rel = 1e-10;
// eigendecomposition reconstruction / unitarity
inline constexpr double eig = 1e-10;
// eigenvalues of M†M below this count toward the numerical null space
inline constexpr double null_space = 1e-8;
// allowed negative eigenvalue of a density matrix
inline constexpr double psd = 1e-8;
// floor applied to eigenvalues inside logarithms
inline constexpr double eig_floor = 1e-14;
}  // namespace tol

// ---------------------------------------------------------------- Mat

class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cdouble& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const cdouble& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    cdouble* data() { return a_.data(); }
    const cdouble* data() const { return a_.data(); }
    cdouble* row_ptr(int i) { return a_.data() + size_t(i) * cols_; }
    const cdouble* row_ptr(int i) const { return a_.data() + size_t(i) * cols_; }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o, "operator+=");
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o, "operator-=");
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Mat& operator*=(cdouble s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, cdouble s) { return a *= s; }
    friend Mat operator*(cdouble s, Mat a) { return a *= s; }
    friend Mat operator*(Mat a, double s) { return a *= cdouble(s); }
    friend Mat operator*(double s, Mat a) { return a *= cdouble(s); }

    // GEMM, ikj order so the inner loop streams contiguous rows.
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Mat::operator*: dimension mismatch");
        Mat c(a.rows_, b.cols_);
        const int n = b.cols_;
        for (int i = 0; i < a.rows_; ++i) {
            cdouble* ci = c.row_ptr(i);
            const cdouble* ai = a.row_ptr(i);
            for (int k = 0; k < a.cols_; ++k) {
                const cdouble aik = ai[k];
                if (aik == cdouble(0.0)) continue;
                const cdouble* bk = b.row_ptr(k);
                for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    Mat adjoint() const {
        Mat m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }
    Mat transpose() const {
        Mat m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    Mat conjugate() const {
        Mat m = *this;
        for (auto& v : m.a_) v = std::conj(v);
        return m;
    }

    cdouble trace() const {
        require_square("trace");
        cdouble t = 0.0;
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double fro_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_finite() const {
        for (const auto& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    bool is_hermitian(double tolerance) const {
        if (!square()) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i; j < cols_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tolerance) return false;
        return true;
    }

    Mat column(int j) const {
        Mat c(rows_, 1);
        for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
        return c;
    }

    void require_square(const char* who) const {
        if (!square()) throw std::invalid_argument(std::string(who) + ": matrix not square");
    }

private:
    void check_same_shape(const Mat& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    int rows_ = 0, cols_ = 0;
    std::vector<cdouble> a_;
};

inline Mat hermitized(const Mat& a) {
    Mat h = a.adjoint();
    h += a;
    h *= 0.5;
    return h;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }
inline Mat anticommutator(const Mat& a, const Mat& b) { return a * b + b * a; }

// Tr(A·B) in O(n²), no product formed.
inline cdouble trace_product(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw std::invalid_argument("trace_product: dimension mismatch");
    cdouble t = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        const cdouble* ai = a.row_ptr(i);
        for (int j = 0; j < a.cols(); ++j) t += ai[j] * b(j, i);
    }
    return t;
}

// Real expectation Tr(O·rho) for Hermitian O and rho.
inline double expectation(const Mat& op, const Mat& rho) {
    return trace_product(op, rho).real();
}

inline std::vector<cdouble> gemv(const Mat& a, const std::vector<cdouble>& x) {
    if (a.cols() != int(x.size())) throw std::invalid_argument("gemv: dimension mismatch");
    std::vector<cdouble> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const cdouble* ai = a.row_ptr(i);
        cdouble s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

// ---------------------------------------------------------------- kron

inline Mat kron(const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ia = 0; ia < a.rows(); ++ia)
        for (int ja = 0; ja < a.cols(); ++ja) {
            const cdouble av = a(ia, ja);
            if (av == cdouble(0.0)) continue;
            for (int ib = 0; ib < b.rows(); ++ib) {
                cdouble* krow = k.row_ptr(ia * b.rows() + ib) + size_t(ja) * b.cols();
                const cdouble* brow = b.row_ptr(ib);
                for (int jb = 0; jb < b.cols(); ++jb) krow[jb] += av * brow[jb];
            }
        }
    return k;
}

// ---------------------------------------------------------------- TensorSpace

// Ordered tensor factorization of a Hilbert space. The leftmost factor is
// the slowest index: basis state |i0 i1 ... im> has linear index
// ((i0*d1 + i1)*d2 + i2)*...  — consistent with kron(factor0, kron(factor1, ...)).
struct TensorSpace {
    std::vector<int> factor_dims;

    TensorSpace() = default;
    explicit TensorSpace(std::vector<int> dims) : factor_dims(std::move(dims)) {
        for (int d : factor_dims)
            if (d < 1) throw std::invalid_argument("TensorSpace: factor dim < 1");
    }
    static TensorSpace spins(int n) { return TensorSpace(std::vector<int>(n, 2)); }

    int n_factors() const { return int(factor_dims.size()); }
    int total_dim() const {
        long long d = 1;
        for (int f : factor_dims) d *= f;
        return int(d);
    }
    // stride of factor f: product of dims to its right
    std::vector<int> strides() const {
        std::vector<int> s(factor_dims.size(), 1);
        for (int f = n_factors() - 2; f >= 0; --f) s[f] = s[f + 1] * factor_dims[f + 1];
        return s;
    }
};

// Trace out all factors not in `keep`; kept factors retain their relative order.
inline Mat partial_trace(const Mat& o, const TensorSpace& space, const std::vector<int>& keep) {
    if (!o.square() || o.rows() != space.total_dim())
        throw std::invalid_argument("partial_trace: operator does not match space");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set empty");
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw std::invalid_argument("partial_trace: duplicate kept factor");
    if (kept.front() < 0 || kept.back() >= space.n_factors())
        throw std::invalid_argument("partial_trace: kept factor out of range");

    std::vector<int> traced;
    for (int f = 0; f < space.n_factors(); ++f)
        if (!std::binary_search(kept.begin(), kept.end(), f)) traced.push_back(f);

    const auto strides = space.strides();
    auto offsets = [&](const std::vector<int>& factors) {
        int dim = 1;
        for (int f : factors) dim *= space.factor_dims[f];
        std::vector<int> off(dim, 0);
        for (int idx = 0; idx < dim; ++idx) {
            int rest = idx;
            for (int p = int(factors.size()) - 1; p >= 0; --p) {
                const int f = factors[p];
                off[idx] += (rest % space.factor_dims[f]) * strides[f];
                rest /= space.factor_dims[f];
            }
        }
        return off;
    };
    const std::vector<int> kept_off = offsets(kept);
    const std::vector<int> traced_off = traced.empty() ? std::vector<int>{0} : offsets(traced);

    Mat out(int(kept_off.size()), int(kept_off.size()));
    for (size_t a = 0; a < kept_off.size(); ++a)
        for (size_t b = 0; b < kept_off.size(); ++b) {
            cdouble s = 0.0;
            for (int t : traced_off) s += o(kept_off[a] + t, kept_off[b] + t);
            out(int(a), int(b)) = s;
        }
    return out;
}

// ---------------------------------------------------------------- vec / unvec

// Column-stacking: vec(A)[j*n + i] = A(i,j), so vec(A X B) = (Bᵀ ⊗ A) vec(X).
inline std::vector<cdouble> vec(const Mat& a) {
    std::vector<cdouble> v(size_t(a.rows()) * a.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) v[size_t(j) * a.rows() + i] = a(i, j);
    return v;
}

inline Mat unvec(const std::vector<cdouble>& v, int n) {
    if (int(v.size()) != n * n) throw std::invalid_argument("unvec: size mismatch");
    Mat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = v[size_t(j) * n + i];
    return a;
}

// ---------------------------------------------------------------- herm_eig

struct EigResult {
    std::vector<double> values;  // ascending
    Mat vectors;                 // unitary; column k pairs with values[k]
};

// Hermitian eigendecomposition: Householder tridiagonalization followed by
// implicit QL with Wilkinson shifts. Throws if the input fails the
// Hermiticity gate tol::herm_rel · ||H||_F.
inline EigResult herm_eig(const Mat& h) {
    h.require_square("herm_eig");
    const int n = h.rows();
    const double hnorm = h.fro_norm();
    {
        double asym = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) asym += std::norm(h(i, j) - std::conj(h(j, i)));
        if (std::sqrt(asym) > tol::herm_rel * std::max(hnorm, 1.0))
            throw std::invalid_argument("herm_eig: input is not Hermitian within tolerance");
    }

    Mat a = hermitized(h);
    Mat q = Mat::identity(n);
    std::vector<double> d(n), e(n, 0.0);  // e[n-1] is QL scratch

    // Householder reduction to tridiagonal form, accumulating Q.
    std::vector<cdouble> v(n), p(n), w(n);
    for (int k = 0; k + 2 < n; ++k) {
        double colnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) colnorm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(colnorm2);
        if (xnorm == 0.0) continue;  // column already in tridiagonal form

        const cdouble x0 = a(k + 1, k);
        const double ax0 = std::abs(x0);
        const cdouble phase = (ax0 > 0.0) ? x0 / ax0 : cdouble(1.0);
        const cdouble alpha = -phase * xnorm;

        v[k + 1] = x0 - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
        const double vnorm2 = 2.0 * xnorm * (xnorm + ax0);
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;

        // p = beta · A v over the trailing block
        for (int i = k + 1; i < n; ++i) {
            cdouble s = 0.0;
            const cdouble* ai = a.row_ptr(i);
            for (int j = k + 1; j < n; ++j) s += ai[j] * v[j];
            p[i] = beta * s;
        }
        cdouble vp = 0.0;
        for (int i = k + 1; i < n; ++i) vp += std::conj(v[i]) * p[i];
        const cdouble kappa = 0.5 * beta * vp;
        for (int i = k + 1; i < n; ++i) w[i] = p[i] - kappa * v[i];

        // A ← A − v w† − w v† (trailing block)
        for (int i = k + 1; i < n; ++i) {
            cdouble* ai = a.row_ptr(i);
            const cdouble vi = v[i], wi = w[i];
            for (int j = k + 1; j < n; ++j) ai[j] -= vi * std::conj(w[j]) + wi * std::conj(v[j]);
        }
        a(k + 1, k) = alpha;
        a(k, k + 1) = std::conj(alpha);
        for (int i = k + 2; i < n; ++i) { a(i, k) = 0.0; a(k, i) = 0.0; }

        // Q ← Q (I − beta v v†)
        for (int r = 0; r < n; ++r) {
            cdouble* qr = q.row_ptr(r);
            cdouble s = 0.0;
            for (int j = k + 1; j < n; ++j) s += qr[j] * v[j];
            s *= beta;
            for (int j = k + 1; j < n; ++j) qr[j] -= s * std::conj(v[j]);
        }
    }

    // Diagonal phase rotation making the subdiagonal real nonnegative:
    // with u_{k+1} = t_k u_k / |t_k|, conj(u_{k+1}) t_k u_k = |t_k|.
    {
        std::vector<cdouble> dual(n, cdouble(1.0));
        for (int k = 0; k + 1 < n; ++k) {
            const cdouble t = a(k + 1, k);
            const double at = std::abs(t);
            e[k] = at;
            dual[k + 1] = (at > 0.0) ? t * dual[k] / at : dual[k];
        }
        for (int k = 0; k < n; ++k) {
            if (dual[k] == cdouble(1.0)) continue;
            for (int r = 0; r < n; ++r) q(r, k) *= dual[k];
        }
        for (int k = 0; k < n; ++k) d[k] = a(k, k).real();
    }

    // Implicit QL with Wilkinson shifts, rotations folded into Q.
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("herm_eig: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, pshift = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pshift;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pshift;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pshift = s * r;
                    d[i + 1] = g + pshift;
                    g = c * r - b;
                    for (int rr = 0; rr < n; ++rr) {
                        const cdouble f2 = q(rr, i + 1);
                        q(rr, i + 1) = s * q(rr, i) + c * f2;
                        q(rr, i) = c * q(rr, i) - s * f2;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= pshift;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    // ascending sort
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
    EigResult res;
    res.values.resize(n);
    res.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        res.values[k] = d[order[k]];
        for (int r = 0; r < n; ++r) res.vectors(r, k) = q(r, order[k]);
    }
    return res;
}

// Apply f to the spectrum of Hermitian h: V diag(f(λ)) V†.
inline Mat herm_function(const Mat& h, const std::function<cdouble(double)>& f) {
    const EigResult eig = herm_eig(h);
    const int n = h.rows();
    Mat scaled = eig.vectors;
    for (int k = 0; k < n; ++k) {
        const cdouble fk = f(eig.values[k]);
        for (int r = 0; r < n; ++r) scaled(r, k) *= fk;
    }
    return scaled * eig.vectors.adjoint();
}

// U = e^{−iHt}; exactly unitary up to round-off by construction.
inline Mat expm_unitary(const Mat& h, double t) {
    return herm_function(h, [t](double lam) {
        return std::exp(cdouble(0.0, -lam * t));
    });
}

// ---------------------------------------------------------------- LU

struct LuFactors {
    Mat lu;                 // unit-lower L below diagonal, U on/above
    std::vector<int> piv;   // row swapped with k at step k
    double min_pivot = 0.0;
    double max_pivot = 0.0;
};

inline LuFactors lu_factor(Mat a) {
    a.require_square("lu_factor");
    const int n = a.rows();
    LuFactors f;
    f.piv.resize(n);
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
    f.min_pivot = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        int pr = k;
        double pm = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = std::abs(a(i, k));
            if (m > pm) { pm = m; pr = i; }
        }
        f.piv[k] = pr;
        if (pr != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
        cdouble pivot = a(k, k);
        if (pivot == cdouble(0.0)) {
            // exactly singular: nudge so inverse iteration can proceed
            pivot = scale * std::numeric_limits<double>::epsilon();
            a(k, k) = pivot;
        }
        f.min_pivot = std::min(f.min_pivot, std::abs(pivot));
        f.max_pivot = std::max(f.max_pivot, std::abs(pivot));
        const cdouble inv = 1.0 / pivot;
        const cdouble* ak = a.row_ptr(k);
        for (int i = k + 1; i < n; ++i) {
            cdouble* ai = a.row_ptr(i);
            const cdouble lik = ai[k] * inv;
            ai[k] = lik;
            if (lik == cdouble(0.0)) continue;
            for (int j = k + 1; j < n; ++j) ai[j] -= lik * ak[j];
        }
    }
    f.lu = std::move(a);
    return f;
}

inline std::vector<cdouble> lu_solve(const LuFactors& f, std::vector<cdouble> b) {
    const int n = f.lu.rows();
    if (int(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");
    // row interchanges first (in factorization order), then the triangular solves
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (int k = 0; k < n; ++k) {
        const cdouble bk = b[k];
        if (bk == cdouble(0.0)) continue;
        for (int i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * bk;
    }
    for (int i = n - 1; i >= 0; --i) {
        cdouble s = b[i];
        const cdouble* ri = f.lu.row_ptr(i);
        for (int j = i + 1; j < n; ++j) s -= ri[j] * b[j];
        b[i] = s / ri[i];
    }
    return b;
}

// ---------------------------------------------------------------- null_vector

struct NullVectorResult {
    Mat vector;        // n×1, unit norm
    double residual;   // smallest eigenvalue of M†M (or ||Mx||² on the LU path)
    int multiplicity;  // count of M†M eigenvalues below tol_null
};

namespace detail {

// Direct path: full spectrum of M†M. Matches the kernel contract exactly
// and is used whenever the dimension allows.
inline NullVectorResult null_vector_eig(const Mat& m, double tol_null) {
    const Mat k = hermitized(m.adjoint() * m);
    const EigResult eig = herm_eig(k);
    NullVectorResult r;
    r.vector = eig.vectors.column(0);
    r.residual = std::max(eig.values.front(), 0.0);
    r.multiplicity = 0;
    for (double lam : eig.values)
        if (lam < tol_null) ++r.multiplicity;
    return r;
}

// Large dimensions: inverse iteration through an LU factorization of M.
// The null direction is the dominant mode of M⁻¹; pivot magnitudes stand in
// for singular values in the multiplicity count.
inline NullVectorResult null_vector_lu(const Mat& m, double tol_null) {
    const int n = m.rows();
    const LuFactors f = lu_factor(m);

    std::vector<cdouble> x(n, 1.0 / std::sqrt(double(n)));
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<cdouble> best = x;
    for (int it = 0; it < 8; ++it) {
        std::vector<cdouble> y = lu_solve(f, x);
        double nrm = 0.0;
        for (const auto& v : y) nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
        for (auto& v : y) v /= nrm;
        x = std::move(y);
        const std::vector<cdouble> mx = gemv(m, x);
        double res = 0.0;
        for (const auto& v : mx) res += std::norm(v);
        res = std::sqrt(res);
        if (res < best_res) {
            best_res = res;
            best = x;
            if (res < 1e-14 * std::max(1.0, f.max_pivot)) break;
        } else {
            break;  // stalled
        }
    }

    NullVectorResult r;
    r.vector = Mat(n, 1);
    for (int i = 0; i < n; ++i) r.vector(i, 0) = best[i];
    r.residual = best_res * best_res;
    r.multiplicity = 0;
    const double pivot_gate = std::sqrt(tol_null) * std::max(f.max_pivot, 1e-300);
    for (int k = 0; k < n; ++k)
        if (std::abs(f.lu(k, k)) <= pivot_gate) ++r.multiplicity;
    if (r.residual < tol_null && r.multiplicity == 0) r.multiplicity = 1;
    return r;
}

}  // namespace detail

enum class NullMethod { automatic, eig, lu };

inline NullVectorResult null_vector(const Mat& m, double tol_null = tol::null_space,
                                    NullMethod method = NullMethod::automatic) {
    m.require_square("null_vector");
    if (method == NullMethod::automatic)
        method = (m.rows() <= 320) ? NullMethod::eig : NullMethod::lu;
    return method == NullMethod::eig ? detail::null_vector_eig(m, tol_null)
                                     : detail::null_vector_lu(m, tol_null);
}

}  // namespace spinbath
