#pragma once

// Dense and tridiagonal symmetric eigensolvers (Householder reduction plus
// implicit-shift QL).  Deterministic: ascending eigenvalues, and each
// eigenvector is flipped so its largest-magnitude component (first such
// index on ties) is positive.  No randomness, no threading, so repeated
// calls on the same input are bit-identical.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace spinlab {

struct EigenDecomposition {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column-major, n rows per column; empty if not requested
    int dim = 0;                  // rows of the source matrix

    bool has_vectors() const { return !vectors.empty(); }
    const double* vector(int i) const {
        return vectors.data() + static_cast<std::size_t>(i) * dim;
    }
};

namespace detail {

inline void require_finite(std::span<const double> v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

// QL with implicit Wilkinson shifts on (d, e); e[i] couples i and i+1 with
// e[n-1] as scratch.  z, if given, is a column-major n x n matrix whose
// columns accumulate the rotations.  Throws after 50 sweeps on any single
// eigenvalue, which for symmetric tridiagonal input indicates corrupted
// (non-finite) data rather than slow convergence.
//
// Deflation combines the usual neighbour-relative test with an absolute
// floor of eps times the matrix scale.  Heavily graded input (Gram matrices
// of low-rank reduced states produce diagonals spanning hundreds of decades)
// otherwise stalls: couplings far below the matrix scale carry no spectral
// information, yet never pass the relative test against their equally tiny
// neighbours.  Dropping them perturbs eigenvalues by no more than the
// solver's inherent O(eps * ||T||) backward error.
inline void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e,
                              double* z, int n) {
    constexpr int kMaxSweeps = 50;
    const double eps = std::numeric_limits<double>::epsilon();
    e[n - 1] = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]) + std::abs(e[i]));
    const double floor = eps * scale;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= floor) break;
            }
            if (m != l) {
                if (iter++ == kMaxSweeps)
                    throw std::runtime_error("ql_implicit_shift: sweep limit exceeded");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {  // deflated; skip the rest of the sweep
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        double* zi = z + static_cast<std::size_t>(i) * n;
                        double* zj = zi + n;
                        for (int k = 0; k < n; ++k) {
                            f = zj[k];
                            zj[k] = s * zi[k] + c * f;
                            zi[k] = c * zi[k] - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Rows whose 1-norm is this small cannot be normalized (the reciprocal of a
// subnormal overflows) and are spectrally indistinguishable from zero in any
// reasonably scaled matrix, so the reductions below leave them untouched.
// Gram matrices of low-rank reduced states do produce such rows.
inline constexpr double kNegligibleRowScale = std::numeric_limits<double>::min();

// Householder reduction of a symmetric matrix (row-major, lower triangle
// referenced) to tridiagonal form, eigenvalues-only variant: the transform
// is not accumulated.  On return d holds the diagonal and e[i] the coupling
// between i and i-1 (e[0] unused).  a is destroyed.
inline void tridiagonalize(double* a, int n, double* d, double* e) {
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double* ai = a + static_cast<std::size_t>(i) * n;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::abs(ai[k]);
            if (scale < kNegligibleRowScale) {
                e[i] = ai[l];
            } else {
                const double inv = 1.0 / scale;
                for (int k = 0; k <= l; ++k) {
                    ai[k] *= inv;
                    h += ai[k] * ai[k];
                }
                double f = ai[l];
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                ai[l] = f - g;
                // p = A u / h, fused lower-triangle symv using e as scratch
                for (int j = 0; j <= l; ++j) e[j] = 0.0;
                for (int j = 0; j <= l; ++j) {
                    const double uj = ai[j];
                    const double* aj = a + static_cast<std::size_t>(j) * n;
                    double s = aj[j] * uj;
                    for (int k = 0; k < j; ++k) {
                        s += aj[k] * ai[k];
                        e[k] += aj[k] * uj;
                    }
                    e[j] += s;
                }
                double up = 0.0;
                for (int j = 0; j <= l; ++j) {
                    e[j] /= h;
                    up += e[j] * ai[j];
                }
                const double hh = up / (2.0 * h);
                for (int j = 0; j <= l; ++j) e[j] -= hh * ai[j];  // q = p - K u
                for (int j = 0; j <= l; ++j) {
                    const double uj = ai[j], qj = e[j];
                    double* aj = a + static_cast<std::size_t>(j) * n;
                    for (int k = 0; k <= j; ++k) aj[k] -= uj * e[k] + qj * ai[k];
                }
            }
        } else {
            e[i] = ai[l];
        }
    }
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) d[i] = a[static_cast<std::size_t>(i) * n + i];
}

// Full tred2: as above but accumulating the orthogonal transform, which
// replaces a (row-major, column i of a ends up as basis vector i).
inline void tridiagonalize_with_q(double* a, int n, double* d, double* e) {
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double* ai = a + static_cast<std::size_t>(i) * n;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(ai[k]);
            if (scale < kNegligibleRowScale) {
                e[i] = ai[l];
            } else {
                for (int k = 0; k <= l; ++k) {
                    ai[k] /= scale;
                    h += ai[k] * ai[k];
                }
                double f = ai[l];
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                ai[l] = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    a[static_cast<std::size_t>(j) * n + i] = ai[j] / h;
                    g = 0.0;
                    const double* aj = a + static_cast<std::size_t>(j) * n;
                    for (int k = 0; k <= j; ++k) g += aj[k] * ai[k];
                    for (int k = j + 1; k <= l; ++k)
                        g += a[static_cast<std::size_t>(k) * n + j] * ai[k];
                    e[j] = g / h;
                    f += e[j] * ai[j];
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = ai[j];
                    g = e[j] - hh * f;
                    e[j] = g;
                    double* aj = a + static_cast<std::size_t>(j) * n;
                    for (int k = 0; k <= j; ++k) aj[k] -= f * e[k] + g * ai[k];
                }
            }
        } else {
            e[i] = ai[l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        double* aii = a + static_cast<std::size_t>(i) * n;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k)
                    g += aii[k] * a[static_cast<std::size_t>(k) * n + j];
                for (int k = 0; k <= l; ++k)
                    a[static_cast<std::size_t>(k) * n + j] -=
                        g * a[static_cast<std::size_t>(k) * n + i];
            }
        }
        d[i] = aii[i];
        aii[i] = 1.0;
        for (int j = 0; j <= l; ++j) {
            a[static_cast<std::size_t>(j) * n + i] = 0.0;
            aii[j] = 0.0;
        }
    }
}

// Sort ascending and fix signs; z (if present) is column-major.
inline EigenDecomposition finalize(std::vector<double>&& d,
                                   std::vector<double>&& z, int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return d[a] < d[b]; });
    EigenDecomposition out;
    out.dim = n;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = d[order[i]];
    if (!z.empty()) {
        out.vectors.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            const double* src = z.data() + static_cast<std::size_t>(order[i]) * n;
            double* dst = out.vectors.data() + static_cast<std::size_t>(i) * n;
            int peak = 0;
            double best = 0.0;
            for (int k = 0; k < n; ++k) {
                const double mag = std::abs(src[k]);
                if (mag > best) {
                    best = mag;
                    peak = k;
                }
            }
            const double flip = (src[peak] < 0.0) ? -1.0 : 1.0;
            for (int k = 0; k < n; ++k) dst[k] = flip * src[k];
        }
    }
    return out;
}

}  // namespace detail

// Symmetric tridiagonal eigenproblem; offdiag[i] couples i and i+1.
inline EigenDecomposition eig_tridiagonal(std::span<const double> diag,
                                          std::span<const double> offdiag,
                                          bool want_vectors) {
    const int n = static_cast<int>(diag.size());
    if (n < 1)
        throw std::invalid_argument("eig_tridiagonal: empty matrix");
    if (offdiag.size() + 1 != diag.size())
        throw std::invalid_argument("eig_tridiagonal: offdiag size must be n - 1");
    detail::require_finite(diag, "eig_tridiagonal");
    detail::require_finite(offdiag, "eig_tridiagonal");

    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    std::vector<double> z;
    if (want_vectors) {
        z.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    if (n > 1) detail::ql_implicit_shift(d, e, z.empty() ? nullptr : z.data(), n);
    else if (want_vectors) z[0] = 1.0;
    return detail::finalize(std::move(d), std::move(z), n);
}

// Dense symmetric eigenproblem, row-major n x n input.  The matrix must be
// symmetric to 1e-10 relative to its largest entry.
inline EigenDecomposition eig_dense_symmetric(std::span<const double> a, int n,
                                              bool want_vectors) {
    if (n < 1) throw std::invalid_argument("eig_dense_symmetric: empty matrix");
    if (a.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("eig_dense_symmetric: size is not n*n");
    detail::require_finite(a, "eig_dense_symmetric");
    double amax = 0.0;
    for (double x : a) amax = std::max(amax, std::abs(x));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double gap = std::abs(a[static_cast<std::size_t>(i) * n + j] -
                                        a[static_cast<std::size_t>(j) * n + i]);
            if (gap > 1e-10 * std::max(amax, 1.0))
                throw std::invalid_argument("eig_dense_symmetric: matrix is not symmetric");
        }

    std::vector<double> work(a.begin(), a.end());
    std::vector<double> d(n), e(n);
    std::vector<double> z;
    if (want_vectors) {
        detail::tridiagonalize_with_q(work.data(), n, d.data(), e.data());
        // transpose the row-major transform into column-major rotation storage
        z.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                z[static_cast<std::size_t>(i) * n + k] = work[static_cast<std::size_t>(k) * n + i];
    } else {
        detail::tridiagonalize(work.data(), n, d.data(), e.data());
    }
    // shift couplings from (i, i-1) to (i, i+1) indexing
    for (int i = 0; i + 1 < n; ++i) e[i] = e[i + 1];
    e[n - 1] = 0.0;
    if (n > 1) detail::ql_implicit_shift(d, e, z.empty() ? nullptr : z.data(), n);
    return detail::finalize(std::move(d), std::move(z), n);
}

// Diagnostics used by the verification suite.

inline double orthonormality_defect(const EigenDecomposition& ed) {
    if (!ed.has_vectors()) throw std::invalid_argument("orthonormality_defect: no vectors");
    const int n = ed.dim;
    const int m = static_cast<int>(ed.values.size());
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double* vi = ed.vector(i);
            const double* vj = ed.vector(j);
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += vi[k] * vj[k];
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

// max_i || T v_i - lambda_i v_i ||_2 for a tridiagonal T.
inline double max_residual_tridiagonal(std::span<const double> diag,
                                       std::span<const double> offdiag,
                                       const EigenDecomposition& ed) {
    if (!ed.has_vectors()) throw std::invalid_argument("max_residual_tridiagonal: no vectors");
    const int n = ed.dim;
    double worst = 0.0;
    for (int i = 0; i < static_cast<int>(ed.values.size()); ++i) {
        const double* v = ed.vector(i);
        const double lam = ed.values[i];
        double norm2 = 0.0;
        for (int k = 0; k < n; ++k) {
            double r = diag[k] * v[k] - lam * v[k];
            if (k > 0) r += offdiag[k - 1] * v[k - 1];
            if (k + 1 < n) r += offdiag[k] * v[k + 1];
            norm2 += r * r;
        }
        worst = std::max(worst, std::sqrt(norm2));
    }
    return worst;
}

inline double max_abs_tridiagonal(std::span<const double> diag,
                                  std::span<const double> offdiag) {
    double m = 0.0;
    for (double x : diag) m = std::max(m, std::abs(x));
    for (double x : offdiag) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace spinlab
