#pragma once

// Entanglement of permutation-symmetric states across qubit bipartitions.
//
// A symmetric state of N = N_A + N_B qubits decomposes over joint Dicke
// labels (q excitations in A, kb in B) with amplitude c_{q+kb} A(q, q+kb),
//
//   A(q, K)^2 = C(N_A, q) C(N_B, K - q) / C(N, K),
//
// so the reduced state of A lives in A's symmetric sector and its matrix is
// the Gram matrix of the rows M[q][kb].  A(q, K) is a hypergeometric
// amplitude concentrated near q = K N_A / N; rows are therefore stored as
// bands, entries below 2^-64 dropped.  The dropped mass is below dim * 2^-128
// per matrix element, far under every tolerance used here.
//
// All entropies are von Neumann entropies in bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spinlab/eigensolve.hpp"
#include "spinlab/symspace.hpp"

namespace spinlab {

struct ReducedDensityMatrix {
    int dim = 0;
    std::vector<double> entries;  // row-major

    double at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * dim + j];
    }
    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim; ++i) t += at(i, i);
        return t;
    }
};

namespace detail {

// -sum lambda log2 lambda with clamping.  Eigenvalues in [-neg_tol, 0) are
// rounded to zero (solver noise on a PSD matrix); anything more negative is
// a genuine invalid density.
inline double entropy_bits(std::span<const double> lambda, double neg_tol) {
    double s = 0.0;
    for (double v : lambda) {
        if (v <= 0.0) {
            if (v < -neg_tol)
                throw std::invalid_argument("entropy: eigenvalue below zero tolerance");
            continue;
        }
        s -= v * std::log2(v);
    }
    return std::max(s, 0.0);
}

inline double sum_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace detail

inline double von_neumann_entropy(const SchmidtSpectrum& spectrum) {
    if (spectrum.values.empty())
        throw std::invalid_argument("von_neumann_entropy: empty spectrum");
    if (std::abs(detail::sum_of(spectrum.values) - 1.0) > 1e-10)
        throw std::invalid_argument("von_neumann_entropy: spectrum does not sum to 1");
    return detail::entropy_bits(spectrum.values, 1e-12);
}

inline double von_neumann_entropy(const ReducedDensityMatrix& rho) {
    if (rho.dim < 1 || rho.entries.size() != static_cast<std::size_t>(rho.dim) * rho.dim)
        throw std::invalid_argument("von_neumann_entropy: malformed density matrix");
    if (std::abs(rho.trace() - 1.0) > 1e-8)
        throw std::invalid_argument("von_neumann_entropy: trace differs from 1");
    const EigenDecomposition ed = eig_dense_symmetric(rho.entries, rho.dim, false);
    return detail::entropy_bits(ed.values, 1e-9);
}

// Reusable per-(N, cut) tables: the banded A(q, K) amplitudes.  Building the
// kernel scans all (q, K) once; evaluating a state is then pure linear
// algebra.  Immutable after construction, safe to share across threads.
class SymmetricCutKernel {
  public:
    SymmetricCutKernel(int n_qubits, const Bipartition& cut, const LogFactorialTable& lf)
        : n_(n_qubits), na_(cut.n_a()), nb_(cut.n_b()) {
        if (cut.n_total() != n_qubits)
            throw std::invalid_argument("SymmetricCutKernel: cut does not match N");
        if (lf.max_n() < n_qubits)
            throw std::invalid_argument("SymmetricCutKernel: factorial table too small");
        constexpr double kLogLambdaCut = -128.0;  // on log2 lambda = 2 log2 A
        klo_.assign(na_ + 1, 0);
        khi_.assign(na_ + 1, 0);
        off_.assign(na_ + 2, 0);
        std::vector<double> row(nb_ + 1);
        for (int q = 0; q <= na_; ++q) {
            const double lca = lf.log_binomial(na_, q);
            int lo = -1, hi = -1;
            for (int kb = 0; kb <= nb_; ++kb) {
                const int K = q + kb;
                const double lw = lca + lf.log_binomial(nb_, kb) - lf.log_binomial(n_, K);
                row[kb] = lw;
                if (lw >= kLogLambdaCut) {
                    if (lo < 0) lo = K;
                    hi = K + 1;
                }
            }
            if (lo < 0) lo = hi = q;  // empty band (cannot happen for valid cuts)
            klo_[q] = lo;
            khi_[q] = hi;
            off_[q + 1] = off_[q] + (hi - lo);
        }
        aval_.resize(off_[na_ + 1]);
        for (int q = 0; q <= na_; ++q) {
            const double lca = lf.log_binomial(na_, q);
            for (int K = klo_[q]; K < khi_[q]; ++K) {
                const double lw = lca + lf.log_binomial(nb_, K - q) - lf.log_binomial(n_, K);
                aval_[off_[q] + (K - klo_[q])] = std::exp2(0.5 * lw);
            }
        }
    }

    int n_qubits() const { return n_; }
    int n_a() const { return na_; }
    int n_b() const { return nb_; }

    // Entanglement entropy of A.  States of definite parity decouple the
    // even-q and odd-q rows of the reduced state, which is solved as two
    // half-size blocks at an eighth of the dense cost.
    double entropy(const SymmetricState& psi) const {
        check_state(psi);
        const Parity par = state_parity(psi);
        std::vector<double> lambda;
        lambda.reserve(na_ + 1);
        if (par != Parity::none) {
            // support parity of K: m = j - K even <=> K = j (mod 2)
            const int j = n_ / 2;
            const int kappa = (par == Parity::positive) ? (j % 2) : 1 - (j % 2);
            accumulate_block(psi.amplitudes, 0, 2, kappa, lambda);
            accumulate_block(psi.amplitudes, 1, 2, kappa, lambda);
        } else {
            accumulate_block(psi.amplitudes, 0, 1, 0, lambda);
        }
        if (std::abs(detail::sum_of(lambda) - 1.0) > 1e-8)
            throw std::runtime_error("SymmetricCutKernel: Schmidt spectrum lost mass");
        return detail::entropy_bits(lambda, 1e-9);
    }

    // Dense reduced density matrix on A's Dicke ladder, dim N_A + 1.
    ReducedDensityMatrix rdm(const SymmetricState& psi) const {
        check_state(psi);
        const int dim = na_ + 1;
        ReducedDensityMatrix rho;
        rho.dim = dim;
        rho.entries.assign(static_cast<std::size_t>(dim) * dim, 0.0);
        std::vector<Row> rows;
        std::vector<double> mdata;
        extract_rows(psi.amplitudes, 0, 1, 0, 1, rows, mdata);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j <= i; ++j) {
                const double s = row_dot(rows[i], rows[j], mdata, 1);
                rho.entries[static_cast<std::size_t>(i) * dim + j] = s;
                rho.entries[static_cast<std::size_t>(j) * dim + i] = s;
            }
        return rho;
    }

  private:
    struct Row {
        int kb0 = 0;   // first stored kb
        int len = 0;   // entries at kb0, kb0 + step, ...
        std::size_t pos = 0;
    };

    void check_state(const SymmetricState& psi) const {
        if (psi.n_qubits != n_)
            throw std::invalid_argument("SymmetricCutKernel: state size mismatch");
        require_normalized(psi);
    }

    // Rows q = q0, q0 + qstep, ... with kb restricted to kb = pt (mod step).
    void extract_rows(const std::vector<double>& c, int q0, int qstep, int pt,
                      int step, std::vector<Row>& rows, std::vector<double>& mdata) const {
        rows.clear();
        mdata.clear();
        for (int q = q0; q <= na_; q += qstep) {
            const int kb_lo = klo_[q] - q;
            const int kb_hi = khi_[q] - q;
            int kb0 = kb_lo + (((pt - kb_lo) % step) + step) % step;
            Row r;
            r.kb0 = kb0;
            r.pos = mdata.size();
            const double* a = aval_.data() + off_[q];
            for (int kb = kb0; kb < kb_hi; kb += step)
                mdata.push_back(c[q + kb] * a[kb - kb_lo]);
            r.len = static_cast<int>(mdata.size() - r.pos);
            rows.push_back(r);
        }
    }

    static double row_dot(const Row& ri, const Row& rj,
                          const std::vector<double>& mdata, int step) {
        const int lo = std::max(ri.kb0, rj.kb0);
        const int hi = std::min(ri.kb0 + (ri.len - 1) * step, rj.kb0 + (rj.len - 1) * step);
        if (ri.len == 0 || rj.len == 0 || hi < lo) return 0.0;
        const int count = (hi - lo) / step + 1;
        const double* pi = mdata.data() + ri.pos + (lo - ri.kb0) / step;
        const double* pj = mdata.data() + rj.pos + (lo - rj.kb0) / step;
        double s = 0.0;
        for (int u = 0; u < count; ++u) s += pi[u] * pj[u];
        return s;
    }

    // Gram block of rows q = t (mod qstep) against K-support parity kappa;
    // appends its eigenvalues.
    void accumulate_block(const std::vector<double>& c, int t, int qstep,
                          int kappa, std::vector<double>& out) const {
        std::vector<Row> rows;
        std::vector<double> mdata;
        const int kstep = qstep;
        // kb parity within this row class: kb = K - q = kappa - t (mod 2)
        const int pt = (kstep == 2) ? (((kappa - t) % 2) + 2) % 2 : 0;
        extract_rows(c, t, qstep, pt, kstep, rows, mdata);
        const int r = static_cast<int>(rows.size());
        if (r == 0) return;
        if (r == 1) {
            out.push_back(row_dot(rows[0], rows[0], mdata, kstep));
            return;
        }
        std::vector<double> rho(static_cast<std::size_t>(r) * r, 0.0);
        for (int i = 0; i < r; ++i) {
            double* rhoi = rho.data() + static_cast<std::size_t>(i) * r;
            for (int j = 0; j <= i; ++j) rhoi[j] = row_dot(rows[i], rows[j], mdata, kstep);
        }
        std::vector<double> d(r), e(r);
        detail::tridiagonalize(rho.data(), r, d.data(), e.data());
        for (int i = 0; i + 1 < r; ++i) e[i] = e[i + 1];
        e[r - 1] = 0.0;
        detail::ql_implicit_shift(d, e, nullptr, r);
        out.insert(out.end(), d.begin(), d.end());
    }

    int n_, na_, nb_;
    std::vector<int> klo_, khi_;
    std::vector<std::size_t> off_;
    std::vector<double> aval_;
};

inline ReducedDensityMatrix rdm_symmetric_bipartition(const SymmetricState& psi,
                                                      const Bipartition& cut,
                                                      const LogFactorialTable& lf) {
    return SymmetricCutKernel(psi.n_qubits, cut, lf).rdm(psi);
}

inline ReducedDensityMatrix rdm_symmetric_bipartition(const SymmetricState& psi,
                                                      const Bipartition& cut) {
    return rdm_symmetric_bipartition(psi, cut, LogFactorialTable(psi.n_qubits));
}

// Exact Dicke-state entropy from the hypergeometric Schmidt spectrum.  The
// spectrum is unimodal in q, so the sum walks outward from the mode and
// stops once terms fall 64 binary orders below the peak; the identity
// S = log2(Z) - (sum lambda log2 lambda)/Z on the kept mass Z absorbs both
// the truncation and the rounding of the log-space round trip.
inline double dicke_ee_exact(const DickeIndex& state, const Bipartition& cut,
                             const LogFactorialTable& lf) {
    validate(state);
    if (cut.n_total() != state.n_qubits)
        throw std::invalid_argument("dicke_ee_exact: cut does not match N");
    if (lf.max_n() < state.n_qubits)
        throw std::invalid_argument("dicke_ee_exact: factorial table too small");
    const int n = state.n_qubits, k = state.excitations;
    const int na = cut.n_a(), nb = cut.n_b();
    const int q_lo = std::max(0, k - nb);
    const int q_hi = std::min(na, k);
    if (q_lo == q_hi) return 0.0;  // product state across this cut

    const double log_cnk = lf.log_binomial(n, k);
    const auto logw = [&](int q) {
        return lf.log_binomial(na, q) + lf.log_binomial(nb, k - q) - log_cnk;
    };
    // hypergeometric mode, clamped into the support
    int qm = static_cast<int>((static_cast<double>(k) + 1.0) * (na + 1.0) / (n + 2.0));
    qm = std::clamp(qm, q_lo, q_hi);
    const double peak = logw(qm);
    const double cut_lw = peak - 64.0;

    double z = 0.0, acc = 0.0;
    for (int q = qm; q >= q_lo; --q) {
        const double lw = logw(q);
        if (lw < cut_lw) break;
        const double lam = std::exp2(lw);
        z += lam;
        acc += lam * lw;
    }
    for (int q = qm + 1; q <= q_hi; ++q) {
        const double lw = logw(q);
        if (lw < cut_lw) break;
        const double lam = std::exp2(lw);
        z += lam;
        acc += lam * lw;
    }
    return std::max(std::log2(z) - acc / z, 0.0);
}

inline double dicke_ee_exact(const DickeIndex& state, const Bipartition& cut) {
    return dicke_ee_exact(state, cut, LogFactorialTable(state.n_qubits));
}

// Second-order asymptotic entropy of a Dicke state, in the excitation and
// cut fractions p1 = k/N, p2 = N_A/N:
//
//   S ~ (1/2) log2(2 pi e N p1* p2*)
//       + log2(e)/(12 N) (-10 + 4/p1* + 4/p2* - 1/(p1* p2*)),   p* = p(1-p).
inline double dicke_ee_approx(const DickeIndex& state, const Bipartition& cut) {
    validate(state);
    if (cut.n_total() != state.n_qubits)
        throw std::invalid_argument("dicke_ee_approx: cut does not match N");
    const double n = state.n_qubits;
    const double p1 = state.excitations / n;
    const double p2 = cut.n_a() / n;
    if (state.excitations == 0 || state.excitations == state.n_qubits)
        throw std::domain_error("dicke_ee_approx: k = 0 or k = N is outside the expansion");
    const double p1s = p1 * (1.0 - p1);
    const double p2s = p2 * (1.0 - p2);
    const double pi = 3.14159265358979323846;
    const double e = 2.71828182845904523536;
    const double lead = 0.5 * std::log2(2.0 * pi * e * n * p1s * p2s);
    const double corr = kLog2E / (12.0 * n) *
                        (-10.0 + 4.0 / p1s + 4.0 / p2s - 1.0 / (p1s * p2s));
    return lead + corr;
}

// Exact reduced spectrum of c1 |N, k1> + c2 |N, k2>, k1 < k2.  The reduced
// state couples q only to q +- (k2 - k1), so it splits into independent
// tridiagonal chains, one per residue class:
//   diag(q) = c1^2 A1(q)^2 + c2^2 A2(q)^2
//   off(q, q + d) = c1 c2 A1(q) A2(q + d)
inline std::vector<double> two_dicke_rdm_eigenvalues(int n, int k1, int k2,
                                                     double c1, double c2,
                                                     const Bipartition& cut,
                                                     const LogFactorialTable& lf) {
    validate(DickeIndex{n, k1});
    validate(DickeIndex{n, k2});
    if (k1 >= k2) throw std::invalid_argument("two_dicke_rdm_eigenvalues: need k1 < k2");
    if (cut.n_total() != n)
        throw std::invalid_argument("two_dicke_rdm_eigenvalues: cut does not match N");
    if (std::abs(c1 * c1 + c2 * c2 - 1.0) > 1e-9)
        throw std::invalid_argument("two_dicke_rdm_eigenvalues: state is not normalized");
    const int na = cut.n_a(), nb = cut.n_b();
    const int delta = k2 - k1;
    const auto amp = [&](int k, int q) {
        const double lw = lf.log_binomial(na, q) + lf.log_binomial(nb, k - q) -
                          lf.log_binomial(n, k);
        return std::isfinite(lw) ? std::exp2(0.5 * lw) : 0.0;
    };
    std::vector<double> a1(na + 1), a2(na + 1);
    for (int q = 0; q <= na; ++q) {
        a1[q] = amp(k1, q);
        a2[q] = amp(k2, q);
    }
    std::vector<double> out;
    out.reserve(na + 1);
    std::vector<double> d, e;
    for (int r = 0; r < delta && r <= na; ++r) {
        d.clear();
        e.clear();
        for (int q = r; q <= na; q += delta) {
            d.push_back(c1 * c1 * a1[q] * a1[q] + c2 * c2 * a2[q] * a2[q]);
            if (q + delta <= na) e.push_back(c1 * c2 * a1[q] * a2[q + delta]);
        }
        const int len = static_cast<int>(d.size());
        if (len == 1) {
            out.push_back(d[0]);
            continue;
        }
        e.push_back(0.0);
        detail::ql_implicit_shift(d, e, nullptr, len);
        out.insert(out.end(), d.begin(), d.end());
    }
    return out;
}

// Entropy of (|j, m> + sign |j, -m>)/sqrt(2) across any cut, by the chain
// construction above.  Valid for every m >= 1; the spectrum is independent
// of the sign.
inline double superposition_ee(int n, int m, int sign, const Bipartition& cut,
                               const LogFactorialTable& lf) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("superposition_ee: need even N");
    const int j = n / 2;
    if (m < 1 || m > j) throw std::invalid_argument("superposition_ee: m outside [1, j]");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("superposition_ee: sign must be +-1");
    const double r = 1.0 / std::sqrt(2.0);
    const auto lambda =
        two_dicke_rdm_eigenvalues(n, j - m, j + m, r, sign * r, cut, lf);
    return detail::entropy_bits(lambda, 1e-9);
}

// Closed form for the half cut when the two components do not overlap on
// either side of the cut (|m| > j/2): the superposition carries exactly one
// extra bit over the single Dicke state.
inline double superposition_ee_halfcut(const DickeIndex& state, int sign,
                                       const LogFactorialTable& lf) {
    validate(state);
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("superposition_ee_halfcut: sign must be +-1");
    const int n = state.n_qubits;
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("superposition_ee_halfcut: need even N");
    const double j = 0.5 * n;
    const double m = std::abs(state.m());
    if (!(m > 0.5 * j))
        throw std::invalid_argument("superposition_ee_halfcut: requires |m| > j/2");
    const int k_small = std::min(state.excitations, n - state.excitations);
    return dicke_ee_exact(DickeIndex{n, k_small}, Bipartition::half_of(n), lf) + 1.0;
}

inline double superposition_ee_halfcut(const DickeIndex& state, int sign) {
    return superposition_ee_halfcut(state, sign, LogFactorialTable(state.n_qubits));
}

// One-qubit marginal of a Dicke state: a classical coin with bias k/N.
inline double one_qubit_entropy_closed_form(const DickeIndex& state) {
    validate(state);
    const double p = static_cast<double>(state.excitations) / state.n_qubits;
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Single-qubit reduced density matrix of any symmetric state, from the
// collective one- and two-point functions:
//
//   v+- = (N^2 - 2N + 4<Jz^2> +- 4<Jz>(N-1)) / (4N(N-1))
//   w   = (N^2 - 4<Jz^2>) / (4N(N-1))
//   x   = <J+> / N            (real amplitudes)
//
//   rho = [[v+ + w, x], [x, v- + w]],  index 0 = spin up.
// Its spectrum has the closed form 1/2 +- sqrt(<Jz>^2 + <J+>^2)/N.
struct OneQubitRdm {
    ReducedDensityMatrix rho;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
};

inline OneQubitRdm one_qubit_rdm(const SymmetricState& psi) {
    if (psi.n_qubits < 2)
        throw std::invalid_argument("one_qubit_rdm: need at least two qubits");
    const CollectiveExpectations ex = collective_expectations(psi);
    const double n = psi.n_qubits;
    const double denom = 4.0 * n * (n - 1.0);
    const double vp = (n * n - 2.0 * n + 4.0 * ex.jz_sq + 4.0 * ex.jz * (n - 1.0)) / denom;
    const double vm = (n * n - 2.0 * n + 4.0 * ex.jz_sq - 4.0 * ex.jz * (n - 1.0)) / denom;
    const double w = (n * n - 4.0 * ex.jz_sq) / denom;
    const double x = ex.jplus / n;
    OneQubitRdm out;
    out.rho.dim = 2;
    out.rho.entries = {vp + w, x, x, vm + w};
    const double radius = std::sqrt(ex.jz * ex.jz + ex.jplus * ex.jplus) / n;
    out.lambda_plus = 0.5 + radius;
    out.lambda_minus = 0.5 - radius;
    return out;
}

inline double one_qubit_entropy(const SymmetricState& psi) {
    const OneQubitRdm r = one_qubit_rdm(psi);
    const double lam[2] = {r.lambda_plus, r.lambda_minus};
    return detail::entropy_bits(lam, 1e-9);
}

}  // namespace spinlab
