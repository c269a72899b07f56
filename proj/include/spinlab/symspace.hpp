#pragma once

// Permutation-symmetric (collective) spin-1/2 machinery.
//
// A state of N qubits in the fully symmetric sector lives in the spin-j
// multiplet with j = N/2.  We index the Dicke ladder by the excitation
// count k = 0..N, related to the Jz quantum number by m = j - k, so k = 0
// is the fully polarized |j, j> state.  All logarithms and entropies in
// this library are base 2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)

inline constexpr double neg_inf() {
    return -std::numeric_limits<double>::infinity();
}

// R_z^pi sector of a symmetric state: "positive" collects even m, "negative"
// odd m.  States of mixed or undefined parity (odd N) carry "none".
enum class Parity { positive, negative, none };

inline const char* to_string(Parity p) {
    switch (p) {
        case Parity::positive: return "positive";
        case Parity::negative: return "negative";
        default: return "none";
    }
}

// Basis label |j, m> in excitation form.
struct DickeIndex {
    int n_qubits = 0;
    int excitations = 0;  // k; the Jz eigenvalue is m = n_qubits/2 - k

    double j() const { return 0.5 * n_qubits; }
    double m() const { return 0.5 * n_qubits - excitations; }
};

inline void validate(const DickeIndex& d) {
    if (d.n_qubits < 1)
        throw std::invalid_argument("DickeIndex: need at least one qubit");
    if (d.excitations < 0 || d.excitations > d.n_qubits)
        throw std::invalid_argument("DickeIndex: excitations outside [0, N]");
}

// A : B qubit split with the convention n_a <= n_b.
class Bipartition {
  public:
    Bipartition(int n_a, int n_b) : n_a_(n_a), n_b_(n_b) {
        if (n_a < 1 || n_b < 1)
            throw std::invalid_argument("Bipartition: both parts need qubits");
        if (n_a > n_b)
            throw std::invalid_argument("Bipartition: expected n_a <= n_b");
    }

    static Bipartition half_of(int n) {
        if (n < 2 || n % 2 != 0)
            throw std::invalid_argument("Bipartition: half cut needs even N");
        return Bipartition(n / 2, n / 2);
    }

    // p N must be an integer (within 1e-9) and 0 < p <= 1/2.
    static Bipartition fraction_of(int n, double p) {
        if (!(p > 0.0) || p > 0.5)
            throw std::invalid_argument("Bipartition: fraction outside (0, 1/2]");
        const double exact = p * n;
        const int n_a = static_cast<int>(std::lround(exact));
        if (std::abs(exact - n_a) > 1e-9)
            throw std::invalid_argument("Bipartition: p*N is not an integer");
        return Bipartition(n_a, n - n_a);
    }

    int n_a() const { return n_a_; }
    int n_b() const { return n_b_; }
    int n_total() const { return n_a_ + n_b_; }
    double fraction() const { return static_cast<double>(n_a_) / n_total(); }

  private:
    int n_a_;
    int n_b_;
};

// Squared Schmidt coefficients lambda_q of a symmetric state across a
// bipartition; q counts excitations inside part A.  Entry i corresponds
// to q = q_min + i.  The values sum to 1.
struct SchmidtSpectrum {
    std::vector<double> values;
    int q_min = 0;
};

struct CollectiveExpectations {
    double jz = 0.0;        // <Jz>
    double jz_sq = 0.0;     // <Jz^2>
    double jplus = 0.0;     // <J+>; real for real amplitudes
    double anticomm = 0.0;  // <J+ Jz + Jz J+>
};

// Cumulative table of log2(n!) built with compensated summation, so that
// log-binomials of large arguments keep ~1e-10 absolute accuracy.  Build
// once per run and share; lookups are branch-free array reads.
class LogFactorialTable {
  public:
    explicit LogFactorialTable(int max_n) {
        if (max_n < 0)
            throw std::invalid_argument("LogFactorialTable: negative size");
        lf_.resize(static_cast<std::size_t>(max_n) + 1);
        lf_[0] = 0.0;
        double sum = 0.0, carry = 0.0;
        for (int i = 1; i <= max_n; ++i) {
            const double y = std::log2(static_cast<double>(i)) - carry;
            const double t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            lf_[i] = sum;
        }
    }

    int max_n() const { return static_cast<int>(lf_.size()) - 1; }

    double log2_factorial(int n) const {
        if (n < 0 || n > max_n())
            throw std::out_of_range("LogFactorialTable: n outside table");
        return lf_[n];
    }

    // log2 C(n, k); -inf for k outside [0, n] (the binomial vanishes).
    double log_binomial(int n, int k) const {
        if (n < 0 || n > max_n())
            throw std::out_of_range("LogFactorialTable: n outside table");
        if (k < 0 || k > n) return neg_inf();
        return lf_[n] - lf_[k] - lf_[n - k];
    }

  private:
    std::vector<double> lf_;
};

// Table-free log2 C(n, k) via lgamma.  Same boundary conventions as the
// table: exact 0 at k in {0, n}, -inf outside [0, n].
inline double log_binomial(int n, int k) {
    if (n < 0) throw std::invalid_argument("log_binomial: negative n");
    if (k < 0 || k > n) return neg_inf();
    if (k == 0 || k == n) return 0.0;
    return kLog2E * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                     std::lgamma(n - k + 1.0));
}

// Real-amplitude state in the symmetric sector, c_k over k = 0..N.
struct SymmetricState {
    int n_qubits = 0;
    std::vector<double> amplitudes;
    Parity parity = Parity::none;

    double norm_sq() const {
        double s = 0.0;
        for (double c : amplitudes) s += c * c;
        return s;
    }
};

inline void require_normalized(const SymmetricState& psi, double tol = 1e-9) {
    if (psi.n_qubits < 1 ||
        psi.amplitudes.size() != static_cast<std::size_t>(psi.n_qubits) + 1)
        throw std::invalid_argument("SymmetricState: amplitude count != N + 1");
    if (std::abs(psi.norm_sq() - 1.0) > tol)
        throw std::invalid_argument("SymmetricState: state is not normalized");
}

// Parity of the Jz quantum number m = j - k for even N; (-1)^m = (-1)^(j+k).
inline bool m_is_even(int n_qubits, int k) {
    return ((n_qubits / 2 + k) % 2) == 0;
}

// Inspect the support of the amplitudes.  Exact zeros only; states built by
// this library place hard zeros outside their sector.
inline Parity state_parity(const SymmetricState& psi) {
    if (psi.n_qubits % 2 != 0) return Parity::none;
    bool even = false, odd = false;
    for (int k = 0; k < static_cast<int>(psi.amplitudes.size()); ++k) {
        if (psi.amplitudes[k] == 0.0) continue;
        (m_is_even(psi.n_qubits, k) ? even : odd) = true;
    }
    if (even && !odd) return Parity::positive;
    if (odd && !even) return Parity::negative;
    return Parity::none;
}

inline SymmetricState dicke_state(int n_qubits, int excitations) {
    validate(DickeIndex{n_qubits, excitations});
    SymmetricState psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes.assign(static_cast<std::size_t>(n_qubits) + 1, 0.0);
    psi.amplitudes[excitations] = 1.0;
    if (n_qubits % 2 == 0)
        psi.parity = m_is_even(n_qubits, excitations) ? Parity::positive
                                                      : Parity::negative;
    return psi;
}

// (|j, m> + sign |j, -m>) / sqrt(2) for integer m >= 1 (even N).
inline SymmetricState dicke_superposition(int n_qubits, int m, int sign) {
    if (n_qubits < 2 || n_qubits % 2 != 0)
        throw std::invalid_argument("dicke_superposition: need even N >= 2");
    const int j = n_qubits / 2;
    if (m < 1 || m > j)
        throw std::invalid_argument("dicke_superposition: m outside [1, j]");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("dicke_superposition: sign must be +-1");
    SymmetricState psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes.assign(static_cast<std::size_t>(n_qubits) + 1, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    psi.amplitudes[j - m] = r;        // |j, +m>
    psi.amplitudes[j + m] = sign * r; // |j, -m>
    psi.parity = (m % 2 == 0) ? Parity::positive : Parity::negative;
    return psi;
}

// lambda_q = C(N_A, q) C(N_B, k - q) / C(N, k) over the hypergeometric
// support q in [max(0, k - N_B), min(N_A, k)].  The exponentials are
// renormalized by their own sum, which removes the ~1e-12 drift the
// log-space round trip would otherwise leave.
inline SchmidtSpectrum dicke_schmidt_coefficients(const DickeIndex& state,
                                                  const Bipartition& cut,
                                                  const LogFactorialTable& lf) {
    validate(state);
    if (cut.n_total() != state.n_qubits)
        throw std::invalid_argument("dicke_schmidt_coefficients: cut does not match N");
    if (lf.max_n() < state.n_qubits)
        throw std::invalid_argument("dicke_schmidt_coefficients: table too small");
    const int k = state.excitations;
    const int na = cut.n_a(), nb = cut.n_b();
    const double log_cnk = lf.log_binomial(state.n_qubits, k);
    const int q_lo = std::max(0, k - nb);
    const int q_hi = std::min(na, k);

    SchmidtSpectrum out;
    out.q_min = q_lo;
    out.values.resize(static_cast<std::size_t>(q_hi - q_lo) + 1);
    double sum = 0.0, carry = 0.0;
    for (int q = q_lo; q <= q_hi; ++q) {
        const double lam = std::exp2(lf.log_binomial(na, q) +
                                     lf.log_binomial(nb, k - q) - log_cnk);
        out.values[q - q_lo] = lam;
        const double y = lam - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    const double inv = 1.0 / sum;
    for (double& v : out.values) v *= inv;
    return out;
}

inline SchmidtSpectrum dicke_schmidt_coefficients(const DickeIndex& state,
                                                  const Bipartition& cut) {
    return dicke_schmidt_coefficients(state, cut,
                                      LogFactorialTable(state.n_qubits));
}

// Ladder matrix element <j, m+1| J+ |j, m>.
inline double ladder_element(double j, double m) {
    return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}

// <Jz>, <Jz^2>, <J+> and <{J+, Jz}> of a normalized symmetric state.
// J+ connects k to k-1: J+ |j, m> = ladder(j, m) |j, m+1>.
inline CollectiveExpectations collective_expectations(const SymmetricState& psi) {
    require_normalized(psi);
    const int n = psi.n_qubits;
    const double j = 0.5 * n;
    CollectiveExpectations ex;
    for (int k = 0; k <= n; ++k) {
        const double c = psi.amplitudes[k];
        if (c == 0.0) continue;
        const double m = j - k;
        ex.jz += c * c * m;
        ex.jz_sq += c * c * m * m;
    }
    for (int k = 1; k <= n; ++k) {
        const double pair = psi.amplitudes[k - 1] * psi.amplitudes[k];
        if (pair == 0.0) continue;
        const double m = j - k;
        const double r = ladder_element(j, m);
        ex.jplus += pair * r;
        // J+ Jz contributes m r, Jz J+ contributes (m+1) r
        ex.anticomm += pair * r * (2.0 * m + 1.0);
    }
    return ex;
}

}  // namespace spinlab
