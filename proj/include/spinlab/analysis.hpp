#pragma once

// Spectrum-averaged entanglement, its analytic bounds, finite-size scaling
// fits, and entanglement-vs-energy profiles for solved sectors.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinlab/entangle.hpp"
#include "spinlab/lmg.hpp"
#include "spinlab/parallel.hpp"

namespace spinlab {

// Deterministic reduction independent of accumulation hardware: recursive
// pairwise summation, O(log n) error growth.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double average_ee(std::span<const double> entropies) {
    if (entropies.empty())
        throw std::invalid_argument("average_ee: no entropies to average");
    return pairwise_sum(entropies) / static_cast<double>(entropies.size());
}

// Maximal entropy across a cut keeping N_A qubits, within the symmetric
// sector: log2 of the sector dimension.
inline double sector_entropy_cap(int n_a) {
    if (n_a < 1) throw std::invalid_argument("sector_entropy_cap: need n_a >= 1");
    return std::log2(static_cast<double>(n_a) + 1.0);
}

struct ScalingSample {
    std::string basis;
    int n_qubits = 0;
    double fraction = 0.0;
    double s_max = 0.0;
    double average = 0.0;
    double normalized = 0.0;
};

inline ScalingSample normalized_average(std::string basis, int n_qubits,
                                        double fraction, double average) {
    const Bipartition cut = Bipartition::fraction_of(n_qubits, fraction);
    ScalingSample s;
    s.basis = std::move(basis);
    s.n_qubits = n_qubits;
    s.fraction = fraction;
    s.s_max = sector_entropy_cap(cut.n_a());
    s.average = average;
    s.normalized = average / s.s_max;
    return s;
}

// Analytic envelope of the Dicke-basis average at cut fraction p:
//   upper = (1/2) log2(pi e j p(1-p))
//   lower = j/(2j+1) log2((pi/(2e)) j p(1-p)),   j = N/2.
inline double dicke_average_upper_bound(int n_qubits, double p) {
    if (n_qubits < 2) throw std::invalid_argument("dicke_average_upper_bound: N too small");
    if (!(p > 0.0) || p > 0.5)
        throw std::invalid_argument("dicke_average_upper_bound: p outside (0, 1/2]");
    const double pi = 3.14159265358979323846;
    const double e = 2.71828182845904523536;
    const double j = 0.5 * n_qubits;
    return 0.5 * std::log2(pi * e * j * p * (1.0 - p));
}

inline double dicke_average_lower_bound(int n_qubits, double p) {
    if (n_qubits < 2) throw std::invalid_argument("dicke_average_lower_bound: N too small");
    if (!(p > 0.0) || p > 0.5)
        throw std::invalid_argument("dicke_average_lower_bound: p outside (0, 1/2]");
    const double pi = 3.14159265358979323846;
    const double e = 2.71828182845904523536;
    const double j = 0.5 * n_qubits;
    return j / (2.0 * j + 1.0) * std::log2(pi / (2.0 * e) * j * p * (1.0 - p));
}

// ---------------------------------------------------------------------------
// Basis averages

// Mean Dicke-state entropy over k = 0..N, using the k <-> N-k symmetry.
inline double dicke_basis_average_ee(int n_qubits, const Bipartition& cut,
                                     const LogFactorialTable& lf, int threads = 0) {
    if (cut.n_total() != n_qubits)
        throw std::invalid_argument("dicke_basis_average_ee: cut does not match N");
    const int half = n_qubits / 2;
    std::vector<double> s(half + 1);
    parallel_for(half + 1, threads, [&](int k) {
        s[k] = dicke_ee_exact(DickeIndex{n_qubits, k}, cut, lf);
    });
    double total;
    if (n_qubits % 2 == 0) {
        total = 2.0 * pairwise_sum(std::span<const double>(s).first(half)) + s[half];
    } else {
        total = 2.0 * pairwise_sum(s);
    }
    return total / (n_qubits + 1.0);
}

// Mean over the parity-adapted basis {(|j,m> +- |j,-m>)/sqrt(2)}_{m=1..j}
// plus |j,0>; the two signs share a spectrum, so each m is computed once.
inline double superposition_basis_average_ee(int n_qubits, const Bipartition& cut,
                                             const LogFactorialTable& lf,
                                             int threads = 0) {
    if (n_qubits < 2 || n_qubits % 2 != 0)
        throw std::invalid_argument("superposition_basis_average_ee: need even N");
    if (cut.n_total() != n_qubits)
        throw std::invalid_argument("superposition_basis_average_ee: cut does not match N");
    const int j = n_qubits / 2;
    std::vector<double> s(j);
    parallel_for(j, threads, [&](int i) {
        s[i] = superposition_ee(n_qubits, i + 1, +1, cut, lf);
    });
    const double middle = dicke_ee_exact(DickeIndex{n_qubits, j}, cut, lf);
    return (2.0 * pairwise_sum(s) + middle) / (n_qubits + 1.0);
}

// Mean single-qubit entropy over the Dicke basis (binary entropy of k/N).
inline double one_qubit_dicke_average_ee(int n_qubits) {
    if (n_qubits < 1) throw std::invalid_argument("one_qubit_dicke_average_ee: need N >= 1");
    std::vector<double> s(n_qubits + 1);
    for (int k = 0; k <= n_qubits; ++k)
        s[k] = one_qubit_entropy_closed_form(DickeIndex{n_qubits, k});
    return average_ee(s);
}

// ---------------------------------------------------------------------------
// Solved sectors and their entanglement profiles

struct SolvedSector {
    ParityBlock block;
    EigenDecomposition eig;
};

inline SolvedSector solve_sector(const LmgParams& params, int n_qubits, Parity sector) {
    SolvedSector out;
    out.block = build_parity_block(params, n_qubits, sector);
    out.eig = eig_tridiagonal(out.block.diag, out.block.offdiag, true);
    return out;
}

inline std::vector<double> sector_entropies(const SolvedSector& solved,
                                            const Bipartition& cut,
                                            const LogFactorialTable& lf,
                                            int threads = 0) {
    const SymmetricCutKernel kernel(solved.block.n_qubits, cut, lf);
    const int dim = solved.block.dim();
    std::vector<double> s(dim);
    parallel_for(dim, threads, [&](int i) {
        s[i] = kernel.entropy(eigenvector_state(solved.block, solved.eig, i));
    });
    return s;
}

struct SpectrumEntanglementProfile {
    LmgParams params;
    int n_qubits = 0;
    Parity sector = Parity::none;
    double fraction = 0.0;
    std::vector<double> energies;         // ascending
    std::vector<double> scaled_energies;  // E / j
    std::vector<double> entropies;
};

inline SpectrumEntanglementProfile ee_profile(const SolvedSector& solved,
                                              const Bipartition& cut,
                                              const LogFactorialTable& lf,
                                              int threads = 0) {
    SpectrumEntanglementProfile p;
    p.params = solved.block.params;
    p.n_qubits = solved.block.n_qubits;
    p.sector = solved.block.sector;
    p.fraction = cut.fraction();
    p.energies = solved.eig.values;
    const double j = 0.5 * solved.block.n_qubits;
    p.scaled_energies.resize(p.energies.size());
    for (std::size_t i = 0; i < p.energies.size(); ++i)
        p.scaled_energies[i] = p.energies[i] / j;
    p.entropies = sector_entropies(solved, cut, lf, threads);
    return p;
}

// ---------------------------------------------------------------------------
// Fixed-intercept least squares: y = a + b x with a held fixed.  Because the
// constant is not a fitted parameter, R^2 follows the through-origin
// convention, 1 - sum(residual^2) / sum(y^2), with the raw second moment in
// the denominator.

struct FitResult {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

inline FitResult fixed_intercept_fit(std::span<const double> x,
                                     std::span<const double> y, double intercept) {
    if (x.size() != y.size())
        throw std::invalid_argument("fixed_intercept_fit: size mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("fixed_intercept_fit: need at least 2 points");
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    if (*xmin == *xmax)
        throw std::invalid_argument("fixed_intercept_fit: degenerate abscissae");
    double sxx = 0.0, sxr = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += x[i] * x[i];
        sxr += x[i] * (y[i] - intercept);
    }
    FitResult fit;
    fit.intercept = intercept;
    fit.slope = sxr / sxx;
    fit.n_points = n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - intercept - fit.slope * x[i];
        ss_res += r * r;
        ss_tot += y[i] * y[i];
    }
    if (ss_tot == 0.0)
        fit.r_squared = (ss_res == 0.0) ? 1.0 : -std::numeric_limits<double>::infinity();
    else
        fit.r_squared = 1.0 - ss_res / ss_tot;
    return fit;
}

struct InterceptScanPoint {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

// Tries every intercept on the closed grid [lo, lo + step, ..., hi].
inline std::vector<InterceptScanPoint> intercept_scan(std::span<const double> x,
                                                      std::span<const double> y,
                                                      double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("intercept_scan: malformed grid");
    std::vector<InterceptScanPoint> out;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double a = lo + i * step;
        const FitResult fit = fixed_intercept_fit(x, y, a);
        out.push_back({a, fit.slope, fit.r_squared});
    }
    return out;
}

// Grid intercept minimizing 1 - R^2 (first hit on exact ties).
inline double best_intercept(const std::vector<InterceptScanPoint>& scan) {
    if (scan.empty()) throw std::invalid_argument("best_intercept: empty scan");
    const auto it = std::max_element(scan.begin(), scan.end(),
                                     [](const InterceptScanPoint& a, const InterceptScanPoint& b) {
                                         return a.r_squared < b.r_squared;
                                     });
    return it->intercept;
}

// ---------------------------------------------------------------------------
// Density of states and entanglement dips

struct DosHistogram {
    std::vector<double> edges;  // bins + 1 ascending edges
    std::vector<int> counts;    // last bin right-inclusive
};

inline DosHistogram dos_histogram(std::span<const double> values, int bins) {
    if (bins < 1) throw std::invalid_argument("dos_histogram: need at least one bin");
    if (values.empty()) throw std::invalid_argument("dos_histogram: no values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    DosHistogram h;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
    h.counts.assign(bins, 0);
    const double width = hi - lo;
    for (double v : values) {
        int idx = (width > 0.0)
                      ? static_cast<int>((v - lo) / width * bins)
                      : 0;
        idx = std::clamp(idx, 0, bins - 1);
        ++h.counts[idx];
    }
    return h;
}

inline int mode_bin(const DosHistogram& h) {
    return static_cast<int>(std::max_element(h.counts.begin(), h.counts.end()) -
                            h.counts.begin());
}

// Centered moving average; entries without a full window keep raw values.
inline std::vector<double> moving_average(std::span<const double> v, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("moving_average: window must be odd and positive");
    std::vector<double> out(v.begin(), v.end());
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    for (int i = half; i + half < n; ++i) {
        double s = 0.0;
        for (int t = i - half; t <= i + half; ++t) s += v[t];
        out[i] = s / window;
    }
    return out;
}

// Strict local minima of the smoothed entropy profile, ignoring the outer
// edge_fraction of indices on both ends where the moving average is not
// meaningful.
inline std::vector<int> profile_dip_indices(std::span<const double> entropies,
                                            int window = 21,
                                            double edge_fraction = 0.05) {
    if (!(edge_fraction >= 0.0) || edge_fraction >= 0.5)
        throw std::invalid_argument("profile_dip_indices: edge fraction outside [0, 0.5)");
    const int n = static_cast<int>(entropies.size());
    const std::vector<double> smooth = moving_average(entropies, window);
    const int margin = std::max(window / 2,
                                static_cast<int>(std::ceil(edge_fraction * n)));
    std::vector<int> dips;
    for (int i = std::max(1, margin); i < n - std::max(1, margin); ++i)
        if (smooth[i] < smooth[i - 1] && smooth[i] < smooth[i + 1]) dips.push_back(i);
    return dips;
}

// ---------------------------------------------------------------------------
// Normalized average as a function of the cut fraction

struct C0Row {
    double fraction = 0.0;
    double s_max = 0.0;
    double average = 0.0;
    double c0 = 0.0;  // average / s_max
};

inline std::vector<C0Row> c0_profile_dicke(int n_qubits,
                                           std::span<const double> fractions,
                                           const LogFactorialTable& lf,
                                           int threads = 0) {
    std::vector<C0Row> rows;
    rows.reserve(fractions.size());
    for (double p : fractions) {
        const Bipartition cut = Bipartition::fraction_of(n_qubits, p);
        C0Row row;
        row.fraction = p;
        row.s_max = sector_entropy_cap(cut.n_a());
        row.average = dicke_basis_average_ee(n_qubits, cut, lf, threads);
        row.c0 = row.average / row.s_max;
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<C0Row> c0_profile_lmg(const LmgParams& params, int n_qubits,
                                         Parity sector,
                                         std::span<const double> fractions,
                                         const LogFactorialTable& lf,
                                         int threads = 0) {
    const SolvedSector solved = solve_sector(params, n_qubits, sector);
    std::vector<C0Row> rows;
    rows.reserve(fractions.size());
    for (double p : fractions) {
        const Bipartition cut = Bipartition::fraction_of(n_qubits, p);
        const std::vector<double> s = sector_entropies(solved, cut, lf, threads);
        C0Row row;
        row.fraction = p;
        row.s_max = sector_entropy_cap(cut.n_a());
        row.average = average_ee(s);
        row.c0 = row.average / row.s_max;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace spinlab
