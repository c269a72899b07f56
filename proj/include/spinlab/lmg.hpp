#pragma once

// Collective XY Hamiltonian on the maximal-spin multiplet,
//
//   H = -(gx Jx^2 + gy Jy^2)/N - h Jz,        j = N/2.
//
// Jx^2 + Jy^2 = J^2 - Jz^2 is diagonal in the Dicke basis while
// Jx^2 - Jy^2 = (J+^2 + J-^2)/2 hops two excitations, so H is tridiagonal
// in each stride-2 ladder:
//
//   <m|H|m>    = -(gx + gy) (j(j+1) - m^2) / (2N) - h m
//   <m+2|H|m>  = -(gx - gy) sqrt((j(j+1) - m(m+1)) (j(j+1) - (m+1)(m+2))) / (4N)
//
// The spin-flip parity R_z^pi splits the even-N problem into two real
// symmetric tridiagonal blocks (even and odd m).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinlab/eigensolve.hpp"
#include "spinlab/symspace.hpp"

namespace spinlab {

struct LmgParams {
    double gamma_x = 0.0;
    double gamma_y = 0.0;
    double h = 0.0;
};

inline void validate_finite(const LmgParams& p) {
    if (!std::isfinite(p.gamma_x) || !std::isfinite(p.gamma_y) || !std::isfinite(p.h))
        throw std::invalid_argument("LmgParams: non-finite coupling");
}

inline double lmg_diagonal(const LmgParams& p, int n, double m) {
    const double j = 0.5 * n;
    return -(p.gamma_x + p.gamma_y) * (j * (j + 1.0) - m * m) / (2.0 * n) - p.h * m;
}

// Matrix element between |j, m> and |j, m+2>.
inline double lmg_coupling(const LmgParams& p, int n, double m) {
    const double j = 0.5 * n;
    const double a = j * (j + 1.0) - m * (m + 1.0);
    const double b = j * (j + 1.0) - (m + 1.0) * (m + 2.0);
    return -(p.gamma_x - p.gamma_y) * std::sqrt(a * b) / (4.0 * n);
}

// Full symmetric-sector matrix in excitation indexing: diagonal[k] and
// coupling[k] linking k and k+2 (the intervening k+1 entry vanishes).
struct HamiltonianElements {
    std::vector<double> diagonal;
    std::vector<double> coupling;
};

inline HamiltonianElements hamiltonian_elements(const LmgParams& p, int n) {
    if (n < 1) throw std::invalid_argument("hamiltonian_elements: need N >= 1");
    validate_finite(p);
    const double j = 0.5 * n;
    HamiltonianElements el;
    el.diagonal.resize(n + 1);
    for (int k = 0; k <= n; ++k) el.diagonal[k] = lmg_diagonal(p, n, j - k);
    if (n >= 2) {
        el.coupling.resize(n - 1);
        // pair (k, k+2) spans m values (j-k-2, j-k); the element formula
        // takes the lower one
        for (int k = 0; k + 2 <= n; ++k) el.coupling[k] = lmg_coupling(p, n, j - k - 2.0);
    }
    return el;
}

struct ParityBlock {
    LmgParams params;
    int n_qubits = 0;
    Parity sector = Parity::none;
    std::vector<int> excitations;  // k of each row, ascending
    std::vector<double> diag;
    std::vector<double> offdiag;

    int dim() const { return static_cast<int>(diag.size()); }
};

inline ParityBlock build_parity_block(const LmgParams& p, int n, Parity sector) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("build_parity_block: need even N >= 2");
    if (sector == Parity::none)
        throw std::invalid_argument("build_parity_block: pick a definite sector");
    validate_finite(p);
    const double j = 0.5 * n;
    ParityBlock block;
    block.params = p;
    block.n_qubits = n;
    block.sector = sector;
    const bool want_even = (sector == Parity::positive);
    for (int k = 0; k <= n; ++k)
        if (m_is_even(n, k) == want_even) block.excitations.push_back(k);
    const int dim = static_cast<int>(block.excitations.size());
    block.diag.resize(dim);
    block.offdiag.resize(dim - 1);
    for (int i = 0; i < dim; ++i)
        block.diag[i] = lmg_diagonal(p, n, j - block.excitations[i]);
    for (int i = 0; i + 1 < dim; ++i)
        block.offdiag[i] = lmg_coupling(p, n, j - block.excitations[i + 1]);
    return block;
}

// Scatter eigenvector i of a solved block back onto the full Dicke ladder.
inline SymmetricState eigenvector_state(const ParityBlock& block,
                                        const EigenDecomposition& eig, int i) {
    if (!eig.has_vectors())
        throw std::invalid_argument("eigenvector_state: decomposition lacks vectors");
    if (eig.dim != block.dim() || i < 0 || i >= static_cast<int>(eig.values.size()))
        throw std::invalid_argument("eigenvector_state: index mismatch");
    SymmetricState psi;
    psi.n_qubits = block.n_qubits;
    psi.amplitudes.assign(static_cast<std::size_t>(block.n_qubits) + 1, 0.0);
    const double* v = eig.vector(i);
    for (int r = 0; r < block.dim(); ++r) psi.amplitudes[block.excitations[r]] = v[r];
    psi.parity = block.sector;
    return psi;
}

// gx = gy = gamma: eigenstates are the Dicke states themselves with
// E(m) = -gamma (j(j+1) - m^2)/N - h m.
struct IsotropicLevel {
    double energy = 0.0;
    int excitations = 0;
};

inline std::vector<IsotropicLevel> isotropic_spectrum(double gamma, double h, int n) {
    if (n < 1) throw std::invalid_argument("isotropic_spectrum: need N >= 1");
    if (!std::isfinite(gamma) || !std::isfinite(h))
        throw std::invalid_argument("isotropic_spectrum: non-finite parameter");
    const double j = 0.5 * n;
    std::vector<IsotropicLevel> levels(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double m = j - k;
        levels[k] = {-gamma * (j * (j + 1.0) - m * m) / n - h * m, k};
    }
    std::stable_sort(levels.begin(), levels.end(),
                     [](const IsotropicLevel& a, const IsotropicLevel& b) {
                         return a.energy < b.energy;
                     });
    return levels;
}

}  // namespace spinlab
