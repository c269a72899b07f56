#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "spinlab/eigensolve.hpp"
#include "spinlab/lmg.hpp"

using namespace spinlab;
using Catch::Matchers::WithinAbs;

TEST_CASE("matrix elements by hand for two and four qubits", "[lmg]") {
    // N = 2, pure gx: j = 1, j(j+1) = 2
    const LmgParams p2{1.0, 0.0, 0.0};
    CHECK_THAT(lmg_diagonal(p2, 2, 0.0), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(lmg_diagonal(p2, 2, 1.0), WithinAbs(-0.25, 1e-15));
    CHECK_THAT(lmg_diagonal(p2, 2, -1.0), WithinAbs(-0.25, 1e-15));
    // couples m = -1 to m = +1: -(1) sqrt((2-0)(2-0))/8
    CHECK_THAT(lmg_coupling(p2, 2, -1.0), WithinAbs(-0.25, 1e-15));

    // N = 4: j = 2, j(j+1) = 6
    const LmgParams p4{1.0, 0.5, 0.25};
    CHECK_THAT(lmg_diagonal(p4, 4, 2.0), WithinAbs(-1.5 * 2.0 / 8.0 - 0.5, 1e-15));
    CHECK_THAT(lmg_diagonal(p4, 4, 0.0), WithinAbs(-1.5 * 6.0 / 8.0, 1e-15));
    CHECK_THAT(lmg_coupling(p4, 4, 0.0),
               WithinAbs(-0.5 * std::sqrt(6.0 * 4.0) / 16.0, 1e-15));
    CHECK_THAT(lmg_coupling(p4, 4, -2.0),
               WithinAbs(-0.5 * std::sqrt(4.0 * 6.0) / 16.0, 1e-15));
}

TEST_CASE("excitation-indexed elements reproduce the collective-operator matrix",
          "[lmg]") {
    const std::vector<LmgParams> sets{
        {5.0, -3.0, 1.0}, {2.0, 0.5, 1.0}, {1.0, 1.0, 0.3}, {0.4, 0.9, 1.0}};
    for (int n : {2, 4, 7, 12}) {
        for (const LmgParams& p : sets) {
            const HamiltonianElements el = hamiltonian_elements(p, n);
            const auto dense = oracle::lmg_symmetric_matrix(p.gamma_x, p.gamma_y, p.h, n);
            REQUIRE(el.diagonal.size() == static_cast<std::size_t>(n + 1));
            for (int k = 0; k <= n; ++k) {
                for (int kp = 0; kp <= n; ++kp) {
                    const double entry = dense[static_cast<std::size_t>(k) * (n + 1) + kp];
                    if (k == kp)
                        CHECK_THAT(el.diagonal[k], WithinAbs(entry, 1e-12));
                    else if (kp == k + 2)
                        CHECK_THAT(el.coupling[k], WithinAbs(entry, 1e-12));
                    else if (k != kp + 2)
                        CHECK_THAT(entry, WithinAbs(0.0, 1e-12));
                }
            }
        }
    }
}

TEST_CASE("parity blocks partition the ladder and cover the spectrum", "[lmg]") {
    const LmgParams p{5.0, -3.0, 1.0};
    for (int n : {2, 4, 8, 12}) {
        const ParityBlock pos = build_parity_block(p, n, Parity::positive);
        const ParityBlock neg = build_parity_block(p, n, Parity::negative);
        CHECK(std::set<int>{pos.dim(), neg.dim()} == std::set<int>{n / 2 + 1, n / 2});
        for (int k : pos.excitations) CHECK(m_is_even(n, k));
        for (int k : neg.excitations) CHECK(!m_is_even(n, k));

        std::vector<double> all;
        for (const ParityBlock* b : {&pos, &neg}) {
            const EigenDecomposition ed = eig_tridiagonal(b->diag, b->offdiag, false);
            all.insert(all.end(), ed.values.begin(), ed.values.end());
        }
        std::sort(all.begin(), all.end());
        const auto ref = oracle::jacobi_eigenvalues(
            oracle::lmg_symmetric_matrix(p.gamma_x, p.gamma_y, p.h, n), n + 1);
        REQUIRE(all.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK_THAT(all[i], WithinAbs(ref[i], 1e-10));
    }
}

TEST_CASE("block off-diagonals take the coupling of the lower m in the pair",
          "[lmg]") {
    const LmgParams p{2.0, 0.5, 1.0};
    const int n = 8;
    const double j = 0.5 * n;
    const ParityBlock block = build_parity_block(p, n, Parity::negative);
    for (int i = 0; i + 1 < block.dim(); ++i) {
        CHECK(block.excitations[i + 1] == block.excitations[i] + 2);
        const double m_low = j - block.excitations[i + 1];
        CHECK(block.offdiag[i] == lmg_coupling(p, n, m_low));
    }
}

TEST_CASE("eigenvector states satisfy the eigenvalue equation", "[lmg]") {
    const LmgParams p{5.0, -3.0, 1.0};
    const int n = 8;
    for (Parity sector : {Parity::positive, Parity::negative}) {
        const ParityBlock block = build_parity_block(p, n, sector);
        const EigenDecomposition ed = eig_tridiagonal(block.diag, block.offdiag, true);
        for (int i = 0; i < block.dim(); ++i) {
            const SymmetricState psi = eigenvector_state(block, ed, i);
            CHECK(psi.parity == sector);
            CHECK(state_parity(psi) == sector);
            const auto full = oracle::embed_symmetric(psi);
            const auto hfull = oracle::apply_lmg(p.gamma_x, p.gamma_y, p.h, n, full);
            double worst = 0.0;
            for (std::size_t s = 0; s < full.size(); ++s)
                worst = std::max(worst, std::abs(hfull[s] - ed.values[i] * full[s]));
            CHECK(worst <= 1e-10);
        }
    }
    const ParityBlock block = build_parity_block(p, n, Parity::positive);
    const EigenDecomposition novec = eig_tridiagonal(block.diag, block.offdiag, false);
    CHECK_THROWS_AS(eigenvector_state(block, novec, 0), std::invalid_argument);
}

TEST_CASE("isotropic couplings agree with the closed-form spectrum", "[lmg]") {
    const double gamma = 2.0, h = 0.7;
    const int n = 6;
    const auto levels = isotropic_spectrum(gamma, h, n);
    REQUIRE(levels.size() == static_cast<std::size_t>(n + 1));
    // k = 0 is m = 3: E = -2 (12 - 9)/6 - 0.7 * 3
    const auto k0 = std::find_if(levels.begin(), levels.end(),
                                 [](const IsotropicLevel& l) { return l.excitations == 0; });
    REQUIRE(k0 != levels.end());
    CHECK_THAT(k0->energy, WithinAbs(-3.1, 1e-14));

    std::vector<double> energies;
    for (const auto& l : levels) energies.push_back(l.energy);
    CHECK(std::is_sorted(energies.begin(), energies.end()));

    std::vector<double> numeric;
    const LmgParams p{gamma, gamma, h};
    for (Parity sector : {Parity::positive, Parity::negative}) {
        const ParityBlock block = build_parity_block(p, n, sector);
        const EigenDecomposition ed = eig_tridiagonal(block.diag, block.offdiag, false);
        numeric.insert(numeric.end(), ed.values.begin(), ed.values.end());
    }
    std::sort(numeric.begin(), numeric.end());
    for (std::size_t i = 0; i < numeric.size(); ++i)
        CHECK_THAT(numeric[i], WithinAbs(energies[i], 1e-12));
}

TEST_CASE("isotropic degeneracies keep ladder order under the stable sort", "[lmg]") {
    const auto levels = isotropic_spectrum(1.0, 0.0, 4);
    std::vector<int> ks;
    for (const auto& l : levels) ks.push_back(l.excitations);
    CHECK(ks == std::vector<int>{2, 1, 3, 0, 4});
    CHECK_THAT(levels[1].energy, WithinAbs(levels[2].energy, 1e-15));
}

TEST_CASE("constructor validation", "[lmg]") {
    CHECK_THROWS_AS(build_parity_block({1, 1, 1}, 7, Parity::positive),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_parity_block({1, 1, 1}, 0, Parity::positive),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_parity_block({1, 1, 1}, 4, Parity::none),
                    std::invalid_argument);
    CHECK_THROWS_AS(hamiltonian_elements({1, 1, std::nan("")}, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(isotropic_spectrum(1.0, 1.0, 0), std::invalid_argument);
}
