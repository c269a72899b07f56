#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spinlab/symspace.hpp"

using namespace spinlab;
using Catch::Matchers::WithinAbs;

TEST_CASE("log_binomial boundary conventions", "[symspace]") {
    CHECK_THAT(log_binomial(4, 2), WithinAbs(std::log2(6.0), 1e-12));
    CHECK(log_binomial(10, 0) == 0.0);
    CHECK(log_binomial(10, 10) == 0.0);
    CHECK(log_binomial(10, -1) == neg_inf());
    CHECK(log_binomial(10, 11) == neg_inf());
    CHECK(log_binomial(0, 0) == 0.0);
    CHECK_THROWS_AS(log_binomial(-1, 0), std::invalid_argument);
}

TEST_CASE("log factorial table agrees with the free function and boundaries",
          "[symspace]") {
    const LogFactorialTable lf(500);
    CHECK(lf.max_n() == 500);
    CHECK(lf.log2_factorial(0) == 0.0);
    CHECK(lf.log_binomial(17, 0) == 0.0);
    CHECK(lf.log_binomial(17, 17) == 0.0);
    CHECK(lf.log_binomial(17, 18) == neg_inf());
    CHECK(lf.log_binomial(17, -3) == neg_inf());
    CHECK_THROWS_AS(lf.log_binomial(501, 2), std::out_of_range);
    CHECK_THROWS_AS(lf.log2_factorial(-1), std::out_of_range);
    for (int n : {5, 40, 123, 500})
        for (int k = 0; k <= n; k += std::max(1, n / 7))
            CHECK_THAT(lf.log_binomial(n, k), WithinAbs(log_binomial(n, k), 1e-10));
}

TEST_CASE("log binomials match the Stirling oracle up to n = 60000", "[symspace]") {
    const LogFactorialTable lf(60000);
    for (int n : {10, 100, 1000, 10000, 30000, 60000}) {
        for (int k : {1, 2, n / 3, n / 2, n - 1}) {
            const double ref = oracle::log2_binomial(n, k);
            CHECK_THAT(lf.log_binomial(n, k), WithinAbs(ref, 1e-9));
            CHECK_THAT(log_binomial(n, k), WithinAbs(ref, 1e-9));
        }
    }
}

TEST_CASE("Pascal recurrence holds in log space", "[symspace]") {
    const LogFactorialTable lf(10000);
    std::mt19937_64 rng(271828);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9999);
        const int k = 1 + static_cast<int>(rng() % (n - 1));
        const double target = lf.log_binomial(n, k);
        const double a = lf.log_binomial(n - 1, k - 1) - target;
        const double b = lf.log_binomial(n - 1, k) - target;
        const double reconstructed = target + std::log2(std::exp2(a) + std::exp2(b));
        CHECK_THAT(reconstructed, WithinAbs(target, 1e-9 * std::max(1.0, std::abs(target))));
    }
}

TEST_CASE("Bipartition construction and validation", "[symspace]") {
    const Bipartition cut(3, 5);
    CHECK(cut.n_total() == 8);
    CHECK_THAT(cut.fraction(), WithinAbs(0.375, 1e-15));
    CHECK_THROWS_AS(Bipartition(5, 3), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition(0, 3), std::invalid_argument);
    CHECK(Bipartition::half_of(10).n_a() == 5);
    CHECK_THROWS_AS(Bipartition::half_of(9), std::invalid_argument);
    CHECK(Bipartition::fraction_of(16, 0.25).n_a() == 4);
    CHECK_THROWS_AS(Bipartition::fraction_of(10, 0.26), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition::fraction_of(10, 0.75), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition::fraction_of(10, 0.0), std::invalid_argument);
}

TEST_CASE("DickeIndex bookkeeping", "[symspace]") {
    const DickeIndex d{6, 1};
    CHECK_THAT(d.j(), WithinAbs(3.0, 1e-15));
    CHECK_THAT(d.m(), WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(validate(DickeIndex{6, 7}), std::invalid_argument);
    CHECK_THROWS_AS(validate(DickeIndex{6, -1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(DickeIndex{0, 0}), std::invalid_argument);
}

TEST_CASE("state constructors and parity tags", "[symspace]") {
    const SymmetricState top = dicke_state(8, 0);  // m = j = 4, even
    CHECK(top.parity == Parity::positive);
    CHECK_THAT(top.norm_sq(), WithinAbs(1.0, 1e-15));

    const SymmetricState odd = dicke_state(8, 1);  // m = 3
    CHECK(odd.parity == Parity::negative);

    const SymmetricState sup = dicke_superposition(8, 3, -1);
    CHECK(sup.parity == Parity::negative);
    CHECK_THAT(sup.norm_sq(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(sup.amplitudes[1], WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    CHECK_THAT(sup.amplitudes[7], WithinAbs(-1.0 / std::sqrt(2.0), 1e-15));

    CHECK_THROWS_AS(dicke_superposition(8, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(dicke_superposition(8, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(dicke_superposition(8, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(dicke_superposition(7, 2, 1), std::invalid_argument);
}

TEST_CASE("state_parity inspects the support", "[symspace]") {
    SymmetricState psi = dicke_state(6, 1);
    CHECK(state_parity(psi) == Parity::positive);  // m = 2
    psi.amplitudes[2] = 0.5;                       // mixes m = 1 in
    CHECK(state_parity(psi) == Parity::none);
    CHECK(state_parity(dicke_state(5, 2)) == Parity::none);  // odd N
}

TEST_CASE("require_normalized rejects bad states", "[symspace]") {
    SymmetricState psi = dicke_state(4, 2);
    CHECK_NOTHROW(require_normalized(psi));
    psi.amplitudes[0] = 0.5;
    CHECK_THROWS_AS(require_normalized(psi), std::invalid_argument);
    psi.amplitudes.pop_back();
    CHECK_THROWS_AS(require_normalized(psi), std::invalid_argument);
}

TEST_CASE("Schmidt coefficients are a normalized distribution", "[symspace]") {
    const LogFactorialTable lf(2000);
    for (int n : {2, 4, 16, 64, 256, 1024, 2000}) {
        for (int k : {0, 1, n / 2, n - 1, n}) {
            for (int na : {1, n / 4, n / 2}) {
                if (na < 1 || na > n / 2) continue;
                const Bipartition cut(na, n - na);
                const SchmidtSpectrum sp =
                    dicke_schmidt_coefficients(DickeIndex{n, k}, cut, lf);
                const int q_lo = std::max(0, k - cut.n_b());
                const int q_hi = std::min(na, k);
                CHECK(sp.q_min == q_lo);
                CHECK(static_cast<int>(sp.values.size()) == q_hi - q_lo + 1);
                double sum = 0.0;
                for (double v : sp.values) {
                    CHECK(v >= 0.0);
                    sum += v;
                }
                CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
            }
        }
    }
}

TEST_CASE("Schmidt spectrum matches the brute-force partial trace", "[symspace]") {
    const LogFactorialTable lf(12);
    for (int n : {6, 9, 12}) {
        for (int k : {1, n / 2}) {
            const int na = n / 3;
            const Bipartition cut(na, n - na);
            SchmidtSpectrum sp = dicke_schmidt_coefficients(DickeIndex{n, k}, cut, lf);
            const auto full = oracle::embed_symmetric(dicke_state(n, k));
            auto vals = oracle::jacobi_eigenvalues(
                oracle::partial_trace_rho_a(full, n, na), 1 << na);
            std::sort(vals.rbegin(), vals.rend());
            std::sort(sp.values.rbegin(), sp.values.rend());
            for (std::size_t i = 0; i < sp.values.size(); ++i)
                CHECK_THAT(sp.values[i], WithinAbs(vals[i], 1e-12));
        }
    }
}

TEST_CASE("collective expectations match the 2^N brute force", "[symspace]") {
    std::mt19937_64 rng(424242);
    for (int n = 2; n <= 10; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const SymmetricState psi = oracle::random_symmetric_state(n, rng);
            const CollectiveExpectations ex = collective_expectations(psi);
            const oracle::BruteExpectations ref = oracle::collective_brute(psi);
            CHECK_THAT(ex.jz, WithinAbs(ref.jz, 1e-10));
            CHECK_THAT(ex.jz_sq, WithinAbs(ref.jz_sq, 1e-10));
            CHECK_THAT(ex.jplus, WithinAbs(ref.jplus, 1e-10));
            CHECK_THAT(ex.anticomm, WithinAbs(ref.anticomm, 1e-10));
        }
    }
}

TEST_CASE("collective expectations of reference states", "[symspace]") {
    // fully polarized |j, j>
    const CollectiveExpectations top = collective_expectations(dicke_state(10, 0));
    CHECK_THAT(top.jz, WithinAbs(5.0, 1e-12));
    CHECK_THAT(top.jz_sq, WithinAbs(25.0, 1e-12));
    CHECK_THAT(top.jplus, WithinAbs(0.0, 1e-12));

    // (|j, m> + |j, -m>)/sqrt(2) has <Jz> = 0 and <Jz^2> = m^2
    const CollectiveExpectations sup =
        collective_expectations(dicke_superposition(12, 4, 1));
    CHECK_THAT(sup.jz, WithinAbs(0.0, 1e-12));
    CHECK_THAT(sup.jz_sq, WithinAbs(16.0, 1e-12));
    CHECK_THAT(sup.jplus, WithinAbs(0.0, 1e-12));

    SymmetricState bad = dicke_state(4, 2);
    bad.amplitudes[0] = 1.0;
    CHECK_THROWS_AS(collective_expectations(bad), std::invalid_argument);
}
