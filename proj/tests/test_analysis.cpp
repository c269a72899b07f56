#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "spinlab/analysis.hpp"

using namespace spinlab;
using Catch::Matchers::WithinAbs;

TEST_CASE("pairwise sum and average", "[analysis]") {
    std::vector<double> v(100000);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(pairwise_sum(v) == 100000.0 * 100001.0 / 2.0);
    CHECK_THAT(average_ee(v), WithinAbs(100001.0 / 2.0, 1e-9));
    CHECK_THROWS_AS(average_ee(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("sector cap and normalized samples", "[analysis]") {
    CHECK_THAT(sector_entropy_cap(3), WithinAbs(2.0, 1e-15));
    CHECK_THROWS_AS(sector_entropy_cap(0), std::invalid_argument);
    const ScalingSample s = normalized_average("dicke", 16, 0.25, 1.5);
    CHECK(s.n_qubits == 16);
    CHECK_THAT(s.s_max, WithinAbs(std::log2(5.0), 1e-15));
    CHECK_THAT(s.normalized, WithinAbs(1.5 / std::log2(5.0), 1e-15));
}

TEST_CASE("average entropy bounds bracket the Dicke-basis mean", "[analysis]") {
    const LogFactorialTable lf(1000);
    for (double p : {0.25, 0.5}) {
        const Bipartition cut = Bipartition::fraction_of(1000, p);
        const double avg = dicke_basis_average_ee(1000, cut, lf);
        CHECK(dicke_average_lower_bound(1000, p) < avg);
        CHECK(avg < dicke_average_upper_bound(1000, p));
    }
    CHECK_THROWS_AS(dicke_average_upper_bound(1000, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(dicke_average_lower_bound(1000, 0.0), std::invalid_argument);
}

TEST_CASE("basis averages fold the ladder correctly", "[analysis]") {
    const LogFactorialTable lf(9);
    for (int n : {8, 9}) {
        const Bipartition cut(n / 2, n - n / 2);
        std::vector<double> all;
        for (int k = 0; k <= n; ++k)
            all.push_back(dicke_ee_exact(DickeIndex{n, k}, cut, lf));
        const double direct = average_ee(all);
        CHECK_THAT(dicke_basis_average_ee(n, cut, lf), WithinAbs(direct, 1e-14));
    }

    const int n = 8, j = 4;
    const Bipartition half = Bipartition::half_of(n);
    double total = dicke_ee_exact(DickeIndex{n, j}, half, lf);
    for (int m = 1; m <= j; ++m) total += 2.0 * superposition_ee(n, m, +1, half, lf);
    CHECK_THAT(superposition_basis_average_ee(n, half, lf),
               WithinAbs(total / (n + 1.0), 1e-14));
    CHECK_THROWS_AS(superposition_basis_average_ee(9, Bipartition(4, 5), lf),
                    std::invalid_argument);
}

TEST_CASE("one-qubit Dicke average", "[analysis]") {
    const double h14 = 0.8112781244591329;  // binary entropy of 1/4
    CHECK_THAT(one_qubit_dicke_average_ee(4), WithinAbs((2.0 * h14 + 1.0) / 5.0, 1e-15));
    CHECK_THROWS_AS(one_qubit_dicke_average_ee(0), std::invalid_argument);
}

TEST_CASE("solved sectors expose consistent profiles", "[analysis]") {
    const LmgParams params{5.0, -3.0, 1.0};
    const int n = 8;
    const LogFactorialTable lf(n);
    const SolvedSector solved = solve_sector(params, n, Parity::positive);
    REQUIRE(solved.block.dim() == 5);
    REQUIRE(solved.eig.has_vectors());

    const Bipartition half = Bipartition::half_of(n);
    const std::vector<double> s = sector_entropies(solved, half, lf);
    REQUIRE(s.size() == 5);
    for (int i = 0; i < 5; ++i) {
        const SymmetricState psi = eigenvector_state(solved.block, solved.eig, i);
        CHECK_THAT(s[i], WithinAbs(oracle::entanglement_entropy(psi, 4), 1e-9));
    }

    const SpectrumEntanglementProfile prof = ee_profile(solved, half, lf);
    CHECK(prof.sector == Parity::positive);
    CHECK(prof.energies == solved.eig.values);
    CHECK(prof.entropies == s);
    CHECK_THAT(prof.fraction, WithinAbs(0.5, 1e-15));
    for (std::size_t i = 0; i < prof.energies.size(); ++i)
        CHECK_THAT(prof.scaled_energies[i], WithinAbs(prof.energies[i] / 4.0, 1e-15));
}

TEST_CASE("sector entropies are deterministic across thread counts", "[analysis]") {
    const LmgParams params{2.0, 0.5, 1.0};
    const int n = 32;
    const LogFactorialTable lf(n);
    const SolvedSector solved = solve_sector(params, n, Parity::negative);
    const auto serial = sector_entropies(solved, Bipartition::half_of(n), lf, 1);
    const auto parallel = sector_entropies(solved, Bipartition::half_of(n), lf, 4);
    CHECK(serial == parallel);
}

TEST_CASE("fixed-intercept fit on exact and noisy lines", "[analysis]") {
    const std::vector<double> x{0.1, 0.2, 0.3, 0.5};
    std::vector<double> y;
    for (double xi : x) y.push_back(0.3 + 2.0 * xi);
    const FitResult fit = fixed_intercept_fit(x, y, 0.3);
    CHECK_THAT(fit.slope, WithinAbs(2.0, 1e-14));
    CHECK_THAT(fit.r_squared, WithinAbs(1.0, 1e-14));
    CHECK(fit.n_points == 4);

    // wrong intercept cannot reach R^2 = 1
    const FitResult off = fixed_intercept_fit(x, y, 0.25);
    CHECK(off.r_squared < 1.0 - 1e-4);

    CHECK_THROWS_AS(fixed_intercept_fit(std::vector<double>{1.0}, std::vector<double>{1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fixed_intercept_fit(std::vector<double>{1.0, 1.0},
                                        std::vector<double>{1.0, 2.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fixed_intercept_fit(x, std::vector<double>{1.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("fit handles flat data conventionally", "[analysis]") {
    const std::vector<double> x{1.0, 2.0};
    const FitResult perfect = fixed_intercept_fit(x, std::vector<double>{0.3, 0.3}, 0.3);
    CHECK(perfect.slope == 0.0);
    CHECK(perfect.r_squared == 1.0);

    // mismatched flat data: under the through-origin convention R^2 stays
    // finite, just short of 1
    const FitResult off = fixed_intercept_fit(x, std::vector<double>{0.4, 0.4}, 0.3);
    CHECK(off.r_squared < 1.0);
    CHECK_THAT(off.r_squared, WithinAbs(1.0 - 0.002 / 0.32, 1e-12));

    // an identically zero response with a nonzero forced intercept has
    // nothing in the denominator to explain
    const FitResult zero = fixed_intercept_fit(x, std::vector<double>{0.0, 0.0}, 0.3);
    CHECK(std::isinf(zero.r_squared));
    CHECK(zero.r_squared < 0.0);
}

TEST_CASE("intercept scan walks a closed grid and finds the planted value",
          "[analysis]") {
    const std::vector<double> x{0.05, 0.1, 0.2, 0.4};
    std::vector<double> y;
    for (double xi : x) y.push_back(0.5 - 1.3 * xi);
    const auto scan = intercept_scan(x, y, 0.4, 0.6, 0.05);
    REQUIRE(scan.size() == 5);
    CHECK_THAT(scan.front().intercept, WithinAbs(0.4, 1e-12));
    CHECK_THAT(scan.back().intercept, WithinAbs(0.6, 1e-12));
    CHECK_THAT(best_intercept(scan), WithinAbs(0.5, 1e-12));
    CHECK_THROWS_AS(intercept_scan(x, y, 0.6, 0.4, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(best_intercept(std::vector<InterceptScanPoint>{}),
                    std::invalid_argument);
}

TEST_CASE("density-of-states histogram conventions", "[analysis]") {
    const std::vector<double> vals{0.0, 1.0, 2.0, 3.0};
    const DosHistogram h = dos_histogram(vals, 2);
    REQUIRE(h.edges.size() == 3);
    CHECK_THAT(h.edges[1], WithinAbs(1.5, 1e-15));
    CHECK(h.counts == std::vector<int>{2, 2});  // top edge right-inclusive

    const DosHistogram flat = dos_histogram(std::vector<double>{2.0, 2.0, 2.0}, 4);
    CHECK(flat.counts == std::vector<int>{3, 0, 0, 0});

    const DosHistogram peaked =
        dos_histogram(std::vector<double>{0.0, 0.4, 0.5, 0.6, 1.0}, 3);
    CHECK(mode_bin(peaked) == 1);

    CHECK_THROWS_AS(dos_histogram(vals, 0), std::invalid_argument);
    CHECK_THROWS_AS(dos_histogram(std::vector<double>{}, 3), std::invalid_argument);
}

TEST_CASE("moving average keeps edges raw", "[analysis]") {
    const std::vector<double> v{1.0, 5.0, 1.0, 5.0, 1.0};
    const auto out = moving_average(v, 3);
    CHECK(out[0] == 1.0);
    CHECK(out[4] == 1.0);
    CHECK_THAT(out[1], WithinAbs(7.0 / 3.0, 1e-15));
    CHECK_THAT(out[2], WithinAbs(11.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(moving_average(v, 2), std::invalid_argument);
    CHECK_THROWS_AS(moving_average(v, -1), std::invalid_argument);
    // window larger than the data leaves it untouched
    CHECK(moving_average(v, 11) == v);
}

TEST_CASE("dip detection on a synthetic V profile", "[analysis]") {
    std::vector<double> v(101);
    for (int i = 0; i <= 100; ++i) {
        v[i] = std::abs(i - 50) / 10.0;
        if (i % 2 == 0) v[i] += 0.01;  // ripple the smoothing must remove
    }
    const auto dips = profile_dip_indices(v, 5);
    REQUIRE(dips.size() == 1);
    CHECK(dips[0] == 50);
    CHECK_THROWS_AS(profile_dip_indices(v, 5, 0.7), std::invalid_argument);
}

TEST_CASE("cut-fraction profiles agree with their underlying averages", "[analysis]") {
    const int n = 64;
    const LogFactorialTable lf(n);
    const std::vector<double> fractions{0.125, 0.25, 0.5};

    const auto dicke = c0_profile_dicke(n, fractions, lf);
    REQUIRE(dicke.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const Bipartition cut = Bipartition::fraction_of(n, fractions[i]);
        CHECK(dicke[i].fraction == fractions[i]);
        CHECK_THAT(dicke[i].s_max, WithinAbs(sector_entropy_cap(cut.n_a()), 1e-15));
        CHECK_THAT(dicke[i].average,
                   WithinAbs(dicke_basis_average_ee(n, cut, lf), 1e-14));
        CHECK_THAT(dicke[i].c0, WithinAbs(dicke[i].average / dicke[i].s_max, 1e-15));
    }

    const LmgParams params{5.0, -3.0, 1.0};
    const auto lmg = c0_profile_lmg(params, 32, Parity::positive, fractions, LogFactorialTable(32));
    REQUIRE(lmg.size() == 3);
    const SolvedSector solved = solve_sector(params, 32, Parity::positive);
    for (std::size_t i = 0; i < 3; ++i) {
        const Bipartition cut = Bipartition::fraction_of(32, fractions[i]);
        const double avg = average_ee(sector_entropies(solved, cut, LogFactorialTable(32)));
        CHECK_THAT(lmg[i].average, WithinAbs(avg, 1e-14));
        CHECK(lmg[i].c0 > 0.0);
        CHECK(lmg[i].c0 < 1.0);
    }
}
