#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdgauss/bootstrap.hpp"
#include "hdgauss/distance.hpp"
#include "hdgauss/gauss_ball.hpp"
#include "hdgauss/rng.hpp"

using namespace hdgauss;

namespace {

Dataset gaussian_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    DgpSpec spec;
    spec.kind = DgpKind::iid_marginal;
    spec.marginal = Marginal::gaussian;
    spec.n = n;
    spec.d = d;
    return sample(spec, seed);
}

// Direct reading of the quantile definition: the smallest value v in the
// multiset with #{b : values_b > v}/B <= alpha.
double quantile_oracle(std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    const double b = static_cast<double>(values.size());
    for (double v : values) {
        std::size_t above = 0;
        for (double u : values)
            if (u > v) ++above;
        if (static_cast<double>(above) / b <= alpha) return v;
    }
    return values.back();
}

}  // namespace

TEST_CASE("efron stats on identical rows are identically zero") {
    const Dataset data(5, 2, std::vector<double>(10, 3.0), ScaleConvention::raw_xi, SymMatrix::identity(2));
    for (double v : efron_stats(data, 50, 7)) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("efron conditional second moment equals tr Sigma_hat") {
    // E[|W*|^2 | X] = tr(Sigma_hat) exactly; check the MC average.
    for (std::size_t d : {1, 3}) {
        const Dataset data = gaussian_data(40, d, 21 + d);
        const CovInfo c = estimate_cov_info(data, SymMatrix::identity(d));
        const double tr_hat = c.sigma_w.trace();
        const std::size_t b = 20000;
        const std::vector<double> stats = efron_stats(data, b, 5);
        double mean_sq = 0.0, mean_4 = 0.0;
        for (double v : stats) {
            mean_sq += v * v;
            mean_4 += v * v * v * v;
        }
        mean_sq /= static_cast<double>(b);
        mean_4 /= static_cast<double>(b);
        const double se = std::sqrt((mean_4 - mean_sq * mean_sq) / static_cast<double>(b));
        CHECK(std::abs(mean_sq - tr_hat) <= 4.0 * se);
    }
}

TEST_CASE("efron stats are deterministic in (X, B, seed)") {
    const Dataset data = gaussian_data(20, 2, 9);
    CHECK(efron_stats(data, 100, 3) == efron_stats(data, 100, 3));
    CHECK(efron_stats(data, 100, 3) != efron_stats(data, 100, 4));
}

TEST_CASE("wild stats: single nonzero row gives |v|/sqrt(n) for every replicate") {
    std::vector<double> rows(8 * 2, 0.0);
    rows[0] = 3.0;
    rows[1] = 4.0;
    const Dataset data(8, 2, std::move(rows), ScaleConvention::raw_xi, SymMatrix::identity(2));
    const double expect = 5.0 / std::sqrt(8.0);
    const std::vector<double> stats = wild_stats(data, 64, MultiplierDist::rademacher, 11);
    for (double v : stats) CHECK(v == doctest::Approx(expect).epsilon(1e-12));

    // Hence the quantile equals |v|/sqrt(n) at every alpha.
    for (double alpha : {0.05, 0.3, 0.7, 0.95})
        CHECK(bootstrap_quantile(stats, alpha) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("wild gaussian multipliers: |W deg|^2 follows the Sigma_bar quadratic form exactly") {
    const std::size_t n = 30, d = 3;
    const Dataset data = gaussian_data(n, d, 77);

    // Sigma_bar = n^{-1} sum X X^T in the X scale.
    SymMatrix bar(d);
    const double xf = data.x_scale_factor();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j; k < d; ++k)
                bar.at(j, k) += xf * data.xi(i, j) * xf * data.xi(i, k) / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j; k < d; ++k) bar.at(k, j) = bar.at(j, k);

    const WeightedChiSquare w = to_weighted_chi2(bar, std::vector<double>(d, 0.0));
    const std::size_t b = 5000;
    const std::vector<double> stats = wild_stats(data, b, MultiplierDist::gaussian, 13);
    std::vector<double> sq(stats);
    for (double& v : sq) v = v * v;
    const double ks = ks_statistic(sq, [&](double t) { return imhof_cdf(w, t, 1e-6); });
    CHECK(ks <= 1.63 / std::sqrt(static_cast<double>(b)));

    // Quantile consistency against the exact conditional law: invert the
    // CDF of |W deg| by bisection and compare at alpha = 0.1.
    const double alpha = 0.1;
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (imhof_cdf(w, mid * mid, 1e-8) < 1.0 - alpha ? lo : hi) = mid;
    }
    const double exact_q = 0.5 * (lo + hi);
    CHECK(bootstrap_quantile(stats, alpha) == doctest::Approx(exact_q).epsilon(0.05));
}

TEST_CASE("bootstrap quantile: spec examples") {
    CHECK(bootstrap_quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(3.0));
    CHECK(bootstrap_quantile({5.0}, 0.5) == doctest::Approx(5.0));
    for (double alpha : {0.1, 0.5, 0.9})
        CHECK(bootstrap_quantile({2.5, 2.5, 2.5}, alpha) == doctest::Approx(2.5));
    CHECK_THROWS_AS(bootstrap_quantile({}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_quantile({1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_quantile({1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("bootstrap quantile matches the enumeration oracle on small multisets") {
    const std::vector<double> alphabet = {0.5, 1.0, 2.0};
    std::vector<double> values;
    // All multisets of size <= 6 over a 3-value alphabet, by counting.
    for (int size = 1; size <= 6; ++size) {
        for (int a = 0; a <= size; ++a)
            for (int b = 0; a + b <= size; ++b) {
                const int c = size - a - b;
                values.clear();
                values.insert(values.end(), a, alphabet[0]);
                values.insert(values.end(), b, alphabet[1]);
                values.insert(values.end(), c, alphabet[2]);
                for (int k = 1; k < 20; ++k) {
                    const double alpha = k / 20.0;
                    CHECK(bootstrap_quantile(values, alpha) == quantile_oracle(values, alpha));
                }
                // Tie-sensitive alphas right at the count fractions.
                for (int k = 1; k < size; ++k) {
                    const double frac = static_cast<double>(k) / size;
                    for (double alpha : {frac - 1e-9, frac, frac + 1e-9})
                        if (alpha > 0.0 && alpha < 1.0)
                            CHECK(bootstrap_quantile(values, alpha) == quantile_oracle(values, alpha));
                }
            }
    }
}

TEST_CASE("bootstrap quantile is nonincreasing in alpha") {
    CounterRng rng(15);
    std::vector<double> values(200);
    for (double& v : values) v = std::abs(rng.next_gaussian());
    double prev = 1e300;
    for (double alpha = 0.02; alpha < 1.0; alpha += 0.02) {
        const double q = bootstrap_quantile(values, alpha);
        CHECK(q <= prev);
        prev = q;
    }
}

TEST_CASE("coverage experiment: wide-band sanity, determinism, degenerate data") {
    DgpSpec spec;
    spec.kind = DgpKind::iid_marginal;
    spec.marginal = Marginal::gaussian;
    spec.n = 50;
    spec.d = 2;
    const CoverageResult r1 = coverage_experiment(spec, 0.5, 200, 200, BootstrapKind::efron, 4, 1);
    const CoverageResult r3 = coverage_experiment(spec, 0.5, 200, 200, BootstrapKind::efron, 4, 3);
    CHECK(r1.coverage == r3.coverage);
    CHECK(r1.exceed == r3.exceed);
    CHECK(std::abs(r1.coverage - 0.5) <= 0.15);
    CHECK(r1.stderr_ == doctest::Approx(std::sqrt(r1.coverage * (1.0 - r1.coverage) / 200.0)));

    const CoverageResult rw = coverage_experiment(spec, 0.5, 200, 200, BootstrapKind::wild, 4, 1);
    CHECK(std::abs(rw.coverage - 0.5) <= 0.15);

    CHECK_THROWS_AS(coverage_experiment(spec, 0.5, 200, 50, BootstrapKind::efron, 4, 1), std::invalid_argument);
}

TEST_CASE("op norm delta: zero case, norm ordering, gaussian scale band") {
    // Rows chosen so Sigma_hat equals diag(1/2, 1/2) exactly.
    const Dataset data(4, 2, {1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0}, ScaleConvention::x_over_sqrt_n,
                       SymMatrix::identity(2));
    const OpNormDelta z = op_norm_delta(data, SymMatrix::diagonal({0.5, 0.5}), BootstrapKind::efron);
    CHECK(z.op_norm <= 1e-12);

    CounterRng rng(31);
    double avg = 0.0;
    const int reps = 30;
    const std::size_t n = 200, d = 10;
    for (int rep = 0; rep < reps; ++rep) {
        const Dataset g = gaussian_data(n, d, rng.next_u64());
        const OpNormDelta v = op_norm_delta(g, SymMatrix::identity(d), BootstrapKind::efron);
        CHECK(v.op_norm <= v.hs_norm * (1.0 + 1e-12));
        CHECK(v.hs_surrogate > 0.0);
        avg += v.op_norm / reps;
    }
    const double shape = std::sqrt(static_cast<double>(d) / n) + static_cast<double>(d) / n;
    CHECK(avg >= shape / 3.0);
    CHECK(avg <= shape * 3.0);
}
