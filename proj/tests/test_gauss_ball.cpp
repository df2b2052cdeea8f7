#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdgauss/distance.hpp"
#include "hdgauss/gauss_ball.hpp"
#include "hdgauss/rng.hpp"
#include "hdgauss/spectral.hpp"

using namespace hdgauss;

namespace {

// Independent two-weight oracle: P(l1 (G1+c1)^2 + l2 (G2+c2)^2 <= x) by
// conditioning on G1 and integrating the exact normal inner probability with
// Simpson on the substitution g = -c1 + sqrt(x/l1) sin(phi). Built before the
// inversion-integral implementation and kept independent of it.
double conv_oracle_two(double l1, double l2, double c1, double c2, double x) {
    if (x <= 0.0) return 0.0;
    const double half_width = std::sqrt(x / l1);
    const auto inner = [&](double g) {
        const double y = (x - l1 * (g + c1) * (g + c1)) / l2;
        if (y <= 0.0) return 0.0;
        const double s = std::sqrt(y);
        return 0.5 * (std::erf((s - c2) / std::sqrt(2.0)) + std::erf((s + c2) / std::sqrt(2.0)));
    };
    const auto phi_pdf = [](double g) { return std::exp(-0.5 * g * g) / std::sqrt(2.0 * M_PI); };
    const int n = 20000;
    const double h = M_PI / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double phi = -0.5 * M_PI + h * i;
        const double g = -c1 + half_width * std::sin(phi);
        const double f = phi_pdf(g) * half_width * std::cos(phi) * inner(g);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * f;
    }
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("chi2_cdf closed forms") {
    CHECK(chi2_cdf(2, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(chi2_cdf(4, 2.0) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-13));
    for (double x : {0.3, 1.0, 2.5, 7.0, 20.0}) {
        CHECK(std::abs(chi2_cdf(2, x) - (1.0 - std::exp(-0.5 * x))) <= 1e-12);
        CHECK(std::abs(chi2_cdf(4, x) - (1.0 - std::exp(-0.5 * x) * (1.0 + 0.5 * x))) <= 1e-12);
        // d=1 reduces to the normal CDF through an unrelated code path.
        CHECK(std::abs(chi2_cdf(1, x) - (2.0 * normal_cdf(std::sqrt(x)) - 1.0)) <= 1e-12);
    }
    CHECK(chi2_cdf(7, 0.0) == 0.0);
    CHECK(chi2_cdf(1, -1.0) == 0.0);
}

TEST_CASE("to_weighted_chi2 structure") {
    {
        const WeightedChiSquare w = to_weighted_chi2(SymMatrix::identity(3), {0.0, 0.0, 0.0});
        REQUIRE(w.weights.size() == 3);
        for (double v : w.weights) CHECK(v == doctest::Approx(1.0));
        for (double v : w.noncentralities) CHECK(v == doctest::Approx(0.0));
        CHECK(w.offset == doctest::Approx(0.0));
    }
    {
        const WeightedChiSquare w = to_weighted_chi2(SymMatrix::diagonal({4.0, 0.0}), {0.0, 3.0});
        REQUIRE(w.weights.size() == 1);
        CHECK(w.weights[0] == doctest::Approx(4.0));
        CHECK(w.offset == doctest::Approx(9.0));
    }
    CHECK_THROWS_AS(to_weighted_chi2(SymMatrix::diagonal({1.0, -1.0}), {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("to_weighted_chi2 sampling oracle on a random SPD matrix") {
    CounterRng rng(404);
    std::vector<double> g(9);
    for (double& v : g) v = rng.next_gaussian();
    std::vector<double> a(9, 0.0);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            double s = 0.0;
            for (int r = 0; r < 3; ++r) s += g[r * 3 + j] * g[r * 3 + k];
            a[j * 3 + k] = s + (j == k ? 0.2 : 0.0);
        }
    const SymMatrix sigma(3, a);
    const std::vector<double> mu = {0.4, -1.0, 0.7};
    const WeightedChiSquare w = to_weighted_chi2(sigma, mu);

    const SpectralSummary s = sym_eigen(sigma);
    const std::size_t m = 5000;
    std::vector<double> samples(m);
    for (std::size_t i = 0; i < m; ++i) {
        double z[3] = {mu[0], mu[1], mu[2]};
        for (int j = 0; j < 3; ++j) {
            const double gj = std::sqrt(std::max(0.0, s.eigenvalues[j])) * rng.next_gaussian();
            for (int r = 0; r < 3; ++r) z[r] += s.basis[j * 3 + r] * gj;
        }
        samples[i] = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    }
    const double d = ks_statistic(samples, [&](double t) { return imhof_cdf(w, t - w.offset, 1e-6); });
    CHECK(d <= 1.63 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("imhof_cdf with unit weights matches chi2_cdf") {
    for (std::size_t d : {1, 2, 5, 50}) {
        WeightedChiSquare w;
        w.weights.assign(d, 1.0);
        w.noncentralities.assign(d, 0.0);
        for (double mult : {0.5, 1.0, 2.0}) {
            const double x = mult * static_cast<double>(d);
            double err = 0.0;
            const double p = imhof_cdf(w, x, 1e-7, &err);
            CHECK(std::abs(p - chi2_cdf(d, x)) <= 1e-6);
            CHECK(err <= 1e-7);
        }
    }
}

TEST_CASE("imhof_cdf single-weight closed form") {
    WeightedChiSquare w;
    w.weights = {4.0};
    w.noncentralities = {0.0};
    CHECK(imhof_cdf(w, 4.0, 1e-9) == doctest::Approx(2.0 * normal_cdf(1.0) - 1.0).epsilon(1e-12));
    CHECK(imhof_cdf(w, 4.0, 1e-9) == doctest::Approx(0.682689492137086).epsilon(1e-10));
}

TEST_CASE("imhof_cdf central two-weight value against the convolution oracle") {
    WeightedChiSquare w;
    w.weights = {2.0, 1.0};
    w.noncentralities = {0.0, 0.0};
    const double oracle = conv_oracle_two(2.0, 1.0, 0.0, 0.0, 3.0);
    double err = 0.0;
    const double p = imhof_cdf(w, 3.0, 1e-8, &err);
    CHECK(std::abs(p - oracle) <= 1e-6);

    // A noncentral pair, same oracle.
    w.noncentralities = {0.25, 1.44};  // c = (0.5, 1.2)
    const double oracle_nc = conv_oracle_two(2.0, 1.0, 0.5, 1.2, 3.0);
    CHECK(std::abs(imhof_cdf(w, 3.0, 1e-8) - oracle_nc) <= 1e-6);
}

TEST_CASE("imhof_cdf is nondecreasing in x") {
    WeightedChiSquare w;
    w.weights = {3.0, 1.0, 0.5};
    w.noncentralities = {0.1, 0.0, 2.0};
    double prev = -1.0;
    for (double x = 0.0; x <= 20.0; x += 0.5) {
        const double p = imhof_cdf(w, x, 1e-7);
        CHECK(p >= prev - 1e-7);
        prev = p;
    }
    CHECK(prev <= 1.0);
    CHECK(imhof_cdf(w, 0.0, 1e-7) == 0.0);
}

TEST_CASE("imhof_cdf input validation") {
    WeightedChiSquare w;
    w.weights = {1.0};
    w.noncentralities = {0.0};
    CHECK_THROWS_AS(imhof_cdf(w, 1.0, 1e-10), std::invalid_argument);
    w.weights = {-1.0};
    CHECK_THROWS_AS(imhof_cdf(w, 1.0, 1e-8), std::invalid_argument);
}

TEST_CASE("ball_prob dispatch and examples") {
    CHECK(ball_prob(SymMatrix::identity(2), {0.0, 0.0}, std::sqrt(2.0), 1e-8) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
    CHECK(ball_prob(SymMatrix::identity(2), {0.5, 0.0}, 0.0, 1e-8) == 0.0);
    CHECK(ball_prob(SymMatrix::identity(2), {0.0, 0.0}, 0.0, 1e-8) == 0.0);

    const double oracle = conv_oracle_two(2.0, 1.0, 0.0, 0.0, 3.0);
    CHECK(ball_prob(SymMatrix::diagonal({2.0, 1.0}), {0.0, 0.0}, std::sqrt(3.0), 1e-8) ==
          doctest::Approx(oracle).epsilon(2e-6));

    // Rank-deficient with mean mass on the null space.
    const double p = ball_prob(SymMatrix::diagonal({4.0, 0.0}), {0.0, 3.0}, 3.5, 1e-8);
    // P(4 G^2 <= 3.5^2 - 9) = P(|G| <= sqrt(3.25)/2)
    CHECK(p == doctest::Approx(2.0 * normal_cdf(std::sqrt(3.25) / 2.0) - 1.0).epsilon(1e-10));
    CHECK(ball_prob(SymMatrix::diagonal({4.0, 0.0}), {0.0, 3.0}, 2.9, 1e-8) == 0.0);
    CHECK(ball_prob(SymMatrix::diagonal({0.0, 0.0}), {0.0, 0.0}, 0.0, 1e-8) == 1.0);

    CHECK_THROWS_AS(ball_prob(SymMatrix::identity(2), {0.0, 0.0}, -1.0, 1e-8), std::invalid_argument);
}

TEST_CASE("ball_prob is invariant under simultaneous rotation of sigma and mu") {
    const double a = 0.83;
    const std::vector<double> u = {std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
    const SymMatrix sigma = SymMatrix::diagonal({2.0, 0.5});
    SymMatrix rotated(2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k) s += u[r * 2 + k] * sigma(k, k) * u[c * 2 + k];
            rotated.at(r, c) = s;
        }
    const std::vector<double> mu = {0.7, -0.3};
    const std::vector<double> rmu = {u[0] * mu[0] + u[1] * mu[1], u[2] * mu[0] + u[3] * mu[1]};
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        const double p0 = ball_prob(sigma, mu, r, 1e-8);
        const double p1 = ball_prob(rotated, rmu, r, 1e-8);
        CHECK(std::abs(p0 - p1) <= 2e-8);
    }
}

TEST_CASE("anti-concentration ratio: isotropic small-eps limit") {
    // For I_2 the squared norm is chi^2_2 with density max 1/2 at 0, and
    // kappa = 2^{-1/4}, so the small-eps ratio tends to 2^{-3/4}.
    const SymMatrix id2 = SymMatrix::identity(2);
    const double ratio = anti_concentration_ratio(id2, {0.0, 0.0}, 0.02, anti_concentration_grid_max(id2), 0.01);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -0.75)).epsilon(0.02));
}

TEST_CASE("anti-concentration ratio: eps stability and anisotropic case") {
    const SymMatrix id5 = SymMatrix::identity(5);
    const double gm = anti_concentration_grid_max(id5);
    const double r1 = anti_concentration_ratio(id5, std::vector<double>(5, 0.0), 0.2, gm, 0.1);
    const double r2 = anti_concentration_ratio(id5, std::vector<double>(5, 0.0), 0.1, gm, 0.05);
    CHECK(std::abs(r2 - r1) <= 0.10 * std::max(r1, r2));

    const SymMatrix diag = SymMatrix::diagonal({2.0, 1.0, 0.5});
    const double r3 =
        anti_concentration_ratio(diag, {0.0, 0.0, 0.0}, 0.1, anti_concentration_grid_max(diag), 0.05);
    CHECK(r3 > 0.0);
    CHECK(std::isfinite(r3));

    CHECK_THROWS_AS(anti_concentration_ratio(SymMatrix::diagonal({1.0, 0.0}), {0.0, 0.0}, 0.1, 1.0, 0.1),
                    std::runtime_error);
}
