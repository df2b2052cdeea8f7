#include "hdgauss/gauss_ball.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hdgauss {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("reg_lower_gamma: a must be > 0");
    if (x < 0.0) throw std::invalid_argument("reg_lower_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series.
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-17) break;
        }
        return std::min(1.0, sum * std::exp(log_prefix));
    }
    // Upper continued fraction (modified Lentz).
    double b = x + 1.0 - a;
    double c = 1e308;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
}

double chi2_cdf(std::size_t d, double x) {
    if (d == 0) throw std::invalid_argument("chi2_cdf: d must be >= 1");
    if (x <= 0.0) return 0.0;
    return reg_lower_gamma(0.5 * static_cast<double>(d), 0.5 * x);
}

WeightedChiSquare to_weighted_chi2(const SymMatrix& sigma, const std::vector<double>& mu) {
    const std::size_t d = sigma.dim();
    if (mu.size() != d) throw std::invalid_argument("to_weighted_chi2: mu dimension mismatch");
    const SpectralSummary s = sym_eigen(sigma);
    WeightedChiSquare out;
    for (std::size_t j = 0; j < d; ++j) {
        const double lam = s.eigenvalues[j];
        if (lam < -1e-10 * std::max(1.0, s.op_norm))
            throw std::invalid_argument("to_weighted_chi2: sigma is not positive semidefinite");
        double b = 0.0;
        for (std::size_t r = 0; r < d; ++r) b += s.basis[j * d + r] * mu[r];
        if (lam > 0.0) {
            out.weights.push_back(lam);
            out.noncentralities.push_back(b * b / lam);
        } else {
            out.offset += b * b;
        }
    }
    return out;
}

namespace {

struct ImhofTerms {
    const std::vector<double>& lam;
    const std::vector<double>& nc;
    double x;

    double theta(double u) const {
        double s = 0.0;
        for (std::size_t j = 0; j < lam.size(); ++j) {
            const double lu = lam[j] * u;
            s += std::atan(lu) + nc[j] * lu / (1.0 + lu * lu);
        }
        return 0.5 * (s - x * u);
    }

    double log_rho(double u) const {
        double s = 0.0;
        for (std::size_t j = 0; j < lam.size(); ++j) {
            const double lu2 = lam[j] * u * lam[j] * u;
            s += 0.25 * std::log1p(lu2) + 0.5 * nc[j] * lu2 / (1.0 + lu2);
        }
        return s;
    }

    double integrand(double u) const {
        if (u == 0.0) {
            double s = 0.0;
            for (std::size_t j = 0; j < lam.size(); ++j) s += lam[j] * (1.0 + nc[j]);
            return 0.5 * (s - x);
        }
        return std::sin(theta(u)) * std::exp(-log_rho(u)) / u;
    }

    // Upper bound on |theta'(u) + x/2| for all u' >= u; decreasing in u.
    double phase_slack(double u) const {
        double s = 0.0;
        for (std::size_t j = 0; j < lam.size(); ++j)
            s += lam[j] * (1.0 + nc[j]) / (1.0 + lam[j] * u * lam[j] * u);
        return 0.5 * s;
    }
};

// Bound on the neglected tail (result scale, 1/pi included): the classical
// modulus bound, improved by an oscillation bound once the phase derivative
// is provably pinned near -x/2.
double tail_bound(const ImhofTerms& t, double u) {
    const std::size_t k = t.lam.size();
    double sum_log_lam = 0.0;
    for (double l : t.lam) sum_log_lam += std::log(l);
    const double log_mod = std::log(2.0 / (M_PI * static_cast<double>(k))) -
                           0.5 * static_cast<double>(k) * std::log(u) - 0.5 * sum_log_lam;
    double bound = std::exp(std::min(log_mod, 700.0));
    const double slack = t.phase_slack(u);
    if (t.x > 0.0 && slack <= t.x / 200.0) {
        const double theta_min = 0.5 * t.x - slack;
        const double osc = (4.0 / M_PI) * std::exp(-t.log_rho(u)) / (u * theta_min);
        bound = std::min(bound, osc);
    }
    return bound;
}

double simpson(const ImhofTerms& t, double a, double b, std::size_t panels, std::size_t* evals) {
    const double h = (b - a) / static_cast<double>(2 * panels);
    double s_end = t.integrand(a) + t.integrand(b);
    double s_odd = 0.0;
    double s_even = 0.0;
    for (std::size_t i = 1; i < 2 * panels; ++i) {
        const double v = t.integrand(a + h * static_cast<double>(i));
        if (i & 1)
            s_odd += v;
        else
            s_even += v;
    }
    *evals += 2 * panels + 1;
    return (h / 3.0) * (s_end + 4.0 * s_odd + 2.0 * s_even);
}

}  // namespace

double imhof_cdf(const WeightedChiSquare& w, double x, double tol, double* achieved_err) {
    if (tol < 1e-9) throw std::invalid_argument("imhof_cdf: tol must be >= 1e-9");
    if (w.weights.size() != w.noncentralities.size())
        throw std::invalid_argument("imhof_cdf: weights/noncentralities size mismatch");
    for (double l : w.weights)
        if (!(l > 0.0)) throw std::invalid_argument("imhof_cdf: weights must be strictly positive");
    for (double c : w.noncentralities)
        if (c < 0.0) throw std::invalid_argument("imhof_cdf: noncentralities must be >= 0");

    if (achieved_err) *achieved_err = 0.0;
    if (w.weights.empty()) return x >= 0.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 0.0;

    if (w.weights.size() == 1) {
        // lam (G+c)^2 <= x  <=>  -s-c <= G <= s-c with s = sqrt(x/lam).
        const double s = std::sqrt(x / w.weights[0]);
        const double c = std::sqrt(w.noncentralities[0]);
        return std::max(0.0, normal_cdf(s - c) - normal_cdf(-s - c));
    }

    const ImhofTerms t{w.weights, w.noncentralities, x};

    const double lam_max = *std::max_element(w.weights.begin(), w.weights.end());
    double trunc = 1.0 / lam_max;
    double tail = tail_bound(t, trunc);
    int doublings = 0;
    while (tail > 0.5 * tol) {
        trunc *= 2.0;
        tail = tail_bound(t, trunc);
        if (++doublings > 400) {
            if (achieved_err) *achieved_err = tail;
            throw std::runtime_error("imhof_cdf: truncation point not found, achieved error estimate " +
                                     std::to_string(tail));
        }
    }

    // Geometric segments from the spectral scale out to the truncation point.
    std::vector<double> cuts;
    cuts.push_back(0.0);
    double s1 = std::min(1.0 / lam_max, trunc);
    for (double c = s1; c < trunc; c *= 2.0) cuts.push_back(c);
    cuts.push_back(trunc);

    const std::size_t nseg = cuts.size() - 1;
    const double seg_budget = 0.5 * tol * M_PI / static_cast<double>(nseg);
    constexpr std::size_t kMaxEvals = 400000000;
    std::size_t evals = 0;
    double integral = 0.0;
    double quad_err = 0.0;
    for (std::size_t s = 0; s < nseg; ++s) {
        const double a = cuts[s];
        const double b = cuts[s + 1];
        const double rate = 0.5 * x + t.phase_slack(a);
        std::size_t panels = static_cast<std::size_t>(
            std::clamp(std::ceil((b - a) * rate / 1.0), 4.0, 4.0e6));
        double coarse = simpson(t, a, b, panels, &evals);
        double fine = simpson(t, a, b, 2 * panels, &evals);
        double err = std::abs(fine - coarse) / 15.0;
        while (err > seg_budget) {
            if (evals > kMaxEvals) {
                const double achieved = tail + (quad_err + err) / M_PI;
                if (achieved_err) *achieved_err = achieved;
                throw std::runtime_error("imhof_cdf: quadrature budget exhausted, achieved error estimate " +
                                         std::to_string(achieved));
            }
            panels *= 2;
            coarse = fine;
            fine = simpson(t, a, b, 2 * panels, &evals);
            err = std::abs(fine - coarse) / 15.0;
        }
        integral += fine;
        quad_err += err;
    }

    if (achieved_err) *achieved_err = tail + quad_err / M_PI;
    return std::clamp(0.5 - integral / M_PI, 0.0, 1.0);
}

namespace {

bool is_isotropic(const SymMatrix& sigma, double* variance) {
    const std::size_t d = sigma.dim();
    const double v = sigma(0, 0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            const double want = j == k ? v : 0.0;
            if (sigma(j, k) != want) return false;
        }
    *variance = v;
    return true;
}

}  // namespace

double ball_prob(const SymMatrix& sigma, const std::vector<double>& mu, double r, double tol,
                 double* achieved_err) {
    if (r < 0.0) throw std::invalid_argument("ball_prob: r must be >= 0");
    if (mu.size() != sigma.dim()) throw std::invalid_argument("ball_prob: mu dimension mismatch");
    if (achieved_err) *achieved_err = 0.0;

    const bool mu_zero = std::all_of(mu.begin(), mu.end(), [](double v) { return v == 0.0; });
    double variance = 0.0;
    if (mu_zero && is_isotropic(sigma, &variance)) {
        if (variance == 0.0) return 1.0;  // point mass at the origin
        return chi2_cdf(sigma.dim(), r * r / variance);
    }

    const WeightedChiSquare w = to_weighted_chi2(sigma, mu);
    const double x = r * r - w.offset;
    if (w.weights.empty()) return x >= 0.0 ? 1.0 : 0.0;
    return imhof_cdf(w, x, tol, achieved_err);
}

double anti_concentration_grid_max(const SymMatrix& sigma) {
    const SpectralSummary s = sym_eigen(sigma);
    return s.trace + 6.0 * s.lambda1;
}

double anti_concentration_ratio(const SymMatrix& sigma, const std::vector<double>& mu, double eps,
                                double grid_max, double grid_step) {
    if (!(eps > 0.0)) throw std::invalid_argument("anti_concentration_ratio: eps must be > 0");
    if (!(grid_step > 0.0)) throw std::invalid_argument("anti_concentration_ratio: grid_step must be > 0");
    if (grid_max < 0.0) throw std::invalid_argument("anti_concentration_ratio: grid_max must be >= 0");
    const SpectralSummary s = sym_eigen(sigma);
    const double kap = kappa(s);  // throws on rank deficiency

    const bool mu_zero = std::all_of(mu.begin(), mu.end(), [](double v) { return v == 0.0; });
    double variance = 0.0;
    const bool iso = mu_zero && is_isotropic(sigma, &variance) && variance > 0.0;
    WeightedChiSquare w;
    if (!iso) w = to_weighted_chi2(sigma, mu);

    const double cdf_tol = std::clamp(kap * eps * 1e-3, 1e-9, 1e-6);
    auto sq_cdf = [&](double a) {
        if (a <= 0.0) return 0.0;
        if (iso) return chi2_cdf(sigma.dim(), a / variance);
        return imhof_cdf(w, a - w.offset, cdf_tol);
    };

    double best = 0.0;
    for (double a = 0.0; a <= grid_max; a += grid_step) {
        const double ratio = (sq_cdf(a + eps) - sq_cdf(a)) / (kap * eps);
        best = std::max(best, ratio);
    }
    return best;
}

}  // namespace hdgauss
