#include "hdgauss/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hdgauss/dgp.hpp"
#include "json.hpp"

namespace hdgauss {

std::string to_string(ScaleConvention s) {
    return s == ScaleConvention::raw_xi ? "raw-xi" : "x-over-sqrt-n";
}

std::string BoundReport::to_json() const {
    nlohmann::ordered_json j;
    j["deltaA"] = delta_a;
    j["deltaB"] = delta_b;
    j["delta0"] = delta0;
    j["delta0p"] = delta0p;
    j["delta1"] = delta1;
    j["delta2"] = delta2;
    j["rhsConvex"] = rhs_convex;
    j["rhsBall"] = rhs_ball;
    j["rhsBall2"] = rhs_ball2;
    j["rhsCor3"] = rhs_cor3;
    j["rhsMdep"] = rhs_mdep;
    j["deltaStar"] = delta_star;
    j["deltaCirc"] = delta_circ;
    j["constantsNote"] = constants_note;
    return j.dump(2);
}

double psi(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("psi: x must be > 0");
    return x * std::max(std::abs(std::log(x)), 1.0);
}

double delta_convex(const MomentSummary& m, const CovInfo& c) {
    if (m.scale != ScaleConvention::raw_xi)
        throw std::invalid_argument("delta_convex: moments must be of the whitened summands (raw-xi scale)");
    return c.white_gap + std::sqrt(m.sum4);
}

double delta_ball(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec) {
    const double lam_min = sigma_spec.min_eigenvalue();
    if (lam_min <= 0.0) throw std::runtime_error("delta_ball: Sigma is singular (min eigenvalue <= 0)");
    return (c.hs_gap + std::sqrt(m.sum4)) / lam_min;
}

Ball2Deltas delta_functionals_ball2(const MomentSummary& m, const CovInfo& c,
                                    const SpectralSummary& sigma_w_spec,
                                    const SpectralSummary& sigma_spec) {
    if (sigma_w_spec.dim != sigma_spec.dim || m.d != sigma_spec.dim)
        throw std::invalid_argument("delta_functionals_ball2: inconsistent dimensions");
    Ball2Deltas out;
    out.delta0 = std::sqrt((sigma_w_spec.trace + sigma_spec.trace) * (sigma_w_spec.op_norm + sigma_spec.op_norm)) *
                 c.hs_gap;
    out.delta0p = c.diag_gap;
    out.delta1 = sigma_w_spec.hs_norm * m.sum4 + std::pow(sigma_w_spec.op_norm, 1.5) * m.sum3;
    out.delta2 = std::sqrt(sigma_w_spec.op_norm) * m.sum3 + m.sum4;
    return out;
}

double rhs_ball2(double kappa_val, const Ball2Deltas& d) {
    if (!(kappa_val > 0.0)) throw std::invalid_argument("rhs_ball2: kappa must be > 0");
    return std::pow(kappa_val, 0.75) * std::pow(d.delta1, 0.25) +
           std::pow(kappa_val, 2.0 / 3.0) * std::cbrt(d.delta2) +
           std::pow(kappa_val, 2.0 / 3.0) * std::cbrt(d.delta0) +
           std::sqrt(kappa_val) * std::sqrt(d.delta0p);
}

double rhs_convex(std::size_t d, double delta_a) {
    if (d == 0) throw std::invalid_argument("rhs_convex: d must be >= 1");
    return std::pow(static_cast<double>(d), 0.25) * psi(delta_a);
}

double rhs_ball(double delta_b) { return psi(delta_b); }

double rhs_cor3(std::size_t n, std::size_t d) {
    if (n == 0 || d == 0) throw std::invalid_argument("rhs_cor3: n and d must be >= 1");
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    return std::pow(nn, -0.125) + std::pow(dd / nn, 1.0 / 6.0);
}

namespace {

// The six displayed terms shared by the empirical (Sigma_hat) and wild
// (Sigma_bar) bootstrap functionals; they differ only through c.op_delta.
double bootstrap_functional(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec,
                            const Ball2Deltas& d) {
    if (m.scale != ScaleConvention::x_over_sqrt_n)
        throw std::invalid_argument("bootstrap functional: moments must carry the x-over-sqrt-n convention");
    if (!sigma_spec.kappa_defined)
        throw std::runtime_error("bootstrap functional: Lambda_2(Sigma) == 0, kappa undefined");
    const double k = sigma_spec.kappa;
    const double k34 = std::pow(k, 0.75);
    const double k23 = std::pow(k, 2.0 / 3.0);
    double coord_sum = 0.0;
    for (double v : m.coord_fourth) coord_sum += v;
    const double dh = c.op_delta;
    return k34 * std::pow(d.delta1, 0.25) + k23 * std::cbrt(d.delta2) +
           std::sqrt(k) * std::sqrt(coord_sum) +
           k23 * std::pow(sigma_spec.trace, 1.0 / 6.0) * std::pow(dh + sigma_spec.op_norm, 1.0 / 6.0) *
               std::pow(m.sum4, 1.0 / 6.0) +
           k34 * std::pow(std::pow(dh, 1.5) * m.sum3, 0.25) + k23 * std::cbrt(std::sqrt(dh) * m.sum3);
}

}  // namespace

double delta_star(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec,
                  const Ball2Deltas& deltas) {
    return bootstrap_functional(m, c, sigma_spec, deltas);
}

double delta_circ(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec,
                  const Ball2Deltas& deltas) {
    return bootstrap_functional(m, c, sigma_spec, deltas);
}

double subgauss_op_norm_bound(double L, const SpectralSummary& sigma_spec, std::size_t n) {
    if (L < 1.0) throw std::invalid_argument("subgauss_op_norm_bound: L must be >= 1");
    if (n == 0) throw std::invalid_argument("subgauss_op_norm_bound: n must be >= 1");
    const double nn = static_cast<double>(n);
    return L * L * std::sqrt(sigma_spec.op_norm * sigma_spec.trace / nn) +
           L * L * L * L * sigma_spec.trace / nn;
}

double rhs_mdep(std::size_t n, std::size_t m, double delta_sixth, double sum2, std::size_t d) {
    if (m >= n) throw std::invalid_argument("rhs_mdep: need n > m");
    if (!(delta_sixth > 0.0)) throw std::invalid_argument("rhs_mdep: delta must be > 0");
    if (d == 0) throw std::invalid_argument("rhs_mdep: d must be >= 1");
    const double mt = static_cast<double>(std::max<std::size_t>(m, 1));
    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double d3 = std::pow(delta_sixth, 3);
    const double d4 = std::pow(delta_sixth, 4);
    const double nm3d4 = nn * mt * mt * mt * d4;
    const double term1 = std::pow((mt * sum2 + nm3d4) * (nm3d4 * (nm3d4 + 1.0)) / (dd * dd * dd), 0.125);
    const double term2 = std::cbrt((nn * mt * mt * d3 + nm3d4) / dd);
    return term1 + term2;
}

MomentSummary estimate_moments(const Dataset& data) {
    if (data.n() == 0) throw std::invalid_argument("estimate_moments: empty dataset");
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    MomentSummary m;
    m.n = n;
    m.d = d;
    m.scale = data.scale();
    m.coord_fourth.assign(d, 0.0);
    const double xf = data.x_scale_factor();
    const double xf4 = xf * xf * xf * xf;
    double sum6 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double nsq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = data.xi(i, j);
            nsq += v * v;
            m.coord_fourth[j] += xf4 * v * v * v * v;
        }
        const double norm = std::sqrt(nsq);
        m.sum2 += nsq;
        m.sum3 += nsq * norm;
        m.sum4 += nsq * nsq;
        sum6 += nsq * nsq * nsq;
    }
    for (double& v : m.coord_fourth) v = std::sqrt(v / (static_cast<double>(n) * static_cast<double>(n)));
    m.sixth_bound = std::pow(sum6 / static_cast<double>(n), 1.0 / 6.0);
    return m;
}

CovInfo estimate_cov_info(const Dataset& data, const SymMatrix& sigma, CovKind kind) {
    if (sigma.dim() != data.d()) throw std::invalid_argument("estimate_cov_info: sigma dimension mismatch");
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (n < 2) throw std::runtime_error("estimate_cov_info: degenerate sample, need n >= 2 for the recentered covariance");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += data.xi(i, j);
    for (double& v : mean) v /= static_cast<double>(n);

    // Sigma_hat in the X scale equals sum_i (xi_i - xi_bar)(xi_i - xi_bar)^T in
    // the summand scale; Sigma_bar drops the recentering.
    SymMatrix hat(d);
    SymMatrix bar(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double cj = data.xi(i, j) - mean[j];
            const double rj = data.xi(i, j);
            for (std::size_t k = j; k < d; ++k) {
                hat.at(j, k) += cj * (data.xi(i, k) - mean[k]);
                bar.at(j, k) += rj * data.xi(i, k);
            }
        }
    }
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j; k < d; ++k) {
            hat.at(k, j) = hat.at(j, k);
            bar.at(k, j) = bar.at(j, k);
        }

    CovInfo c;
    c.sigma = sigma;
    c.sigma_w = hat;
    c.hs_gap = sigma.hs_gap(hat);
    c.diag_gap = sigma.diag_abs_gap(hat);

    const SymMatrix s_inv_half = inv_sqrt(sigma);
    SymMatrix whitened(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t cc = r; cc < d; ++cc) {
            double sum = 0.0;
            for (std::size_t u = 0; u < d; ++u)
                for (std::size_t v = 0; v < d; ++v) sum += s_inv_half(r, u) * hat(u, v) * s_inv_half(v, cc);
            whitened.at(r, cc) = sum;
            whitened.at(cc, r) = sum;
        }
    c.white_gap = SymMatrix::identity(d).hs_gap(whitened);

    const SymMatrix& dev_src = (kind == CovKind::efron) ? hat : bar;
    SymMatrix dev(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t cc = r; cc < d; ++cc) {
            const double v = dev_src(r, cc) - sigma(r, cc);
            dev.at(r, cc) = v;
            dev.at(cc, r) = v;
        }
    c.op_delta = sym_eigen(dev).op_norm;
    return c;
}

}  // namespace hdgauss
