#pragma once

#include <cstddef>
#include <vector>

#include "hdgauss/spectral.hpp"

namespace hdgauss {

// Standard normal CDF.
double normal_cdf(double x);

// Central chi-square CDF with d degrees of freedom: the regularized lower
// incomplete gamma P(d/2, x/2), absolute error <= 1e-12.
double chi2_cdf(std::size_t d, double x);

// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

// |Z+mu|^2 for Z ~ N(0,Sigma) in the eigenbasis: sum_j w_j (G_j + c_j)^2 +
// offset, with weights the positive eigenvalues, noncentralities c_j^2, and
// offset the mean mass sitting on the null space.
struct WeightedChiSquare {
    std::vector<double> weights;          // strictly positive
    std::vector<double> noncentralities;  // c_j^2, same length
    double offset = 0.0;                  // sum over zero-eigenvalue directions of (U^T mu)_j^2
};

WeightedChiSquare to_weighted_chi2(const SymMatrix& sigma, const std::vector<double>& mu);

// P(sum_j w_j (G_j + c_j)^2 <= x) by numerical inversion of the
// characteristic function, total error <= tol (tol >= 1e-9). A single weight
// uses the exact normal closed form. Throws if the evaluation budget is
// exhausted, carrying the achieved error estimate. If achieved_err is given
// it receives the final error bound (tail bound + quadrature estimate).
double imhof_cdf(const WeightedChiSquare& w, double x, double tol, double* achieved_err = nullptr);

// P(|Z + mu| <= r) for Z ~ N(0,Sigma). Dispatches isotropic centered cases to
// chi2_cdf, everything else to imhof_cdf on the eigenbasis representation.
double ball_prob(const SymMatrix& sigma, const std::vector<double>& mu, double r, double tol,
                 double* achieved_err = nullptr);

// max over a in {0, step, ..., grid_max} of
//   [P(|Z+mu|^2 <= a+eps) - P(|Z+mu|^2 <= a)] / (kappa(Sigma) * eps),
// the numerical content of the ellipsoid anti-concentration inequality.
double anti_concentration_ratio(const SymMatrix& sigma, const std::vector<double>& mu, double eps,
                                double grid_max, double grid_step);

// Default grid ceiling: tr(Sigma) + 6 * Lambda_1(Sigma).
double anti_concentration_grid_max(const SymMatrix& sigma);

}  // namespace hdgauss
