#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hdgauss/spectral.hpp"

namespace hdgauss {

class Dataset;  // dgp.hpp

// Scale convention of a set of summands. raw_xi: rows are the summands
// themselves (W = sum xi_i). x_over_sqrt_n: rows are xi_i = X_i/sqrt(n) and
// the per-coordinate fourth-moment column uses the X_i scale.
enum class ScaleConvention { raw_xi, x_over_sqrt_n };

std::string to_string(ScaleConvention s);

// Moment aggregates of the summands: sums over i of E|xi_i|^p for p=2,3,4,
// the per-coordinate column coordFourth_j = sqrt(n^{-2} sum_i E[X_ij^4]), and
// an optional sixth-moment bound delta with E|xi_i|^6 <= delta^6.
struct MomentSummary {
    std::size_t n = 0;
    std::size_t d = 0;
    double sum2 = 0.0;
    double sum3 = 0.0;
    double sum4 = 0.0;
    std::vector<double> coord_fourth;
    std::optional<double> sixth_bound;
    ScaleConvention scale = ScaleConvention::raw_xi;
};

// Covariance-side inputs to the bounds: the target Sigma, the (estimated or
// analytic) Var(W), and the gaps between them that the theorems consume.
struct CovInfo {
    SymMatrix sigma;
    SymMatrix sigma_w;
    double hs_gap = 0.0;     // ||Sigma - Sigma_W||_HS
    double diag_gap = 0.0;   // sum_j |Sigma_jj - Sigma_W,jj|
    double white_gap = 0.0;  // ||I_d - Var(Sigma^{-1/2} W)||_HS
    double op_delta = 0.0;   // ||Sigma_hat - Sigma||_op (or the Sigma_bar surrogate)
};

// Which sample covariance feeds op_delta: the recentered Sigma_hat
// (empirical bootstrap) or the uncentered Sigma_bar (wild bootstrap).
enum class CovKind { efron, wild };

// All functionals and assembled right-hand sides. Every rhs omits the
// theorems' unspecified absolute constants; constants_note records that.
struct BoundReport {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta0 = 0.0;
    double delta0p = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double rhs_convex = 0.0;
    double rhs_ball = 0.0;
    double rhs_ball2 = 0.0;
    double rhs_cor3 = 0.0;
    double rhs_mdep = 0.0;
    double delta_star = 0.0;
    double delta_circ = 0.0;
    std::string constants_note = kConstantsNote;

    static constexpr const char* kConstantsNote =
        "values omit unspecified absolute constants C; compare shapes, not levels";

    std::string to_json() const;
};

// Psi(x) = x * max(|ln x|, 1). Natural logarithm.
double psi(double x);

// delta_A: whiteGap + sqrt(sum4) of the whitened summands (scale raw_xi).
double delta_convex(const MomentSummary& m, const CovInfo& c);

// delta_B: ||Sigma^{-1}||_op * (hsGap + sqrt(sum4)); needs min eigenvalue > 0.
double delta_ball(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec);

struct Ball2Deltas {
    double delta0 = 0.0;
    double delta0p = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
};

// The four centered-ball functionals:
//   delta0  = sqrt((tr Sigma_W + tr Sigma)(||Sigma_W||_op + ||Sigma||_op)) * hsGap
//   delta0' = diagGap
//   delta1  = ||Sigma_W||_HS * sum4 + ||Sigma_W||_op^{3/2} * sum3
//   delta2  = ||Sigma_W||_op^{1/2} * sum3 + sum4
Ball2Deltas delta_functionals_ball2(const MomentSummary& m, const CovInfo& c,
                                    const SpectralSummary& sigma_w_spec,
                                    const SpectralSummary& sigma_spec);

// kappa^{3/4} d1^{1/4} + kappa^{2/3} d2^{1/3} + kappa^{2/3} d0^{1/3} + kappa^{1/2} d0'^{1/2}
double rhs_ball2(double kappa_val, const Ball2Deltas& deltas);

double rhs_convex(std::size_t d, double delta_a);
double rhs_ball(double delta_b);

// n^{-1/8} + (d/n)^{1/6}
double rhs_cor3(std::size_t n, std::size_t d);

// The six-term bootstrap functional (empirical bootstrap when c.op_delta is
// built from Sigma_hat, wild when built from Sigma_bar). m must carry the
// x_over_sqrt_n convention so coord_fourth is in the X scale.
double delta_star(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec,
                  const Ball2Deltas& deltas);
double delta_circ(const MomentSummary& m, const CovInfo& c, const SpectralSummary& sigma_spec,
                  const Ball2Deltas& deltas);

// L^2 sqrt(||Sigma||_op tr(Sigma)/n) + L^4 tr(Sigma)/n, for sub-gaussian rows.
double subgauss_op_norm_bound(double L, const SpectralSummary& sigma_spec, std::size_t n);

// Two-term m-dependent bound with m~ = max(m,1):
//   ([m~ sum2 + n m~^3 delta^4][n m~^3 delta^4 (n m~^3 delta^4 + 1)] / d^3)^{1/8}
//   + ((n m~^2 delta^3 + n m~^3 delta^4) / d)^{1/3}
double rhs_mdep(std::size_t n, std::size_t m, double delta_sixth, double sum2, std::size_t d);

// Plug-in versions of the population quantities: empirical means replace
// expectations, the scale convention of the dataset is recorded.
MomentSummary estimate_moments(const Dataset& data);
CovInfo estimate_cov_info(const Dataset& data, const SymMatrix& sigma, CovKind kind = CovKind::efron);

}  // namespace hdgauss
