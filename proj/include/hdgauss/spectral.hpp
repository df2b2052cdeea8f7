#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hdgauss {

// Dense symmetric matrix, symmetrized on construction. Row-major storage.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim);
    // Symmetrizes: entries are averaged with their transpose.
    SymMatrix(std::size_t dim, std::vector<double> entries);

    static SymMatrix identity(std::size_t dim);
    static SymMatrix diagonal(const std::vector<double>& diag);

    std::size_t dim() const { return dim_; }
    double operator()(std::size_t j, std::size_t k) const { return a_[j * dim_ + k]; }
    double& at(std::size_t j, std::size_t k) { return a_[j * dim_ + k]; }
    const std::vector<double>& data() const { return a_; }

    double trace() const;
    double hs_norm() const;
    double diag_abs_gap(const SymMatrix& other) const;  // sum_j |A_jj - B_jj|
    double hs_gap(const SymMatrix& other) const;        // ||A - B||_HS

    // CSV round-trip: first line "dim=d", then d comma-separated rows.
    std::string to_csv() const;
    static SymMatrix from_csv(std::istream& in);
    static SymMatrix from_csv_file(const std::string& path);

  private:
    std::size_t dim_ = 0;
    std::vector<double> a_;
};

// Eigendecomposition of a SymMatrix plus the spectral functionals derived from
// it. Eigenvalues are sorted in decreasing order; `basis` holds the matching
// orthonormal eigenvectors as columns (column-major: basis[j*d + r] is row r of
// column j). lambda1/lambda2 are the root-sum-of-squares of the eigenvalues
// from the 1st and 2nd largest; kappa = (lambda1*lambda2)^{-1/2} is defined
// only when lambda2 > 0.
struct SpectralSummary {
    std::size_t dim = 0;
    std::vector<double> eigenvalues;  // decreasing
    std::vector<double> basis;        // d*d, columns are eigenvectors
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool kappa_defined = false;
    double kappa = 0.0;
    double trace = 0.0;
    double op_norm = 0.0;
    double hs_norm = 0.0;

    double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

// Cyclic Jacobi eigendecomposition. Guarantees
//   || basis * diag(eigenvalues) * basis^T  -  m ||_HS <= tol * (1 + ||m||_HS)
// and throws if 100 sweeps do not reach that. Eigenvalues within 1e-12*lambda1
// of zero are clamped to zero before any rank decision downstream.
SpectralSummary sym_eigen(const SymMatrix& m, double tol = 1e-12);

// sqrt(sum of squared eigenvalues from the k-th largest), k in {1,2}.
double lambda_k(const SpectralSummary& s, int k);

// (lambda1*lambda2)^{-1/2}; throws when lambda2 == 0 (rank < 2).
double kappa(const SpectralSummary& s);

// Symmetric inverse square root (U diag((lambda+ridge)^{-1/2}) U^T). With
// ridge = 0 every eigenvalue must be positive.
SymMatrix inv_sqrt(const SymMatrix& m, double ridge = 0.0);

// result = m * v (v has m.dim() entries).
std::vector<double> mat_vec(const SymMatrix& m, const std::vector<double>& v);

}  // namespace hdgauss
