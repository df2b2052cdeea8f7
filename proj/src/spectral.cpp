#include "hdgauss/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hdgauss {

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {
    if (dim == 0) throw std::invalid_argument("SymMatrix: dim must be >= 1");
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim == 0) throw std::invalid_argument("SymMatrix: dim must be >= 1");
    if (a_.size() != dim * dim) throw std::invalid_argument("SymMatrix: entries size != dim*dim");
    for (std::size_t j = 0; j < dim_; ++j) {
        for (std::size_t k = j + 1; k < dim_; ++k) {
            const double v = 0.5 * (a_[j * dim_ + k] + a_[k * dim_ + j]);
            a_[j * dim_ + k] = v;
            a_[k * dim_ + j] = v;
        }
    }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix m(dim);
    for (std::size_t j = 0; j < dim; ++j) m.at(j, j) = 1.0;
    return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& diag) {
    SymMatrix m(diag.size());
    for (std::size_t j = 0; j < diag.size(); ++j) m.at(j, j) = diag[j];
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) t += a_[j * dim_ + j];
    return t;
}

double SymMatrix::hs_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::diag_abs_gap(const SymMatrix& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("diag_abs_gap: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += std::abs((*this)(j, j) - other(j, j));
    return s;
}

double SymMatrix::hs_gap(const SymMatrix& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("hs_gap: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double v = a_[i] - other.a_[i];
        s += v * v;
    }
    return std::sqrt(s);
}

std::string SymMatrix::to_csv() const {
    std::ostringstream out;
    out << "dim=" << dim_ << "\n";
    out.precision(17);
    for (std::size_t j = 0; j < dim_; ++j) {
        for (std::size_t k = 0; k < dim_; ++k) {
            if (k) out << ",";
            out << a_[j * dim_ + k];
        }
        out << "\n";
    }
    return out.str();
}

SymMatrix SymMatrix::from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("SymMatrix csv: empty input");
    if (line.rfind("dim=", 0) != 0) throw std::runtime_error("SymMatrix csv: missing 'dim=d' header");
    const std::size_t d = static_cast<std::size_t>(std::stoull(line.substr(4)));
    if (d == 0) throw std::runtime_error("SymMatrix csv: dim must be >= 1");
    std::vector<double> entries;
    entries.reserve(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        if (!std::getline(in, line)) throw std::runtime_error("SymMatrix csv: expected " + std::to_string(d) + " rows");
        std::istringstream row(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(row, cell, ',')) {
            entries.push_back(std::stod(cell));
            ++k;
        }
        if (k != d) throw std::runtime_error("SymMatrix csv: row " + std::to_string(j + 1) + " has " + std::to_string(k) + " entries, expected " + std::to_string(d));
    }
    return SymMatrix(d, std::move(entries));
}

SymMatrix SymMatrix::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("SymMatrix csv: cannot open " + path);
    return from_csv(in);
}

namespace {

// One cyclic sweep of Jacobi rotations over all off-diagonal pairs.
// a is updated in place, rotations are accumulated into v (column-major basis).
void jacobi_sweep(std::vector<double>& a, std::vector<double>& v, std::size_t d) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
        for (std::size_t q = p + 1; q < d; ++q) {
            const double apq = a[p * d + q];
            if (apq == 0.0) continue;
            const double app = a[p * d + p];
            const double aqq = a[q * d + q];
            const double theta = 0.5 * (aqq - app) / apq;
            double t;
            if (std::abs(theta) > 1e150) {
                t = 0.5 / theta;
            } else {
                t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
            }
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            const double tau = s / (1.0 + c);
            a[p * d + p] = app - t * apq;
            a[q * d + q] = aqq + t * apq;
            a[p * d + q] = 0.0;
            a[q * d + p] = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                if (r == p || r == q) continue;
                const double arp = a[r * d + p];
                const double arq = a[r * d + q];
                a[r * d + p] = arp - s * (arq + tau * arp);
                a[r * d + q] = arq + s * (arp - tau * arq);
                a[p * d + r] = a[r * d + p];
                a[q * d + r] = a[r * d + q];
            }
            for (std::size_t r = 0; r < d; ++r) {
                const double vrp = v[p * d + r];
                const double vrq = v[q * d + r];
                v[p * d + r] = vrp - s * (vrq + tau * vrp);
                v[q * d + r] = vrq + s * (vrp - tau * vrq);
            }
        }
    }
}

double off_diag_norm(const std::vector<double>& a, std::size_t d) {
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < d; ++p)
        for (std::size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
    return std::sqrt(2.0 * s);
}

}  // namespace

SpectralSummary sym_eigen(const SymMatrix& m, double tol) {
    if (tol < 1e-14) throw std::invalid_argument("sym_eigen: tol must be >= 1e-14");
    const std::size_t d = m.dim();
    std::vector<double> a = m.data();
    std::vector<double> v(d * d, 0.0);  // column-major eigenvector accumulator
    for (std::size_t j = 0; j < d; ++j) v[j * d + j] = 1.0;

    // The residual || V D V^T - M ||_HS equals the off-diagonal norm of the
    // rotated matrix, so iterating until off <= target meets the contract.
    const double target = 0.5 * tol * (1.0 + m.hs_norm());
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    while (off_diag_norm(a, d) > target) {
        if (sweep++ >= kMaxSweeps) {
            throw std::runtime_error("sym_eigen: Jacobi iteration did not converge in 100 sweeps for a " +
                                     std::to_string(d) + "x" + std::to_string(d) + " matrix");
        }
        jacobi_sweep(a, v, d);
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * d + i] > a[j * d + j]; });

    SpectralSummary s;
    s.dim = d;
    s.eigenvalues.resize(d);
    s.basis.resize(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        s.eigenvalues[j] = a[order[j] * d + order[j]];
        for (std::size_t r = 0; r < d; ++r) s.basis[j * d + r] = v[order[j] * d + r];
    }

    double sumsq = 0.0;
    for (double ev : s.eigenvalues) sumsq += ev * ev;
    const double lambda1_raw = std::sqrt(sumsq);
    // Clamp numerically-zero eigenvalues before rank decisions.
    for (double& ev : s.eigenvalues)
        if (std::abs(ev) <= 1e-12 * lambda1_raw) ev = 0.0;

    sumsq = 0.0;
    double sumsq_tail = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double e2 = s.eigenvalues[j] * s.eigenvalues[j];
        sumsq += e2;
        if (j >= 1) sumsq_tail += e2;
    }
    s.lambda1 = std::sqrt(sumsq);
    s.lambda2 = std::sqrt(sumsq_tail);
    s.kappa_defined = s.lambda2 > 0.0;
    if (s.kappa_defined) s.kappa = 1.0 / std::sqrt(s.lambda1 * s.lambda2);
    s.trace = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
    s.op_norm = 0.0;
    for (double ev : s.eigenvalues) s.op_norm = std::max(s.op_norm, std::abs(ev));
    s.hs_norm = s.lambda1;
    return s;
}

double lambda_k(const SpectralSummary& s, int k) {
    if (k != 1 && k != 2) throw std::invalid_argument("lambda_k: k must be 1 or 2");
    if (k == 2 && s.dim < 2) throw std::invalid_argument("lambda_k: rank needed for k=2 is undefined at dim=1");
    return k == 1 ? s.lambda1 : s.lambda2;
}

double kappa(const SpectralSummary& s) {
    if (!s.kappa_defined)
        throw std::runtime_error("kappa: lambda2 == 0 (rank < 2), the two-eigenvalue anti-concentration scale is undefined");
    return s.kappa;
}

SymMatrix inv_sqrt(const SymMatrix& m, double ridge) {
    if (ridge < 0.0) throw std::invalid_argument("inv_sqrt: ridge must be >= 0");
    const SpectralSummary s = sym_eigen(m);
    const std::size_t d = m.dim();
    std::vector<double> w(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double shifted = s.eigenvalues[j] + ridge;
        if (shifted <= 0.0)
            throw std::runtime_error("inv_sqrt: matrix is singular (eigenvalue " + std::to_string(s.eigenvalues[j]) +
                                     " with ridge " + std::to_string(ridge) + ")");
        w[j] = 1.0 / std::sqrt(shifted);
    }
    SymMatrix out(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            double sum = 0.0;
            for (std::size_t j = 0; j < d; ++j) sum += s.basis[j * d + r] * w[j] * s.basis[j * d + c];
            out.at(r, c) = sum;
            out.at(c, r) = sum;
        }
    }
    return out;
}

std::vector<double> mat_vec(const SymMatrix& m, const std::vector<double>& v) {
    if (v.size() != m.dim()) throw std::invalid_argument("mat_vec: dimension mismatch");
    std::vector<double> out(m.dim(), 0.0);
    for (std::size_t r = 0; r < m.dim(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.dim(); ++c) s += m(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

}  // namespace hdgauss
