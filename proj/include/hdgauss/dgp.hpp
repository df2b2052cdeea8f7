#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdgauss/bounds.hpp"
#include "hdgauss/rng.hpp"
#include "hdgauss/spectral.hpp"

namespace hdgauss {

enum class DgpKind { iid_marginal, nagaev, multiplier, ma_mdep };
enum class Marginal { gaussian, rademacher, uniform_std, exp_std };
enum class MultiplierDist { gaussian, rademacher, mammen };

std::string to_string(DgpKind k);
std::string to_string(Marginal m);
std::string to_string(MultiplierDist m);
DgpKind dgp_kind_from_string(const std::string& s);
Marginal marginal_from_string(const std::string& s);
MultiplierDist multiplier_from_string(const std::string& s);

// Parameters of the Gaussian-plus-atom mixture: eta = x_n with probability
// p_n, else sigma_n*G - a_n. The four constraints
//   x_n = sqrt(n)/ln n,  p_n x_n = a_n (1-p_n),
//   p_n x_n^2 = 1/2,     1/2 + (sigma_n^2 + a_n^2)(1-p_n) = 1
// force E eta = 0 and E eta^2 = 1 exactly.
struct NagaevParams {
    double x = 0.0;
    double p = 0.0;
    double a = 0.0;
    double sigma = 0.0;

    double third_moment() const;   // E eta^3 = x - (3 a sigma^2 + a^3)(1-p)
    double fourth_moment() const;  // E eta^4
};

NagaevParams nagaev_params(std::size_t n);

struct DgpSpec {
    DgpKind kind = DgpKind::iid_marginal;
    std::size_t n = 0;
    std::size_t d = 0;
    Marginal marginal = Marginal::gaussian;
    MultiplierDist multiplier = MultiplierDist::gaussian;
    std::size_t ma_order = 0;

    // Var(e_1^2) implied by the multiplier tag: gaussian 2, rademacher 0,
    // mammen 1.
    double var_e_sq() const;

    void validate() const;
};

// An n x d array of summand rows xi_i plus generator provenance. Var(W) of
// the generator is identity for every built-in DGP; whiten() can retarget it.
class Dataset {
  public:
    Dataset() = default;
    Dataset(std::size_t n, std::size_t d, std::vector<double> rows, ScaleConvention scale, SymMatrix var_w);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    double xi(std::size_t i, std::size_t j) const { return rows_[i * d_ + j]; }
    std::span<const double> row(std::size_t i) const { return {rows_.data() + i * d_, d_}; }
    const std::vector<double>& rows() const { return rows_; }
    ScaleConvention scale() const { return scale_; }
    const SymMatrix& var_w() const { return var_w_; }

    // X_i in the unnormalized scale (X = sqrt(n) xi under x_over_sqrt_n).
    double x_scale_factor() const;

    std::optional<DgpSpec> provenance;
    std::uint64_t seed = 0;

    bool operator==(const Dataset& other) const;

  private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> rows_;
    ScaleConvention scale_ = ScaleConvention::raw_xi;
    SymMatrix var_w_;
};

// Materializes the n x d summand array. Coordinate columns are generated from
// per-coordinate substreams of `seed`, so nested grids share draws (common
// random numbers) and ma_mdep with ma_order=0 equals iid_marginal exactly.
Dataset sample(const DgpSpec& spec, std::uint64_t seed);

// Streams W = sum_i xi_i for one replicate without materializing the array.
// Same laws as sample(); coordinate sums with a closed-form law (gaussian
// marginals) are drawn directly from it.
void sample_w(const DgpSpec& spec, const CounterRng& replicate_key, std::span<double> w_out);

// Rows replaced by inv_sqrt(target) * xi_i; output is tagged raw_xi (the
// whitened summands are the objects of interest, not any X/sqrt(n) original).
Dataset whiten(const Dataset& data, const SymMatrix& target);

// Binary row-major dataset file plus a JSON sidecar at path + ".json".
void write_dataset(const Dataset& data, const std::string& path);
Dataset read_dataset(const std::string& path);

// One multiplier draw.
double draw_multiplier(CounterRng& rng, MultiplierDist dist);
double draw_marginal(CounterRng& rng, Marginal m);

// MA(m) edge multiplicity: how many of the n windows [i, i+m] cover t
// (t, i zero-based; t in [0, n+m)).
std::size_t ma_weight(std::size_t t, std::size_t n, std::size_t m);

}  // namespace hdgauss
