#include "hdgauss/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdgauss/parallel.hpp"

namespace hdgauss {

std::string to_string(BootstrapKind k) { return k == BootstrapKind::efron ? "efron" : "wild"; }

BootstrapKind bootstrap_kind_from_string(const std::string& s) {
    if (s == "efron") return BootstrapKind::efron;
    if (s == "wild") return BootstrapKind::wild;
    throw std::invalid_argument("unknown bootstrap kind '" + s + "'");
}

namespace {

// Rows in the X scale (X_i = sqrt(n) xi_i under x_over_sqrt_n).
std::vector<double> x_rows(const Dataset& data) {
    std::vector<double> x(data.rows());
    const double f = data.x_scale_factor();
    if (f != 1.0)
        for (double& v : x) v *= f;
    return x;
}

}  // namespace

std::vector<double> efron_stats(const Dataset& data, std::size_t b, std::uint64_t seed) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (n < 2) throw std::invalid_argument("efron_stats: need n >= 2");
    const std::vector<double> x = x_rows(data);
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += x[i * d + j];
    for (double& v : mean) v /= static_cast<double>(n);

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> stats(b);
    const CounterRng base(seed);
    std::vector<double> sum(d);
    for (std::size_t rep = 0; rep < b; ++rep) {
        CounterRng rng = base.derive(rep);
        std::fill(sum.begin(), sum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = static_cast<std::size_t>(rng.next_u64() % n);
            const double* row = &x[idx * d];
            for (std::size_t j = 0; j < d; ++j) sum[j] += row[j] - mean[j];
        }
        double nsq = 0.0;
        for (std::size_t j = 0; j < d; ++j) nsq += sum[j] * sum[j];
        stats[rep] = std::sqrt(nsq) * inv_sqrt_n;
    }
    return stats;
}

std::vector<double> wild_stats(const Dataset& data, std::size_t b, MultiplierDist multiplier,
                               std::uint64_t seed) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    const std::vector<double> x = x_rows(data);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> stats(b);
    const CounterRng base(seed);
    std::vector<double> sum(d);
    for (std::size_t rep = 0; rep < b; ++rep) {
        CounterRng rng = base.derive(rep);
        std::fill(sum.begin(), sum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = draw_multiplier(rng, multiplier);
            const double* row = &x[i * d];
            for (std::size_t j = 0; j < d; ++j) sum[j] += e * row[j];
        }
        double nsq = 0.0;
        for (std::size_t j = 0; j < d; ++j) nsq += sum[j] * sum[j];
        stats[rep] = std::sqrt(nsq) * inv_sqrt_n;
    }
    return stats;
}

double bootstrap_quantile(const std::vector<double>& values, double alpha) {
    if (values.empty()) throw std::invalid_argument("bootstrap_quantile: empty values");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bootstrap_quantile: alpha in (0,1)");
    std::vector<double> v(values);
    std::sort(v.begin(), v.end());
    const double b = static_cast<double>(v.size());
    // Strict-exceedance count rule; ties sit inside the acceptance region, so
    // scanning order statistics upward and counting duplicates once suffices.
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto above = static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), v[k]));
        if (above / b <= alpha) return v[k];
    }
    return v.back();
}

CoverageResult coverage_experiment(const DgpSpec& spec, double alpha, std::size_t b, std::size_t r,
                                   BootstrapKind kind, std::uint64_t seed, unsigned workers,
                                   MultiplierDist multiplier) {
    if (r < 100) throw std::invalid_argument("coverage_experiment: need R >= 100 outer replicates");
    if (b == 0) throw std::invalid_argument("coverage_experiment: need B >= 1");
    spec.validate();

    struct Outer {
        double w_norm;
        double quantile;
    };
    const CounterRng base = CounterRng(seed).derive(0x9d5ull);
    auto one = [&](std::size_t, const CounterRng& key) -> Outer {
        const Dataset data = sample(spec, key.key());
        double nsq = 0.0;
        std::vector<double> w(spec.d, 0.0);
        for (std::size_t i = 0; i < spec.n; ++i)
            for (std::size_t j = 0; j < spec.d; ++j) w[j] += data.xi(i, j);
        for (std::size_t j = 0; j < spec.d; ++j) nsq += w[j] * w[j];
        const std::uint64_t inner_seed = key.derive(0xb001ull).key();
        const std::vector<double> stats = kind == BootstrapKind::efron
                                              ? efron_stats(data, b, inner_seed)
                                              : wild_stats(data, b, multiplier, inner_seed);
        return {std::sqrt(nsq), bootstrap_quantile(stats, alpha)};
    };
    const std::vector<Outer> outers = run_replicated<Outer>(r, workers, base, one);

    CoverageResult out;
    out.exceed.resize(r);
    out.w_norms.resize(r);
    out.quantiles.resize(r);
    std::size_t count = 0;
    for (std::size_t i = 0; i < r; ++i) {
        out.w_norms[i] = outers[i].w_norm;
        out.quantiles[i] = outers[i].quantile;
        out.exceed[i] = outers[i].w_norm > outers[i].quantile ? 1 : 0;
        count += out.exceed[i];
    }
    out.coverage = static_cast<double>(count) / static_cast<double>(r);
    out.stderr_ = std::sqrt(out.coverage * (1.0 - out.coverage) / static_cast<double>(r));
    return out;
}

OpNormDelta op_norm_delta(const Dataset& data, const SymMatrix& sigma, BootstrapKind kind) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (kind == BootstrapKind::efron && n < 2) throw std::invalid_argument("op_norm_delta: efron needs n >= 2");
    if (sigma.dim() != d) throw std::invalid_argument("op_norm_delta: sigma dimension mismatch");
    const std::vector<double> x = x_rows(data);

    std::vector<double> mean(d, 0.0);
    if (kind == BootstrapKind::efron) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) mean[j] += x[i * d + j];
        for (double& v : mean) v /= static_cast<double>(n);
    }

    SymMatrix cov(d);
    double sum_norm4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double nsq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double vj = x[i * d + j] - mean[j];
            nsq += x[i * d + j] * x[i * d + j];
            for (std::size_t k = j; k < d; ++k) cov.at(j, k) += vj * (x[i * d + k] - mean[k]);
        }
        sum_norm4 += nsq * nsq;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    SymMatrix diff(d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j; k < d; ++k) {
            const double v = cov.at(j, k) * inv_n - sigma(j, k);
            diff.at(j, k) = v;
            diff.at(k, j) = v;
        }

    OpNormDelta out;
    const SpectralSummary s = sym_eigen(diff);
    out.op_norm = s.op_norm;
    out.hs_norm = s.hs_norm;
    out.hs_surrogate = std::sqrt(sum_norm4) * inv_n;
    return out;
}

}  // namespace hdgauss
