#include "hdgauss/dgp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hdgauss {

namespace {
constexpr std::uint64_t kAuxStream = 0x8000000000000000ull;
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);
}  // namespace

std::string to_string(DgpKind k) {
    switch (k) {
        case DgpKind::iid_marginal: return "iid-marginal";
        case DgpKind::nagaev: return "nagaev";
        case DgpKind::multiplier: return "multiplier";
        case DgpKind::ma_mdep: return "ma-mdep";
    }
    return "?";
}

std::string to_string(Marginal m) {
    switch (m) {
        case Marginal::gaussian: return "gaussian";
        case Marginal::rademacher: return "rademacher";
        case Marginal::uniform_std: return "uniform-std";
        case Marginal::exp_std: return "exp-std";
    }
    return "?";
}

std::string to_string(MultiplierDist m) {
    switch (m) {
        case MultiplierDist::gaussian: return "gaussian";
        case MultiplierDist::rademacher: return "rademacher";
        case MultiplierDist::mammen: return "mammen";
    }
    return "?";
}

DgpKind dgp_kind_from_string(const std::string& s) {
    if (s == "iid-marginal") return DgpKind::iid_marginal;
    if (s == "nagaev") return DgpKind::nagaev;
    if (s == "multiplier") return DgpKind::multiplier;
    if (s == "ma-mdep") return DgpKind::ma_mdep;
    throw std::invalid_argument("unknown dgp kind '" + s + "'");
}

Marginal marginal_from_string(const std::string& s) {
    if (s == "gaussian") return Marginal::gaussian;
    if (s == "rademacher") return Marginal::rademacher;
    if (s == "uniform-std") return Marginal::uniform_std;
    if (s == "exp-std") return Marginal::exp_std;
    throw std::invalid_argument("unknown marginal '" + s + "'");
}

MultiplierDist multiplier_from_string(const std::string& s) {
    if (s == "gaussian") return MultiplierDist::gaussian;
    if (s == "rademacher") return MultiplierDist::rademacher;
    if (s == "mammen") return MultiplierDist::mammen;
    throw std::invalid_argument("unknown multiplier '" + s + "'");
}

double NagaevParams::third_moment() const { return x - (3.0 * a * sigma * sigma + a * a * a) * (1.0 - p); }

double NagaevParams::fourth_moment() const {
    const double s2 = sigma * sigma;
    const double a2 = a * a;
    return p * x * x * x * x + (1.0 - p) * (3.0 * s2 * s2 + 6.0 * s2 * a2 + a2 * a2);
}

NagaevParams nagaev_params(std::size_t n) {
    if (n < 3) throw std::invalid_argument("nagaev_params: need n >= 3");
    NagaevParams out;
    out.x = std::sqrt(static_cast<double>(n)) / std::log(static_cast<double>(n));
    out.p = 0.5 / (out.x * out.x);
    if (out.p >= 1.0) throw std::runtime_error("nagaev_params: n too small (p_n >= 1)");
    out.a = out.p * out.x / (1.0 - out.p);
    const double s2 = 0.5 / (1.0 - out.p) - out.a * out.a;
    if (s2 <= 0.0) throw std::runtime_error("nagaev_params: n too small (sigma_n^2 <= 0)");
    out.sigma = std::sqrt(s2);
    return out;
}

double DgpSpec::var_e_sq() const {
    switch (multiplier) {
        case MultiplierDist::gaussian: return 2.0;
        case MultiplierDist::rademacher: return 0.0;
        case MultiplierDist::mammen: return 1.0;
    }
    return 0.0;
}

void DgpSpec::validate() const {
    if (n == 0 || d == 0) throw std::invalid_argument("DgpSpec: n and d must be >= 1");
    if (ma_order > 0 && kind != DgpKind::ma_mdep)
        throw std::invalid_argument("DgpSpec: ma-order is only meaningful for kind ma-mdep");
    if (kind == DgpKind::ma_mdep && n <= ma_order)
        throw std::invalid_argument("DgpSpec: ma-mdep requires n > ma-order");
    if (kind == DgpKind::nagaev && n < 3) throw std::invalid_argument("DgpSpec: nagaev requires n >= 3");
}

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> rows, ScaleConvention scale, SymMatrix var_w)
    : n_(n), d_(d), rows_(std::move(rows)), scale_(scale), var_w_(std::move(var_w)) {
    if (n_ == 0 || d_ == 0) throw std::invalid_argument("Dataset: n and d must be >= 1");
    if (rows_.size() != n_ * d_) throw std::invalid_argument("Dataset: rows size != n*d");
    if (var_w_.dim() != d_) throw std::invalid_argument("Dataset: var_w dimension mismatch");
}

double Dataset::x_scale_factor() const {
    return scale_ == ScaleConvention::x_over_sqrt_n ? std::sqrt(static_cast<double>(n_)) : 1.0;
}

bool Dataset::operator==(const Dataset& other) const {
    return n_ == other.n_ && d_ == other.d_ && scale_ == other.scale_ && rows_ == other.rows_ &&
           var_w_.data() == other.var_w_.data();
}

double draw_marginal(CounterRng& rng, Marginal m) {
    switch (m) {
        case Marginal::gaussian: return rng.next_gaussian();
        case Marginal::rademacher: return (rng.next_u64() >> 63) ? 1.0 : -1.0;
        case Marginal::uniform_std: return kSqrt3 * rng.next_symmetric();
        case Marginal::exp_std: return rng.next_exponential() - 1.0;
    }
    return 0.0;
}

double draw_multiplier(CounterRng& rng, MultiplierDist dist) {
    switch (dist) {
        case MultiplierDist::gaussian: return rng.next_gaussian();
        case MultiplierDist::rademacher: return (rng.next_u64() >> 63) ? 1.0 : -1.0;
        case MultiplierDist::mammen: {
            // Two-point law with mean 0, variance 1, third moment 1.
            const double p_low = (kSqrt5 + 1.0) / (2.0 * kSqrt5);
            return rng.next_double() < p_low ? (1.0 - kSqrt5) / 2.0 : (1.0 + kSqrt5) / 2.0;
        }
    }
    return 0.0;
}

std::size_t ma_weight(std::size_t t, std::size_t n, std::size_t m) {
    const std::size_t lo = t > m ? t - m : 0;
    const std::size_t hi = std::min(t, n - 1);
    return hi >= lo ? hi - lo + 1 : 0;
}

namespace {

double nagaev_draw(CounterRng& rng, const NagaevParams& np) {
    const double u = rng.next_double();
    if (u < np.p) return np.x;
    return np.sigma * rng.next_gaussian() - np.a;
}

double ma_norm(std::size_t n, std::size_t m) {
    double s = 0.0;
    for (std::size_t t = 0; t < n + m; ++t) {
        const double c = static_cast<double>(ma_weight(t, n, m));
        s += c * c;
    }
    return std::sqrt(s);
}

}  // namespace

Dataset sample(const DgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t d = spec.d;
    const CounterRng base(seed);
    std::vector<double> rows(n * d, 0.0);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    switch (spec.kind) {
        case DgpKind::iid_marginal: {
            for (std::size_t j = 0; j < d; ++j) {
                CounterRng rng = base.derive(j);
                for (std::size_t i = 0; i < n; ++i) rows[i * d + j] = draw_marginal(rng, spec.marginal) * inv_sqrt_n;
            }
            break;
        }
        case DgpKind::nagaev: {
            const NagaevParams np = nagaev_params(n);
            {
                CounterRng rng = base.derive(0);
                for (std::size_t i = 0; i < n; ++i) rows[i * d] = nagaev_draw(rng, np) * inv_sqrt_n;
            }
            for (std::size_t j = 1; j < d; ++j) {
                CounterRng rng = base.derive(j);
                for (std::size_t i = 0; i < n; ++i) rows[i * d + j] = rng.next_gaussian() * inv_sqrt_n;
            }
            break;
        }
        case DgpKind::multiplier: {
            CounterRng erng = base.derive(kAuxStream);
            std::vector<double> e(n);
            for (std::size_t i = 0; i < n; ++i) e[i] = draw_multiplier(erng, spec.multiplier);
            for (std::size_t j = 0; j < d; ++j) {
                CounterRng rng = base.derive(j);
                for (std::size_t i = 0; i < n; ++i)
                    rows[i * d + j] = e[i] * draw_marginal(rng, spec.marginal) * inv_sqrt_n;
            }
            break;
        }
        case DgpKind::ma_mdep: {
            const std::size_t m = spec.ma_order;
            const double inv_norm = 1.0 / ma_norm(n, m);
            std::vector<double> innov(n + m);
            for (std::size_t j = 0; j < d; ++j) {
                CounterRng rng = base.derive(j);
                for (std::size_t t = 0; t < n + m; ++t) innov[t] = draw_marginal(rng, spec.marginal);
                for (std::size_t i = 0; i < n; ++i) {
                    double s = 0.0;
                    for (std::size_t k = 0; k <= m; ++k) s += innov[i + k];
                    rows[i * d + j] = s * inv_norm;
                }
            }
            break;
        }
    }

    Dataset out(n, d, std::move(rows), ScaleConvention::x_over_sqrt_n, SymMatrix::identity(d));
    out.provenance = spec;
    out.seed = seed;
    return out;
}

void sample_w(const DgpSpec& spec, const CounterRng& replicate_key, std::span<double> w_out) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t d = spec.d;
    if (w_out.size() != d) throw std::invalid_argument("sample_w: output size != d");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    auto column_sum = [&](std::size_t j, Marginal m) -> double {
        CounterRng rng = replicate_key.derive(j);
        switch (m) {
            case Marginal::gaussian:
                // The column sum is exactly N(0, n); draw it directly.
                return std::sqrt(static_cast<double>(n)) * rng.next_gaussian();
            case Marginal::rademacher: {
                // 64 sign bits per word; the sum is 2*ones - n.
                std::size_t ones = 0;
                const std::size_t full = n / 64;
                for (std::size_t w = 0; w < full; ++w) ones += std::popcount(rng.next_u64());
                const std::size_t rem = n % 64;
                if (rem) ones += std::popcount(rng.next_u64() & ((1ull << rem) - 1ull));
                return 2.0 * static_cast<double>(ones) - static_cast<double>(n);
            }
            case Marginal::uniform_std: {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += rng.next_symmetric();
                return kSqrt3 * s;
            }
            case Marginal::exp_std: {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += rng.next_exponential();
                return s - static_cast<double>(n);
            }
        }
        return 0.0;
    };

    switch (spec.kind) {
        case DgpKind::iid_marginal: {
            for (std::size_t j = 0; j < d; ++j) w_out[j] = column_sum(j, spec.marginal) * inv_sqrt_n;
            break;
        }
        case DgpKind::nagaev: {
            const NagaevParams np = nagaev_params(n);
            CounterRng rng = replicate_key.derive(0);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += nagaev_draw(rng, np);
            w_out[0] = s * inv_sqrt_n;
            for (std::size_t j = 1; j < d; ++j) w_out[j] = replicate_key.derive(j).next_gaussian();
            break;
        }
        case DgpKind::multiplier: {
            CounterRng erng = replicate_key.derive(kAuxStream);
            std::vector<double> e(n);
            for (std::size_t i = 0; i < n; ++i) e[i] = draw_multiplier(erng, spec.multiplier);
            for (std::size_t j = 0; j < d; ++j) {
                CounterRng rng = replicate_key.derive(j);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += e[i] * draw_marginal(rng, spec.marginal);
                w_out[j] = s * inv_sqrt_n;
            }
            break;
        }
        case DgpKind::ma_mdep: {
            const std::size_t m = spec.ma_order;
            const double inv_norm = 1.0 / ma_norm(n, m);
            for (std::size_t j = 0; j < d; ++j) {
                CounterRng rng = replicate_key.derive(j);
                double s = 0.0;
                for (std::size_t t = 0; t < n + m; ++t)
                    s += static_cast<double>(ma_weight(t, n, m)) * draw_marginal(rng, spec.marginal);
                w_out[j] = s * inv_norm;
            }
            break;
        }
    }
}

Dataset whiten(const Dataset& data, const SymMatrix& target) {
    if (target.dim() != data.d()) throw std::invalid_argument("whiten: target dimension mismatch");
    const SymMatrix t = inv_sqrt(target);
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    std::vector<double> rows(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < d; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += t(r, c) * data.xi(i, c);
            rows[i * d + r] = s;
        }
    }
    Dataset out(n, d, std::move(rows), ScaleConvention::raw_xi, SymMatrix::identity(d));
    out.provenance = data.provenance;
    out.seed = data.seed;
    return out;
}

namespace {

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("dataset read: truncated file");
    return v;
}

constexpr char kMagic[8] = {'H', 'D', 'G', 'D', 'S', 'E', 'T', '1'};

}  // namespace

void write_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint64_t>(out, data.n());
    write_pod<std::uint64_t>(out, data.d());
    write_pod<std::uint8_t>(out, data.scale() == ScaleConvention::raw_xi ? 0 : 1);
    write_pod<std::uint64_t>(out, data.seed);
    out.write(reinterpret_cast<const char*>(data.rows().data()),
              static_cast<std::streamsize>(data.rows().size() * sizeof(double)));
    const bool identity_vw = data.var_w().data() == SymMatrix::identity(data.d()).data();
    write_pod<std::uint8_t>(out, identity_vw ? 1 : 0);
    if (!identity_vw)
        out.write(reinterpret_cast<const char*>(data.var_w().data().data()),
                  static_cast<std::streamsize>(data.var_w().data().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_dataset: write failed for " + path);

    nlohmann::ordered_json side;
    side["n"] = data.n();
    side["d"] = data.d();
    side["scale"] = to_string(data.scale());
    side["seed"] = data.seed;
    if (data.provenance) {
        const DgpSpec& s = *data.provenance;
        side["dgp"] = {{"kind", to_string(s.kind)},
                       {"marginal", to_string(s.marginal)},
                       {"multiplier", to_string(s.multiplier)},
                       {"ma-order", s.ma_order}};
    }
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_dataset: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("read_dataset: bad magic in " + path);
    const auto n = read_pod<std::uint64_t>(in);
    const auto d = read_pod<std::uint64_t>(in);
    const auto scale = read_pod<std::uint8_t>(in) == 0 ? ScaleConvention::raw_xi : ScaleConvention::x_over_sqrt_n;
    const auto seed = read_pod<std::uint64_t>(in);
    std::vector<double> rows(n * d);
    in.read(reinterpret_cast<char*>(rows.data()), static_cast<std::streamsize>(rows.size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_dataset: truncated rows in " + path);
    const bool identity_vw = read_pod<std::uint8_t>(in) == 1;
    SymMatrix vw = SymMatrix::identity(d);
    if (!identity_vw) {
        std::vector<double> vwdata(d * d);
        in.read(reinterpret_cast<char*>(vwdata.data()), static_cast<std::streamsize>(vwdata.size() * sizeof(double)));
        if (!in) throw std::runtime_error("read_dataset: truncated var_w in " + path);
        vw = SymMatrix(d, std::move(vwdata));
    }
    Dataset out(n, d, std::move(rows), scale, std::move(vw));
    out.seed = seed;
    return out;
}

}  // namespace hdgauss
