#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace hdgauss {

// Counter-based splittable generator. A stream is (key, counter); output i of a
// stream is a fixed avalanche hash of key and i, so any draw is addressable and
// replicate/row substreams can be derived without coordination. Derived keys are
// independent of scheduling, which is what makes worker-count-invariant
// reproducibility possible upstream.
class CounterRng {
  public:
    CounterRng() = default;
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Independent substream for a child index (replicate, coordinate, ...).
    CounterRng derive(std::uint64_t index) const {
        return CounterRng(mix(key_ + 0x632be59bd9b4e019ull * (index + 1)));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

    // Uniform on [0,1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (-1,1), symmetric around 0.
    double next_symmetric() {
        return static_cast<double>(static_cast<std::int64_t>(next_u64() | 1)) * 0x1.0p-63;
    }

    // Standard normal, Box-Muller with a cached spare.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = next_double();
        while (u <= 0.0) u = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double t = 6.283185307179586476925286766559 * next_double();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Standard exponential.
    double next_exponential() { return -std::log1p(-next_double()); }

    // UniformRandomBitGenerator interface for <random> adapters.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hdgauss
