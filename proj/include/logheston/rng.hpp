#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Deterministic random streams.  A (seed, stream) pair names an independent
// substream: stream state is derived by hashing the pair through splitmix64,
// so replicate k of an experiment always draws from stream k regardless of
// scheduling (split-by-index contract).  All samplers are hand-rolled to
// keep sequences bit-reproducible across standard libraries.

namespace logheston {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// xoshiro256++ core generator.
class Xoshiro256 {
  public:
    Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed;
        (void)splitmix64(sm);
        sm ^= 0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Substream sampler: uniforms, normals, gammas, exponentials.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(seed, stream) {}

    /// Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe under log.
    double uniform_pos() {
        return (static_cast<double>(gen_.next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method (pairs cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double exponential() { return -std::log(uniform_pos()); }

    /// Gamma(shape, scale 1) by Marsaglia-Tsang squeeze; exact for all
    /// shapes, with the standard power boost below shape 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape <= 0");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform_pos(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Index uniform on {0, .., n-1}.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

  private:
    Xoshiro256 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace logheston
