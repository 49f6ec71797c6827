#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lpflow {

// Deterministic random stream. The engine (mt19937_64) has a standard-pinned
// output sequence; the uniform/gaussian transforms are spelled out here because
// std::*_distribution output is implementation-defined, which would break the
// bit-reproducibility contract.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe under log().
    double uniform01_open0() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) by rejection, bias-free.
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x = next_u64();
        while (x >= limit) {
            x = next_u64();
        }
        return x % n;
    }

    // One standard normal variate (Box-Muller, cosine branch; the sine mate is
    // discarded so single draws and batched draws see the same stream).
    double gaussian() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    template <typename T>
    void fill_gaussian(std::span<T> out) {
        size_t i = 0;
        while (i + 1 < out.size()) {
            const double u1 = uniform01_open0();
            const double u2 = uniform01();
            const double r = std::sqrt(-2.0 * std::log(u1));
            out[i] = static_cast<T>(r * std::cos(2.0 * kPi * u2));
            out[i + 1] = static_cast<T>(r * std::sin(2.0 * kPi * u2));
            i += 2;
        }
        if (i < out.size()) {
            out[i] = static_cast<T>(gaussian());
        }
    }

    template <typename T>
    std::vector<T> gaussian_vector(size_t n) {
        std::vector<T> v(n);
        fill_gaussian<T>(v);
        return v;
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::mt19937_64 engine_;
};

inline Rng seeded_rng(uint64_t seed) { return Rng(seed); }

}  // namespace lpflow
