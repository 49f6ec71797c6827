#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lpflow/common.hpp"
#include "lpflow/rng.hpp"

namespace lpflow {

// log-variance clamp applied before any exponentiation
inline constexpr double kLogVarMin = -30.0;
inline constexpr double kLogVarMax = 10.0;
// floor on prior sigma wherever the learned prior is consumed (sampling and
// importance weighting); caps the weight 1/sigma at 1e3
inline constexpr double kSigmaFloor = 1e-3;

template <typename T>
inline T clamp_log_var(T lv) {
    return std::clamp(lv, static_cast<T>(kLogVarMin), static_cast<T>(kLogVarMax));
}

// Per-dimension Gaussian (mean, log-variance); houses both the encoder
// posterior and the learned prior.
template <typename T>
struct DiagonalGaussian {
    std::vector<T> mean;
    std::vector<T> log_var;

    size_t dim() const { return mean.size(); }

    void validate() const {
        require(mean.size() == log_var.size(), "DiagonalGaussian: mean/log_var length mismatch");
        require(all_finite(mean) && all_finite(log_var), "DiagonalGaussian: non-finite entries");
    }
};

// mu + sigma * eps with eps ~ N(0,1); log_var is clamped so sigma > 0 always.
template <typename T>
std::vector<T> reparam_sample(const DiagonalGaussian<T>& g, Rng& rng) {
    g.validate();
    std::vector<T> z(g.dim());
    rng.fill_gaussian<T>(z);
    for (size_t i = 0; i < z.size(); ++i) {
        const T sigma = std::exp(T(0.5) * clamp_log_var(g.log_var[i]));
        z[i] = g.mean[i] + sigma * z[i];
    }
    return z;
}

// Negative Gaussian log-density of y under g, averaged over dimensions:
//   mean_i 1/2 ((y_i - mu_i)^2 / sigma_i^2 + log sigma_i^2 + log 2*pi)
template <typename T>
T gaussian_nll(std::span<const T> y, const DiagonalGaussian<T>& g) {
    g.validate();
    require(y.size() == g.dim(), "gaussian_nll: dimension mismatch");
    require(all_finite(y), "gaussian_nll: non-finite input");
    constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
    T acc = T(0);
    for (size_t i = 0; i < y.size(); ++i) {
        const T lv = clamp_log_var(g.log_var[i]);
        const T r = y[i] - g.mean[i];
        acc += T(0.5) * (r * r * std::exp(-lv) + lv + static_cast<T>(kLog2Pi));
    }
    return acc / static_cast<T>(y.size());
}

// KL(g || N(0, I)) averaged over dimensions:
//   mean_i 1/2 (mu_i^2 + sigma_i^2 - log sigma_i^2 - 1)    >= 0
template <typename T>
T kl_to_standard_normal(const DiagonalGaussian<T>& g) {
    g.validate();
    T acc = T(0);
    for (size_t i = 0; i < g.dim(); ++i) {
        const T lv = clamp_log_var(g.log_var[i]);
        const T mu = g.mean[i];
        acc += T(0.5) * (mu * mu + std::exp(lv) - lv - T(1));
    }
    return g.dim() > 0 ? acc / static_cast<T>(g.dim()) : T(0);
}

}  // namespace lpflow
