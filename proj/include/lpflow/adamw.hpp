#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpflow/mlp.hpp"

namespace lpflow {

struct optimizer_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdamWConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.0;
    double eps = 1e-8;
};

// Single AdamW update with bias correction over one flat parameter vector.
// `step_count` is the 1-based count including this update.
template <typename T>
void adamw_update(std::span<T> p, std::span<const T> g, std::span<T> m, std::span<T> v,
                  int64_t step_count, const AdamWConfig& cfg) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_count));
    for (size_t i = 0; i < p.size(); ++i) {
        const double gi = static_cast<double>(g[i]);
        const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * gi;
        const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * gi * gi;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double mhat = mi / bc1;
        const double vhat = vi / bc2;
        const double pi = static_cast<double>(p[i]);
        p[i] = static_cast<T>(pi - cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * pi));
    }
}

template <typename T>
class AdamW {
public:
    AdamW() = default;

    AdamW(const Mlp<T>& model, const AdamWConfig& cfg) : cfg_(cfg) {
        for (const auto& p : model.params()) {
            m_.emplace_back(p.size(), T(0));
            v_.emplace_back(p.size(), T(0));
        }
    }

    const AdamWConfig& config() const { return cfg_; }
    int64_t step_count() const { return step_count_; }

    // Applies one update. A non-finite gradient anywhere rejects the whole
    // update; parameters and moments are left untouched.
    void step(Mlp<T>& model, const MlpGrads<T>& grads) {
        auto& params = model.params();
        require(params.size() == grads.g.size() && params.size() == m_.size(),
                "AdamW: model/grads layout mismatch");
        for (size_t k = 0; k < params.size(); ++k) {
            for (T g : grads.g[k].v) {
                if (!std::isfinite(g)) {
                    throw optimizer_error("AdamW: non-finite gradient in " + grads.g[k].name +
                                          " at step " + std::to_string(step_count_ + 1) +
                                          "; update rejected");
                }
            }
        }
        ++step_count_;
        for (size_t k = 0; k < params.size(); ++k) {
            adamw_update<T>(params[k].v, grads.g[k].v, m_[k], v_[k], step_count_, cfg_);
        }
    }

private:
    AdamWConfig cfg_;
    int64_t step_count_ = 0;
    std::vector<std::vector<T>> m_;
    std::vector<std::vector<T>> v_;
};

}  // namespace lpflow
