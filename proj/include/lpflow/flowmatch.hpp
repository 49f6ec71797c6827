#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lpflow/auxprior.hpp"
#include "lpflow/mlp.hpp"
#include "lpflow/ode.hpp"
#include "lpflow/trainer.hpp"

namespace lpflow {

// phi_t(x) = y*t + x*(1-t)
template <typename T>
std::vector<T> interpolate(std::span<const T> x, std::span<const T> y, T t) {
    require(x.size() == y.size(), "interpolate: shape mismatch");
    require(t >= T(0) && t <= T(1), "interpolate: t outside [0,1]");
    std::vector<T> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = y[i] * t + x[i] * (T(1) - t);
    }
    return out;
}

// Mean squared error between the predicted velocity and the straight-line
// displacement y - x.
template <typename T>
T flow_match_loss(std::span<const T> pred_v, std::span<const T> x, std::span<const T> y) {
    require(pred_v.size() == x.size() && x.size() == y.size(), "flow_match_loss: shape mismatch");
    T acc = T(0);
    for (size_t i = 0; i < pred_v.size(); ++i) {
        const T e = pred_v[i] - (y[i] - x[i]);
        acc += e * e;
    }
    return acc / static_cast<T>(pred_v.size());
}

// Importance-weighted variant: each squared error is scaled by
// 1 / max(sigma_prior, 1e-3), so the weight never exceeds 1e3. sigma_prior is
// a constant input (no gradient flows into the frozen prior model).
template <typename T>
T weighted_flow_match_loss(std::span<const T> pred_v, std::span<const T> x,
                           std::span<const T> y, std::span<const T> sigma_prior) {
    require(pred_v.size() == x.size() && x.size() == y.size() && y.size() == sigma_prior.size(),
            "weighted_flow_match_loss: shape mismatch");
    T acc = T(0);
    for (size_t i = 0; i < pred_v.size(); ++i) {
        const T w = T(1) / std::max(sigma_prior[i], static_cast<T>(kSigmaFloor));
        const T e = pred_v[i] - (y[i] - x[i]);
        acc += w * (e * e);
    }
    return acc / static_cast<T>(pred_v.size());
}

// Batch loss + gradient w.r.t. the prediction. `weights` may be empty (plain
// loss) or per-element 1/sigma values already floored by the caller.
template <typename T>
T velocity_loss_and_grad(std::span<const T> pred, std::span<const T> target,
                         std::span<const T> weights, std::span<T> d_pred) {
    require(pred.size() == target.size() && pred.size() == d_pred.size(),
            "velocity_loss_and_grad: shape mismatch");
    const T inv_n = T(1) / static_cast<T>(pred.size());
    T acc = T(0);
    if (weights.empty()) {
        for (size_t i = 0; i < pred.size(); ++i) {
            const T e = pred[i] - target[i];
            acc += e * e;
            d_pred[i] = T(2) * e * inv_n;
        }
    } else {
        require(weights.size() == pred.size(), "velocity_loss_and_grad: weights size mismatch");
        for (size_t i = 0; i < pred.size(); ++i) {
            const T e = pred[i] - target[i];
            acc += weights[i] * (e * e);
            d_pred[i] = T(2) * weights[i] * e * inv_n;
        }
    }
    return acc * inv_n;
}

template <typename T>
void sample_timesteps(Rng& rng, std::span<T> out) {
    for (auto& t : out) {
        t = static_cast<T>(rng.uniform01());
    }
}

enum class PriorSource { gaussian, learned };

// Trains the flow model. For PriorSource::learned a trained frozen aux model
// must be supplied: each step encodes the data batch, samples a latent code,
// decodes the learned prior, and draws the ODE start point from it; the loss
// is importance-weighted and the model is conditioned on the latent code.
// For PriorSource::gaussian the start point is N(0, I) and the plain loss is
// used with no conditioning.
TrainResult train_flow(Mlp<float>& model, PriorSource prior, const AuxModel* aux,
                       const SampleSet& dataset, const TrainConfig& cfg);

// Wraps the model as a time-dependent vector field with a frozen condition
// vector. The model must outlive the returned field.
VectorField<float> as_vector_field(const Mlp<float>& model, std::vector<float> cond);

}  // namespace lpflow
