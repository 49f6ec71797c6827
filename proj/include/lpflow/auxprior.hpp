#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lpflow/gaussian.hpp"
#include "lpflow/mlp.hpp"
#include "lpflow/trainer.hpp"

namespace lpflow {

// Auxiliary prior model: encoder maps data to a latent posterior, decoder maps
// a latent code to the learned per-dimension prior over data space.
struct AuxModel {
    Mlp<float> encoder;    // d -> 2k  (mean | log_var)
    Mlp<float> decoder;    // k -> 2d  (mean | log_var)
    float kl_weight = 1e-3f;
    int data_dim = 0;
    int latent_dim = 0;
};

AuxModel make_aux_model(int data_dim, int latent_dim, int width, int blocks,
                        float kl_weight, uint64_t seed);

DiagonalGaussian<float> encode(const AuxModel& aux, std::span<const float> y);
DiagonalGaussian<float> decode(const AuxModel& aux, std::span<const float> z);

// Draws x ~ P_L with the sigma floor applied.
std::vector<float> sample_prior(const DiagonalGaussian<float>& prior, Rng& rng);

struct AuxTrainConfig {
    TrainConfig base;
};

TrainResult train_auxiliary(AuxModel& aux, const SampleSet& dataset, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Differentiable VAE objective over one batch: kl_weight * KL + Gaussian NLL,
// both means over batch and dimensions. Shared by the float32 trainer and the
// float64 finite-difference oracle tests. eps_z supplies the fixed
// reparameterization noise (n x k). Gradients are accumulated into
// enc_g / dec_g.
// ---------------------------------------------------------------------------
template <typename T>
struct AuxLossParts {
    T total = T(0);
    T kl = T(0);
    T nll = T(0);
};

template <typename T>
AuxLossParts<T> aux_vae_loss_and_grads(const Mlp<T>& enc, const Mlp<T>& dec, T kl_weight,
                                       std::span<const T> Y, int n,
                                       std::span<const T> eps_z,
                                       MlpGrads<T>& enc_g, MlpGrads<T>& dec_g) {
    const int d = enc.config().input_dim;
    const int k = dec.config().input_dim;
    require(enc.config().output_dim == 2 * k, "aux: encoder output must be 2*latent_dim");
    require(dec.config().output_dim == 2 * d, "aux: decoder output must be 2*data_dim");
    // feature rows must be the raw states so dz maps 1:1 onto the latent batch
    require(enc.config().time_freqs == 0 && enc.config().cond_dim == 0 &&
                dec.config().time_freqs == 0 && dec.config().cond_dim == 0,
            "aux: encoder/decoder must be plain state regressors");
    require(Y.size() == static_cast<size_t>(n) * d, "aux: batch size mismatch");
    require(eps_z.size() == static_cast<size_t>(n) * k, "aux: eps_z size mismatch");
    constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

    auto enc_tr = enc.forward_batch(Y, n, {}, {});

    // posterior split + clamp; in_range masks gate gradients through the clamp
    std::vector<T> mu_e(static_cast<size_t>(n) * k), lv_e(static_cast<size_t>(n) * k);
    std::vector<uint8_t> lv_e_in(static_cast<size_t>(n) * k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            const T m = enc_tr.Y[static_cast<size_t>(i) * 2 * k + j];
            const T raw = enc_tr.Y[static_cast<size_t>(i) * 2 * k + k + j];
            mu_e[static_cast<size_t>(i) * k + j] = m;
            lv_e[static_cast<size_t>(i) * k + j] = clamp_log_var(raw);
            lv_e_in[static_cast<size_t>(i) * k + j] =
                (raw > static_cast<T>(kLogVarMin) && raw < static_cast<T>(kLogVarMax)) ? 1 : 0;
        }
    }

    AuxLossParts<T> parts;
    const T inv_nk = T(1) / static_cast<T>(static_cast<size_t>(n) * k);
    for (size_t i = 0; i < mu_e.size(); ++i) {
        parts.kl += T(0.5) * (mu_e[i] * mu_e[i] + std::exp(lv_e[i]) - lv_e[i] - T(1));
    }
    parts.kl *= inv_nk;

    // z = mu + sigma * eps
    std::vector<T> z(static_cast<size_t>(n) * k), sig_e(static_cast<size_t>(n) * k);
    for (size_t i = 0; i < z.size(); ++i) {
        sig_e[i] = std::exp(T(0.5) * lv_e[i]);
        z[i] = mu_e[i] + sig_e[i] * eps_z[i];
    }

    auto dec_tr = dec.forward_batch(z, n, {}, {});

    std::vector<T> mu_d(static_cast<size_t>(n) * d), lv_d(static_cast<size_t>(n) * d);
    std::vector<uint8_t> lv_d_in(static_cast<size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            const T m = dec_tr.Y[static_cast<size_t>(i) * 2 * d + j];
            const T raw = dec_tr.Y[static_cast<size_t>(i) * 2 * d + d + j];
            mu_d[static_cast<size_t>(i) * d + j] = m;
            lv_d[static_cast<size_t>(i) * d + j] = clamp_log_var(raw);
            lv_d_in[static_cast<size_t>(i) * d + j] =
                (raw > static_cast<T>(kLogVarMin) && raw < static_cast<T>(kLogVarMax)) ? 1 : 0;
        }
    }

    const T inv_nd = T(1) / static_cast<T>(static_cast<size_t>(n) * d);
    for (size_t i = 0; i < mu_d.size(); ++i) {
        const T r = Y[i] - mu_d[i];
        parts.nll += T(0.5) * (r * r * std::exp(-lv_d[i]) + lv_d[i] + static_cast<T>(kLog2Pi));
    }
    parts.nll *= inv_nd;
    parts.total = kl_weight * parts.kl + parts.nll;

    // ---- backward ----
    // decoder output grads
    std::vector<T> d_dec(static_cast<size_t>(n) * 2 * d, T(0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            const size_t ij = static_cast<size_t>(i) * d + j;
            const T r = Y[ij] - mu_d[ij];
            const T inv_var = std::exp(-lv_d[ij]);
            d_dec[static_cast<size_t>(i) * 2 * d + j] = -r * inv_var * inv_nd;
            if (lv_d_in[ij]) {
                d_dec[static_cast<size_t>(i) * 2 * d + d + j] =
                    T(0.5) * (T(1) - r * r * inv_var) * inv_nd;
            }
        }
    }
    std::vector<T> dz;
    dec.backward_batch(dec_tr, d_dec, dec_g, &dz);

    // encoder output grads: KL term + chain through z
    std::vector<T> d_enc(static_cast<size_t>(n) * 2 * k, T(0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            const size_t ij = static_cast<size_t>(i) * k + j;
            T dmu = kl_weight * mu_e[ij] * inv_nk + dz[ij];
            T dlv = T(0);
            if (lv_e_in[ij]) {
                dlv = kl_weight * T(0.5) * (std::exp(lv_e[ij]) - T(1)) * inv_nk +
                      dz[ij] * T(0.5) * sig_e[ij] * eps_z[ij];
            }
            d_enc[static_cast<size_t>(i) * 2 * k + j] = dmu;
            d_enc[static_cast<size_t>(i) * 2 * k + k + j] = dlv;
        }
    }
    enc.backward_batch(enc_tr, d_enc, enc_g);
    return parts;
}

}  // namespace lpflow
