#include "lpflow/auxprior.hpp"

#include <algorithm>

namespace lpflow {

AuxModel make_aux_model(int data_dim, int latent_dim, int width, int blocks,
                        float kl_weight, uint64_t seed) {
    require(data_dim >= 1, "aux: data_dim must be >= 1");
    require(latent_dim >= 1, "aux: latent_dim must be >= 1");
    require(kl_weight > 0.f, "aux: kl_weight (beta) must be > 0");
    MlpConfig enc_cfg;
    enc_cfg.input_dim = data_dim;
    enc_cfg.output_dim = 2 * latent_dim;
    enc_cfg.width = width;
    enc_cfg.blocks = blocks;
    enc_cfg.time_freqs = 0;
    MlpConfig dec_cfg;
    dec_cfg.input_dim = latent_dim;
    dec_cfg.output_dim = 2 * data_dim;
    dec_cfg.width = width;
    dec_cfg.blocks = blocks;
    dec_cfg.time_freqs = 0;

    AuxModel aux;
    aux.encoder = Mlp<float>(enc_cfg, derive_seed(seed, 11));
    aux.decoder = Mlp<float>(dec_cfg, derive_seed(seed, 12));
    aux.kl_weight = kl_weight;
    aux.data_dim = data_dim;
    aux.latent_dim = latent_dim;
    return aux;
}

namespace {

DiagonalGaussian<float> split_and_clamp(const std::vector<float>& out, int half) {
    DiagonalGaussian<float> g;
    g.mean.assign(out.begin(), out.begin() + half);
    g.log_var.resize(half);
    for (int i = 0; i < half; ++i) {
        g.log_var[i] = clamp_log_var(out[half + i]);
    }
    return g;
}

}  // namespace

DiagonalGaussian<float> encode(const AuxModel& aux, std::span<const float> y) {
    require(y.size() == static_cast<size_t>(aux.data_dim), "encode: dimension mismatch");
    const auto out = aux.encoder.forward(y, 0.f, {});
    return split_and_clamp(out, aux.latent_dim);
}

DiagonalGaussian<float> decode(const AuxModel& aux, std::span<const float> z) {
    require(z.size() == static_cast<size_t>(aux.latent_dim), "decode: dimension mismatch");
    const auto out = aux.decoder.forward(z, 0.f, {});
    return split_and_clamp(out, aux.data_dim);
}

std::vector<float> sample_prior(const DiagonalGaussian<float>& prior, Rng& rng) {
    std::vector<float> x(prior.dim());
    rng.fill_gaussian<float>(x);
    for (size_t i = 0; i < x.size(); ++i) {
        const float sigma = std::max(std::exp(0.5f * clamp_log_var(prior.log_var[i])),
                                     static_cast<float>(kSigmaFloor));
        x[i] = prior.mean[i] + sigma * x[i];
    }
    return x;
}

TrainResult train_auxiliary(AuxModel& aux, const SampleSet& dataset, const TrainConfig& cfg) {
    cfg.validate();
    validate_sample_set(dataset, "train_auxiliary dataset");
    require(dataset.count >= 1, "train_auxiliary: dataset must be non-empty");
    require(dataset.dim == aux.data_dim, "train_auxiliary: dataset/model dimension mismatch");

    Rng rng(derive_seed(cfg.seed, 21));
    AdamW<float> enc_opt(aux.encoder, cfg.adamw());
    AdamW<float> dec_opt(aux.decoder, cfg.adamw());
    auto enc_g = aux.encoder.make_grads();
    auto dec_g = aux.decoder.make_grads();
    const int record_every = cfg.resolved_record_every(dataset.count);

    // last recorded snapshot, restored on abort
    auto enc_snap = aux.encoder.params();
    auto dec_snap = aux.decoder.params();

    TrainResult res;
    double acc = 0.0;
    int acc_n = 0;
    for (int step = 1; step <= cfg.steps; ++step) {
        const auto idx = draw_batch_indices(rng, dataset.count, cfg.batch);
        const auto Y = gather_batch(dataset, idx);
        const auto eps_z = rng.gaussian_vector<float>(static_cast<size_t>(cfg.batch) * aux.latent_dim);

        enc_g.zero();
        dec_g.zero();
        const auto parts = aux_vae_loss_and_grads<float>(aux.encoder, aux.decoder, aux.kl_weight,
                                                         Y, cfg.batch, eps_z, enc_g, dec_g);
        if (!std::isfinite(parts.total)) {
            aux.encoder.params() = enc_snap;
            aux.decoder.params() = dec_snap;
            res.aborted = true;
            res.diagnostic = "non-finite loss at step " + std::to_string(step) +
                             "; restored last recorded parameters";
            return res;
        }
        try {
            enc_opt.step(aux.encoder, enc_g);
            dec_opt.step(aux.decoder, dec_g);
        } catch (const optimizer_error& e) {
            aux.encoder.params() = enc_snap;
            aux.decoder.params() = dec_snap;
            res.aborted = true;
            res.diagnostic = e.what();
            return res;
        }

        acc += parts.total;
        ++acc_n;
        res.final_loss = parts.total;
        if (step % record_every == 0 || step == cfg.steps) {
            res.history.entries.emplace_back(step, acc / acc_n);
            acc = 0.0;
            acc_n = 0;
            enc_snap = aux.encoder.params();
            dec_snap = aux.decoder.params();
        }
    }
    return res;
}

}  // namespace lpflow
