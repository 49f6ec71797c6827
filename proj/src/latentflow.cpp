#include "lpflow/latentflow.hpp"

namespace lpflow {

TrainResult train_latent_sampler(Mlp<float>& model, const AuxModel& aux,
                                 const SampleSet& dataset, const TrainConfig& cfg) {
    cfg.validate();
    validate_sample_set(dataset, "train_latent_sampler dataset");
    require(dataset.count >= 1, "train_latent_sampler: dataset must be non-empty");
    require(dataset.dim == aux.data_dim, "train_latent_sampler: aux/data dimension mismatch");
    const int k = aux.latent_dim;
    require(model.config().input_dim == k && model.config().output_dim == k &&
                model.config().cond_dim == 0,
            "train_latent_sampler: model must be an unconditional k -> k map");

    Rng rng(derive_seed(cfg.seed, 41));
    AdamW<float> opt(model, cfg.adamw());
    auto grads = model.make_grads();
    const int record_every = cfg.resolved_record_every(dataset.count);
    auto snap = model.params();

    const int n = cfg.batch;
    std::vector<float> z(static_cast<size_t>(n) * k);
    std::vector<float> w(static_cast<size_t>(n) * k);
    std::vector<float> phi(static_cast<size_t>(n) * k);
    std::vector<float> target(static_cast<size_t>(n) * k);
    std::vector<float> ts(n);
    std::vector<float> d_pred(static_cast<size_t>(n) * k);

    TrainResult res;
    double acc = 0.0;
    int acc_n = 0;
    for (int step = 1; step <= cfg.steps; ++step) {
        const auto idx = draw_batch_indices(rng, dataset.count, n);
        const auto Y = gather_batch(dataset, idx);

        auto enc_tr = aux.encoder.forward_batch(Y, n, {}, {});
        const auto eps_z = rng.gaussian_vector<float>(static_cast<size_t>(n) * k);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                const float mu = enc_tr.Y[static_cast<size_t>(i) * 2 * k + j];
                const float lv = clamp_log_var(enc_tr.Y[static_cast<size_t>(i) * 2 * k + k + j]);
                z[static_cast<size_t>(i) * k + j] =
                    mu + std::exp(0.5f * lv) * eps_z[static_cast<size_t>(i) * k + j];
            }
        }
        rng.fill_gaussian<float>(std::span<float>(w));
        sample_timesteps<float>(rng, ts);
        for (int i = 0; i < n; ++i) {
            const float t = ts[i];
            for (int j = 0; j < k; ++j) {
                const size_t ij = static_cast<size_t>(i) * k + j;
                target[ij] = z[ij] - w[ij];
                phi[ij] = z[ij] * t + w[ij] * (1.0f - t);
            }
        }

        auto tr = model.forward_batch(phi, n, ts, {});
        const float loss = velocity_loss_and_grad<float>(tr.Y, target, {}, d_pred);
        if (!std::isfinite(loss)) {
            model.params() = snap;
            res.aborted = true;
            res.diagnostic = "non-finite loss at step " + std::to_string(step) +
                             "; restored last recorded parameters";
            return res;
        }
        grads.zero();
        model.backward_batch(tr, d_pred, grads);
        try {
            opt.step(model, grads);
        } catch (const optimizer_error& e) {
            model.params() = snap;
            res.aborted = true;
            res.diagnostic = e.what();
            return res;
        }

        acc += loss;
        ++acc_n;
        res.final_loss = loss;
        if (step % record_every == 0 || step == cfg.steps) {
            res.history.entries.emplace_back(step, acc / acc_n);
            acc = 0.0;
            acc_n = 0;
            snap = model.params();
        }
    }
    return res;
}

std::vector<float> latent_from_source(const Mlp<float>& model, std::span<const float> w,
                                      int steps, SolverMethod method) {
    const auto field = as_vector_field(model, {});
    SolverConfig cfg{method, steps, Direction::forward};
    return integrate<float>(field, w, cfg).end;
}

std::vector<float> sample_latent(const Mlp<float>& model, Rng& rng, int steps,
                                 SolverMethod method) {
    const int k = model.config().input_dim;
    const auto w = rng.gaussian_vector<float>(static_cast<size_t>(k));
    return latent_from_source(model, w, steps, method);
}

std::vector<float> invert_latent(const Mlp<float>& model, std::span<const float> z,
                                 int steps, SolverMethod method) {
    const auto field = as_vector_field(model, {});
    return reverse_map<float>(field, z, steps, method);
}

}  // namespace lpflow
