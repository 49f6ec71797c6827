#include "lpflow/flowmatch.hpp"

#include <memory>

namespace lpflow {

namespace {

struct FieldWorkspace {
    std::vector<float> state;
    std::vector<float> ts;
};

}  // namespace

VectorField<float> as_vector_field(const Mlp<float>& model, std::vector<float> cond) {
    require(cond.size() == static_cast<size_t>(model.config().cond_dim),
            "as_vector_field: cond dimension mismatch");
    const Mlp<float>* m = &model;
    return [m, cond = std::move(cond)](float t, std::span<const float> state,
                                       std::span<float> out) {
        const auto v = m->forward(state, t, cond);
        std::copy(v.begin(), v.end(), out.begin());
    };
}

TrainResult train_flow(Mlp<float>& model, PriorSource prior, const AuxModel* aux,
                       const SampleSet& dataset, const TrainConfig& cfg) {
    cfg.validate();
    validate_sample_set(dataset, "train_flow dataset");
    require(dataset.count >= 1, "train_flow: dataset must be non-empty");
    const int d = dataset.dim;
    require(model.config().input_dim == d && model.config().output_dim == d,
            "train_flow: model/data dimension mismatch");
    if (prior == PriorSource::learned) {
        require(aux != nullptr, "train_flow: learned prior requires a trained aux model");
        require(aux->data_dim == d, "train_flow: aux/data dimension mismatch");
        require(model.config().cond_dim == aux->latent_dim,
                "train_flow: model cond_dim must equal the aux latent_dim");
    } else {
        require(model.config().cond_dim == 0, "train_flow: baseline model must be unconditional");
    }

    Rng rng(derive_seed(cfg.seed, 31));
    AdamW<float> opt(model, cfg.adamw());
    auto grads = model.make_grads();
    const int record_every = cfg.resolved_record_every(dataset.count);
    auto snap = model.params();

    const int n = cfg.batch;
    const int k = prior == PriorSource::learned ? aux->latent_dim : 0;
    std::vector<float> x(static_cast<size_t>(n) * d);
    std::vector<float> target(static_cast<size_t>(n) * d);
    std::vector<float> phi(static_cast<size_t>(n) * d);
    std::vector<float> weights;
    std::vector<float> cond;
    std::vector<float> ts(n);
    std::vector<float> d_pred(static_cast<size_t>(n) * d);

    TrainResult res;
    double acc = 0.0;
    int acc_n = 0;
    for (int step = 1; step <= cfg.steps; ++step) {
        const auto idx = draw_batch_indices(rng, dataset.count, n);
        const auto Y = gather_batch(dataset, idx);

        if (prior == PriorSource::learned) {
            // frozen aux: posterior -> latent sample -> learned prior -> x
            auto enc_tr = aux->encoder.forward_batch(Y, n, {}, {});
            cond.resize(static_cast<size_t>(n) * k);
            const auto eps_z = rng.gaussian_vector<float>(static_cast<size_t>(n) * k);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < k; ++j) {
                    const float mu = enc_tr.Y[static_cast<size_t>(i) * 2 * k + j];
                    const float lv = clamp_log_var(enc_tr.Y[static_cast<size_t>(i) * 2 * k + k + j]);
                    cond[static_cast<size_t>(i) * k + j] =
                        mu + std::exp(0.5f * lv) * eps_z[static_cast<size_t>(i) * k + j];
                }
            }
            auto dec_tr = aux->decoder.forward_batch(cond, n, {}, {});
            weights.resize(static_cast<size_t>(n) * d);
            const auto eps_x = rng.gaussian_vector<float>(static_cast<size_t>(n) * d);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < d; ++j) {
                    const size_t ij = static_cast<size_t>(i) * d + j;
                    const float mu = dec_tr.Y[static_cast<size_t>(i) * 2 * d + j];
                    const float lv = clamp_log_var(dec_tr.Y[static_cast<size_t>(i) * 2 * d + d + j]);
                    const float sigma = std::max(std::exp(0.5f * lv),
                                                 static_cast<float>(kSigmaFloor));
                    x[ij] = mu + sigma * eps_x[ij];
                    weights[ij] = 1.0f / sigma;
                }
            }
        } else {
            rng.fill_gaussian<float>(std::span<float>(x));
        }

        sample_timesteps<float>(rng, ts);
        for (int i = 0; i < n; ++i) {
            const float t = ts[i];
            for (int j = 0; j < d; ++j) {
                const size_t ij = static_cast<size_t>(i) * d + j;
                target[ij] = Y[ij] - x[ij];
                phi[ij] = Y[ij] * t + x[ij] * (1.0f - t);
            }
        }

        auto tr = model.forward_batch(phi, n, ts, cond);
        const float loss = velocity_loss_and_grad<float>(tr.Y, target, weights, d_pred);
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

}  // namespace lpflow
