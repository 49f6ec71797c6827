#include "lpflow/pipeline.hpp"

#include <algorithm>

namespace lpflow {

std::vector<float> generate_one(const AuxModel& aux, const Mlp<float>& fm,
                                std::span<const float> z, Rng& rng,
                                int fm_steps, SolverMethod fm_method) {
    require(z.size() == static_cast<size_t>(aux.latent_dim), "generate_one: latent size mismatch");
    const auto prior = decode(aux, z);
    const auto x = sample_prior(prior, rng);
    const auto field = as_vector_field(fm, std::vector<float>(z.begin(), z.end()));
    SolverConfig cfg{fm_method, fm_steps, Direction::forward};
    return integrate<float>(field, x, cfg).end;
}

SampleSet generate(const AuxModel& aux, const Mlp<float>& fm, const Mlp<float>& lat,
                   const GenerationConfig& cfg, std::vector<int> shape) {
    cfg.validate();
    require(fm.config().input_dim == aux.data_dim && fm.config().cond_dim == aux.latent_dim,
            "generate: flow model does not match the aux model");
    require(lat.config().input_dim == aux.latent_dim, "generate: latent sampler size mismatch");
    SampleSet out = make_sample_set(cfg.count, std::move(shape));
    require(out.dim == aux.data_dim, "generate: shape does not match the data dimension");

    Rng rng(cfg.seed);
    for (int i = 0; i < cfg.count; ++i) {
        const auto z = sample_latent(lat, rng, cfg.latent_steps, cfg.latent_method);
        const auto y = generate_one(aux, fm, z, rng, cfg.fm_steps, cfg.fm_method);
        auto row = out.row(i);
        for (int j = 0; j < out.dim; ++j) {
            row[j] = static_cast<double>(y[j]);
        }
    }
    return out;
}

SampleSet generate_baseline(const Mlp<float>& fm, const GenerationConfig& cfg,
                            std::vector<int> shape) {
    cfg.validate();
    require(fm.config().cond_dim == 0, "generate_baseline: model must be unconditional");
    SampleSet out = make_sample_set(cfg.count, std::move(shape));
    require(out.dim == fm.config().input_dim, "generate_baseline: shape/model dimension mismatch");

    Rng rng(cfg.seed);
    const auto field = as_vector_field(fm, {});
    SolverConfig scfg{cfg.fm_method, cfg.fm_steps, Direction::forward};
    std::vector<float> x(out.dim);
    for (int i = 0; i < cfg.count; ++i) {
        rng.fill_gaussian<float>(std::span<float>(x));
        const auto y = integrate<float>(field, x, scfg).end;
        auto row = out.row(i);
        for (int j = 0; j < out.dim; ++j) {
            row[j] = static_cast<double>(y[j]);
        }
    }
    return out;
}

std::vector<double> inpaint(const AuxModel& aux, const Mlp<float>& fm, const Mlp<float>* lat,
                            std::span<const double> y, std::span<const uint8_t> mask,
                            const InpaintConfig& cfg) {
    const int d = aux.data_dim;
    require(y.size() == static_cast<size_t>(d), "inpaint: input dimension mismatch");
    require(mask.size() == y.size(), "inpaint: mask length mismatch");
    for (uint8_t m : mask) {
        require(m == 0 || m == 1, "inpaint: mask entries must be 0 or 1");
    }
    require(all_finite(y), "inpaint: non-finite input");
    require(cfg.fm_steps >= 1, "inpaint: fm_steps must be >= 1");

    Rng rng(cfg.seed);
    std::vector<float> yf(d);
    for (int i = 0; i < d; ++i) yf[i] = static_cast<float>(y[i]);

    auto z = reparam_sample(encode(aux, yf), rng);
    if (cfg.perturb_alpha != 0.0) {
        require(lat != nullptr, "inpaint: latent perturbation requires the latent sampler");
        z = perturb_latent(*lat, z, cfg.perturb_alpha, rng, cfg.invert_steps);
    }
    const auto prior = decode(aux, z);
    const auto x = sample_prior(prior, rng);

    // straight-line field for pinned coordinates, computed once at t=0
    std::vector<float> straight(d);
    for (int i = 0; i < d; ++i) {
        straight[i] = yf[i] - x[i];
    }

    const auto model_field = as_vector_field(fm, z);
    std::vector<float> tmp(d);
    VectorField<float> masked = [&](float t, std::span<const float> state, std::span<float> out) {
        model_field(t, state, tmp);
        for (int i = 0; i < d; ++i) {
            out[i] = mask[i] ? tmp[i] : straight[i];
        }
    };

    SolverConfig scfg{cfg.fm_method, cfg.fm_steps, Direction::forward};
    const auto res = integrate<float>(masked, x, scfg).end;
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) out[i] = static_cast<double>(res[i]);
    return out;
}

InterpMode parse_interp_mode(const std::string& s) {
    if (s == "z") return InterpMode::linear_in_z;
    if (s == "w") return InterpMode::linear_in_w;
    throw std::invalid_argument("unknown interpolation mode: " + s + " (expected z or w)");
}

std::vector<float> interpolate_latents(const Mlp<float>* lat, std::span<const float> z0,
                                       std::span<const float> z1, double alpha, InterpMode mode,
                                       int steps, SolverMethod method) {
    require(z0.size() == z1.size(), "interpolate_latents: latent size mismatch");
    require(alpha >= 0.0 && alpha <= 1.0, "interpolate_latents: alpha outside [0,1]");
    const float a = static_cast<float>(alpha);
    if (mode == InterpMode::linear_in_z) {
        std::vector<float> z(z0.size());
        for (size_t i = 0; i < z.size(); ++i) {
            z[i] = (1.0f - a) * z0[i] + a * z1[i];
        }
        return z;
    }
    require(lat != nullptr, "interpolate_latents: linear_in_w requires the latent sampler");
    const auto w0 = invert_latent(*lat, z0, steps, method);
    const auto w1 = invert_latent(*lat, z1, steps, method);
    std::vector<float> w(w0.size());
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = (1.0f - a) * w0[i] + a * w1[i];
    }
    return latent_from_source(*lat, w, steps, method);
}

std::vector<float> perturb_latent(const Mlp<float>& lat, std::span<const float> z, double alpha,
                                  Rng& rng, int steps, SolverMethod method) {
    auto w = invert_latent(lat, z, steps, method);
    for (auto& wi : w) {
        wi += static_cast<float>(alpha) * static_cast<float>(rng.gaussian());
    }
    return latent_from_source(lat, w, steps, method);
}

}  // namespace lpflow
