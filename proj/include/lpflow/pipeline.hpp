#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpflow/auxprior.hpp"
#include "lpflow/flowmatch.hpp"
#include "lpflow/latentflow.hpp"
#include "lpflow/ode.hpp"

namespace lpflow {

struct GenerationConfig {
    int latent_steps = 4;
    SolverMethod latent_method = SolverMethod::midpoint;
    int fm_steps = 2;
    SolverMethod fm_method = SolverMethod::midpoint;
    int count = 1;
    uint64_t seed = 0;

    void validate() const {
        require(latent_steps >= 1 && fm_steps >= 1, "GenerationConfig: step counts must be >= 1");
        require(count >= 1, "GenerationConfig: count must be >= 1");
    }
};

// One learned-prior sample from a fixed latent code: decode the prior, draw
// the start point, transport it with the conditioned flow. Output variation
// for a constant z comes entirely from the prior draw.
std::vector<float> generate_one(const AuxModel& aux, const Mlp<float>& fm,
                                std::span<const float> z, Rng& rng,
                                int fm_steps, SolverMethod fm_method);

// Full pipeline: w ~ N(0,I) -> latent sampler -> learned prior -> flow.
SampleSet generate(const AuxModel& aux, const Mlp<float>& fm, const Mlp<float>& lat,
                   const GenerationConfig& cfg, std::vector<int> shape);

// Gaussian-prior baseline: x ~ N(0,I), unconditional flow; latent settings
// are unused.
SampleSet generate_baseline(const Mlp<float>& fm, const GenerationConfig& cfg,
                            std::vector<int> shape);

struct InpaintConfig {
    int fm_steps = 4;
    SolverMethod fm_method = SolverMethod::midpoint;
    uint64_t seed = 0;
    double perturb_alpha = 0.0;   // > 0 perturbs the latent through the sampler
    int invert_steps = 32;
};

// Regenerates y where mask == 1 and pins every mask == 0 coordinate by
// integrating the constant field y - x there, which explicit RK methods solve
// exactly; unmasked coordinates land back on y.
std::vector<double> inpaint(const AuxModel& aux, const Mlp<float>& fm, const Mlp<float>* lat,
                            std::span<const double> y, std::span<const uint8_t> mask,
                            const InpaintConfig& cfg);

enum class InterpMode { linear_in_z, linear_in_w };

InterpMode parse_interp_mode(const std::string& s);

// linear_in_z: plain affine blend (lat may be null). linear_in_w: both codes
// are reverse-mapped to N(0,I), blended there, and transported back.
std::vector<float> interpolate_latents(const Mlp<float>* lat, std::span<const float> z0,
                                       std::span<const float> z1, double alpha, InterpMode mode,
                                       int steps = 32,
                                       SolverMethod method = SolverMethod::midpoint);

// Reverse-maps z, adds alpha * r with r ~ N(0,I), and transports back.
std::vector<float> perturb_latent(const Mlp<float>& lat, std::span<const float> z, double alpha,
                                  Rng& rng, int steps = 32,
                                  SolverMethod method = SolverMethod::midpoint);

}  // namespace lpflow
