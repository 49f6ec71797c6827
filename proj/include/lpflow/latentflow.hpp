#pragma once

#include <span>
#include <vector>

#include "lpflow/auxprior.hpp"
#include "lpflow/flowmatch.hpp"
#include "lpflow/mlp.hpp"
#include "lpflow/ode.hpp"
#include "lpflow/trainer.hpp"

namespace lpflow {

// Trains the unconditional latent sampler: for each data point the frozen
// encoder supplies z (reparameterized), w ~ N(0, I) supplies the source, and
// the model regresses the straight displacement z - w.
TrainResult train_latent_sampler(Mlp<float>& model, const AuxModel& aux,
                                 const SampleSet& dataset, const TrainConfig& cfg);

// Draws w ~ N(0, I) and integrates it forward to a latent code.
std::vector<float> sample_latent(const Mlp<float>& model, Rng& rng, int steps = 4,
                                 SolverMethod method = SolverMethod::midpoint);

// Deterministic forward transport of a given source point w.
std::vector<float> latent_from_source(const Mlp<float>& model, std::span<const float> w,
                                      int steps = 4, SolverMethod method = SolverMethod::midpoint);

// Reverse-maps a latent code to its N(0, I) source point (t: 1 -> 0).
std::vector<float> invert_latent(const Mlp<float>& model, std::span<const float> z,
                                 int steps, SolverMethod method = SolverMethod::midpoint);

}  // namespace lpflow
