#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpflow/adamw.hpp"
#include "lpflow/common.hpp"
#include "lpflow/rng.hpp"

namespace lpflow {

struct TrainConfig {
    int steps = 8000;
    int batch = 128;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.0;
    double eps = 1e-8;
    uint64_t seed = 0;
    // history record interval in steps; 0 derives one nominal dataset pass
    int record_every = 0;

    AdamWConfig adamw() const {
        return AdamWConfig{lr, beta1, beta2, weight_decay, eps};
    }

    int resolved_record_every(int dataset_size) const {
        if (record_every > 0) return record_every;
        const int per_pass = (dataset_size + batch - 1) / batch;
        return per_pass > 0 ? per_pass : 1;
    }

    void validate() const {
        require(steps >= 1, "TrainConfig: steps must be >= 1");
        require(batch >= 1, "TrainConfig: batch must be >= 1");
        require(lr > 0, "TrainConfig: lr must be > 0");
    }
};

struct LossHistory {
    std::vector<std::pair<int64_t, double>> entries;   // (step, mean loss since last entry)
};

// Training outcome. On a non-finite loss or rejected update the trainer
// restores the last recorded parameter snapshot and reports the diagnostic
// instead of throwing, so callers can still persist the last good state.
struct TrainResult {
    LossHistory history;
    bool aborted = false;
    std::string diagnostic;
    double final_loss = 0.0;
};

// Uniform seed derivation for the independent streams of one run.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Copies a float batch of dataset rows selected by `idx`.
inline std::vector<float> gather_batch(const SampleSet& data, const std::vector<uint32_t>& idx) {
    std::vector<float> out(idx.size() * static_cast<size_t>(data.dim));
    for (size_t i = 0; i < idx.size(); ++i) {
        const auto r = data.row(static_cast<int>(idx[i]));
        for (int j = 0; j < data.dim; ++j) {
            out[i * data.dim + j] = static_cast<float>(r[j]);
        }
    }
    return out;
}

inline std::vector<uint32_t> draw_batch_indices(Rng& rng, int dataset_size, int batch) {
    std::vector<uint32_t> idx(batch);
    for (auto& i : idx) {
        i = static_cast<uint32_t>(rng.below(static_cast<uint64_t>(dataset_size)));
    }
    return idx;
}

}  // namespace lpflow
