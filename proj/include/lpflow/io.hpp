#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lpflow/common.hpp"
#include "lpflow/trainer.hpp"

namespace lpflow {

// One row per sample, values comma-joined with round-trip precision.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& s);

void write_vector_csv(const std::filesystem::path& path, std::span<const double> values,
                      int columns);

// Parses comma/whitespace-separated doubles.
std::vector<double> read_values_csv(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path, const LossHistory& history);

// Binary 8-bit grayscale; values mapped from [-1, 1] to [0, 255].
void write_pgm(const std::filesystem::path& path, std::span<const double> values,
               int width, int height);

struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;   // in [-1, 1]
};

PgmImage read_pgm(const std::filesystem::path& path);

}  // namespace lpflow
