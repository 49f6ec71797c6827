#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpflow/common.hpp"

namespace lpflow {

enum class Dataset2d { two_moons, checkerboard, gauss_mix8, spiral };

Dataset2d parse_dataset_2d(const std::string& name);
const char* to_string(Dataset2d kind);

// n seeded points in R^2, standardized to zero mean and unit per-axis
// variance by a built-in affine correction.
SampleSet make_2d(Dataset2d kind, int n, double noise, uint64_t seed);

// Procedural grayscale images in [-1, 1]: a smooth low-variance background
// gradient plus one sharp randomly placed blob inside the central placement
// region. side in [2, 16]; each image is a flat side*side vector.
SampleSet make_blob_images(int n, int side, uint64_t seed);

// 1 marks the central blob placement region (rows/cols in [side/4, 3*side/4)).
std::vector<uint8_t> blob_region_mask(int side);

}  // namespace lpflow
