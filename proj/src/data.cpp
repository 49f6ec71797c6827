#include "lpflow/data.hpp"

#include <algorithm>
#include <cmath>

#include "lpflow/rng.hpp"

namespace lpflow {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// zero mean, unit per-axis variance (population convention); degenerate axes
// are only centered
void standardize(SampleSet& s) {
    for (int j = 0; j < s.dim; ++j) {
        double mean = 0.0;
        for (int i = 0; i < s.count; ++i) {
            mean += s.data[static_cast<size_t>(i) * s.dim + j];
        }
        mean /= s.count;
        double var = 0.0;
        for (int i = 0; i < s.count; ++i) {
            const double c = s.data[static_cast<size_t>(i) * s.dim + j] - mean;
            var += c * c;
        }
        var /= s.count;
        const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
        for (int i = 0; i < s.count; ++i) {
            auto& v = s.data[static_cast<size_t>(i) * s.dim + j];
            v = (v - mean) * scale;
        }
    }
}

}  // namespace

Dataset2d parse_dataset_2d(const std::string& name) {
    if (name == "two_moons") return Dataset2d::two_moons;
    if (name == "checkerboard") return Dataset2d::checkerboard;
    if (name == "gauss_mix8") return Dataset2d::gauss_mix8;
    if (name == "spiral") return Dataset2d::spiral;
    throw std::invalid_argument("unknown 2d dataset kind: " + name);
}

const char* to_string(Dataset2d kind) {
    switch (kind) {
        case Dataset2d::two_moons: return "two_moons";
        case Dataset2d::checkerboard: return "checkerboard";
        case Dataset2d::gauss_mix8: return "gauss_mix8";
        case Dataset2d::spiral: return "spiral";
    }
    return "?";
}

SampleSet make_2d(Dataset2d kind, int n, double noise, uint64_t seed) {
    require(n >= 1, "make_2d: n must be >= 1");
    require(noise >= 0.0, "make_2d: noise must be >= 0");
    SampleSet s = make_sample_set(n, {2});
    Rng rng(seed);

    for (int i = 0; i < n; ++i) {
        double px = 0.0;
        double py = 0.0;
        switch (kind) {
            case Dataset2d::two_moons: {
                const double theta = kPi * rng.uniform01();
                if (rng.below(2) == 0) {
                    px = std::cos(theta);
                    py = std::sin(theta);
                } else {
                    px = 1.0 - std::cos(theta);
                    py = 0.5 - std::sin(theta);
                }
                px += noise * rng.gaussian();
                py += noise * rng.gaussian();
                break;
            }
            case Dataset2d::checkerboard: {
                // 4x4 grid over [-2,2]^2, cells with even (col+row) parity
                const int col = static_cast<int>(rng.below(4));
                const int row = 2 * static_cast<int>(rng.below(2)) + (col & 1);
                px = -2.0 + col + rng.uniform01();
                py = -2.0 + row + rng.uniform01();
                px += noise * rng.gaussian();
                py += noise * rng.gaussian();
                break;
            }
            case Dataset2d::gauss_mix8: {
                const int m = static_cast<int>(rng.below(8));
                const double ang = 2.0 * kPi * m / 8.0;
                px = 2.0 * std::cos(ang) + noise * rng.gaussian();
                py = 2.0 * std::sin(ang) + noise * rng.gaussian();
                break;
            }
            case Dataset2d::spiral: {
                const double theta = 3.0 * kPi * std::sqrt(rng.uniform01());
                const double r = 2.0 * theta / (3.0 * kPi);
                px = r * std::cos(theta) + noise * rng.gaussian();
                py = r * std::sin(theta) + noise * rng.gaussian();
                break;
            }
        }
        s.data[static_cast<size_t>(i) * 2] = px;
        s.data[static_cast<size_t>(i) * 2 + 1] = py;
    }
    standardize(s);
    return s;
}

std::vector<uint8_t> blob_region_mask(int side) {
    require(side >= 2 && side <= 16, "blob_region_mask: side outside [2,16]");
    std::vector<uint8_t> mask(static_cast<size_t>(side) * side, 0);
    const int lo = side / 4;
    const int hi = (3 * side) / 4;
    for (int r = lo; r < hi; ++r) {
        for (int c = lo; c < hi; ++c) {
            mask[static_cast<size_t>(r) * side + c] = 1;
        }
    }
    return mask;
}

SampleSet make_blob_images(int n, int side, uint64_t seed) {
    require(n >= 1, "make_blob_images: n must be >= 1");
    require(side >= 2 && side <= 16, "make_blob_images: side outside [2,16]");
    SampleSet s = make_sample_set(n, {side, side});
    Rng rng(seed);
    const double denom = side > 1 ? side - 1.0 : 1.0;

    for (int i = 0; i < n; ++i) {
        const double a = -0.2 + 0.4 * rng.uniform01();
        const double gr = -0.3 + 0.6 * rng.uniform01();
        const double gc = -0.3 + 0.6 * rng.uniform01();
        const double cr = side * (0.25 + 0.5 * rng.uniform01());
        const double cc = side * (0.25 + 0.5 * rng.uniform01());
        const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
        const double amp = sign * (0.5 + 0.5 * rng.uniform01());
        const double radius = side * (0.08 + 0.10 * rng.uniform01());

        double* img = s.data.data() + static_cast<size_t>(i) * s.dim;
        for (int r = 0; r < side; ++r) {
            for (int c = 0; c < side; ++c) {
                const double grad = a + gr * (r / denom) + gc * (c / denom);
                const double dr = r + 0.5 - cr;
                const double dc = c + 0.5 - cc;
                const double blob = amp * std::exp(-(dr * dr + dc * dc) / (2.0 * radius * radius));
                img[r * side + c] = std::clamp(grad + blob, -1.0, 1.0);
            }
        }
    }
    return s;
}

}  // namespace lpflow
