#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpflow {

// Thrown when a caller breaks an operation's precondition.
inline void require(bool cond, const std::string& msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

template <typename T>
bool all_finite(std::span<const T> v) {
    for (T x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

template <typename T>
bool all_finite(const std::vector<T>& v) {
    return all_finite(std::span<const T>(v));
}

// A set of samples sharing one shape. Rows are flattened vectors of length
// dim == product(shape); data is stored row-major in float64 (data space).
struct SampleSet {
    int count = 0;
    int dim = 0;
    std::vector<int> shape;         // product(shape) == dim
    std::vector<double> data;       // count * dim

    std::span<const double> row(int i) const {
        return std::span<const double>(data).subspan(static_cast<size_t>(i) * dim, dim);
    }
    std::span<double> row(int i) {
        return std::span<double>(data).subspan(static_cast<size_t>(i) * dim, dim);
    }
};

inline SampleSet make_sample_set(int count, std::vector<int> shape) {
    SampleSet s;
    s.count = count;
    s.shape = std::move(shape);
    s.dim = 1;
    for (int e : s.shape) {
        require(e > 0, "shape extents must be positive");
        s.dim *= e;
    }
    require(count >= 0, "sample count must be non-negative");
    s.data.assign(static_cast<size_t>(count) * s.dim, 0.0);
    return s;
}

inline void validate_sample_set(const SampleSet& s, const std::string& what) {
    int p = 1;
    for (int e : s.shape) p *= e;
    require(p == s.dim, what + ": product(shape) != dim");
    require(s.data.size() == static_cast<size_t>(s.count) * s.dim, what + ": data size mismatch");
    require(all_finite(s.data), what + ": non-finite values");
}

}  // namespace lpflow
