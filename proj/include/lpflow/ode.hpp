#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpflow/common.hpp"

namespace lpflow {

enum class SolverMethod { euler, midpoint, heun3 };
enum class Direction { forward, reverse };

inline const char* to_string(SolverMethod m) {
    switch (m) {
        case SolverMethod::euler: return "euler";
        case SolverMethod::midpoint: return "midpoint";
        case SolverMethod::heun3: return "heun3";
    }
    return "?";
}

inline SolverMethod parse_solver_method(const std::string& s) {
    if (s == "euler") return SolverMethod::euler;
    if (s == "midpoint") return SolverMethod::midpoint;
    if (s == "heun3") return SolverMethod::heun3;
    throw std::invalid_argument("unknown solver method: " + s);
}

struct SolverConfig {
    SolverMethod method = SolverMethod::midpoint;
    int steps = 1;
    Direction direction = Direction::forward;

    void validate() const {
        require(steps >= 1, "SolverConfig: steps must be >= 1");
    }
};

// Raised when the state turns non-finite mid-integration.
struct integration_error : std::runtime_error {
    int step;
    integration_error(int step_, const std::string& msg)
        : std::runtime_error(msg), step(step_) {}
};

// v(t, state) -> velocity written into `out` (same length as state).
template <typename T>
using VectorField = std::function<void(T t, std::span<const T> state, std::span<T> out)>;

template <typename T>
struct IntegrationResult {
    std::vector<T> end;
    std::vector<std::vector<T>> trajectory;   // populated only when requested; includes x0 and endpoint
};

// Fixed-step explicit Runge-Kutta over v on [0,1], uniform step 1/steps.
// Forward runs t: 0 -> 1; reverse runs t: 1 -> 0 with negated increments.
// Heun3 tableau: c = (0, 1/3, 2/3), a21 = 1/3, a32 = 2/3, b = (1/4, 0, 3/4).
template <typename T>
IntegrationResult<T> integrate(const VectorField<T>& field, std::span<const T> x0,
                               const SolverConfig& cfg, bool record_trajectory = false) {
    cfg.validate();
    require(all_finite(x0), "integrate: x0 must be finite");
    const size_t d = x0.size();
    const T h_mag = T(1) / static_cast<T>(cfg.steps);
    const bool fwd = cfg.direction == Direction::forward;
    const T h = fwd ? h_mag : -h_mag;
    const T t0 = fwd ? T(0) : T(1);

    IntegrationResult<T> res;
    res.end.assign(x0.begin(), x0.end());
    std::vector<T>& y = res.end;
    if (record_trajectory) {
        res.trajectory.push_back(y);
    }

    std::vector<T> k1(d), k2(d), k3(d), tmp(d);
    for (int i = 0; i < cfg.steps; ++i) {
        const T t = t0 + static_cast<T>(i) * h;
        switch (cfg.method) {
            case SolverMethod::euler: {
                field(t, y, k1);
                for (size_t j = 0; j < d; ++j) y[j] += h * k1[j];
                break;
            }
            case SolverMethod::midpoint: {
                field(t, y, k1);
                for (size_t j = 0; j < d; ++j) tmp[j] = y[j] + h * T(0.5) * k1[j];
                field(t + h * T(0.5), tmp, k2);
                for (size_t j = 0; j < d; ++j) y[j] += h * k2[j];
                break;
            }
            case SolverMethod::heun3: {
                const T third = T(1) / T(3);
                field(t, y, k1);
                for (size_t j = 0; j < d; ++j) tmp[j] = y[j] + h * third * k1[j];
                field(t + h * third, tmp, k2);
                for (size_t j = 0; j < d; ++j) tmp[j] = y[j] + h * T(2) * third * k2[j];
                field(t + h * T(2) * third, tmp, k3);
                for (size_t j = 0; j < d; ++j) {
                    y[j] += h * (T(0.25) * k1[j] + T(0.75) * k3[j]);
                }
                break;
            }
        }
        if (!all_finite<T>(y)) {
            throw integration_error(i, "integrate: non-finite state after step " + std::to_string(i));
        }
        if (record_trajectory) {
            res.trajectory.push_back(y);
        }
    }
    return res;
}

// Integrates t: 1 -> 0, recovering the prior point of a data/latent point.
template <typename T>
std::vector<T> reverse_map(const VectorField<T>& field, std::span<const T> x1,
                           int steps, SolverMethod method = SolverMethod::midpoint) {
    SolverConfig cfg{method, steps, Direction::reverse};
    return integrate<T>(field, x1, cfg).end;
}

}  // namespace lpflow
