#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpflow/common.hpp"
#include "lpflow/rng.hpp"

namespace lpflow {

// Residual MLP backbone shared by every model in the pipeline:
//   features = [ state | sin/cos time embedding | condition vector ]
//   h   <- Ws features + bs
//   h   <- h + Wb silu(h) + bb          (x blocks)
//   out <- Wo h + bo                    (Wo, bo zero-initialized)
// The zero head makes every freshly constructed model the zero map, so an
// untrained vector field leaves ODE states untouched.
struct MlpConfig {
    int input_dim = 0;
    int cond_dim = 0;
    int output_dim = 0;
    int width = 128;
    int blocks = 3;
    int time_freqs = 16;   // sin/cos pairs; 0 disables the time input entirely

    int time_dim() const { return time_freqs > 0 ? 2 * time_freqs : 0; }
    int feature_dim() const { return input_dim + time_dim() + cond_dim; }

    void validate() const {
        require(input_dim >= 1, "MlpConfig: input_dim must be >= 1");
        require(cond_dim >= 0, "MlpConfig: cond_dim must be >= 0");
        require(output_dim >= 1, "MlpConfig: output_dim must be >= 1");
        require(width >= 1, "MlpConfig: width must be >= 1");
        require(blocks >= 0, "MlpConfig: blocks must be >= 0");
        require(time_freqs >= 0, "MlpConfig: time_freqs must be >= 0");
    }
};

template <typename T>
struct NamedTensor {
    std::string name;
    int rows = 0;
    int cols = 0;           // 0 marks a rank-1 tensor (bias)
    std::vector<T> v;

    size_t size() const { return v.size(); }
};

template <typename T>
struct MlpGrads {
    std::vector<NamedTensor<T>> g;

    void zero() {
        for (auto& t : g) {
            std::fill(t.v.begin(), t.v.end(), T(0));
        }
    }
};

// Activations recorded by a forward pass; consumed by backward.
template <typename T>
struct ForwardTrace {
    bool valid = false;
    int n = 0;
    std::vector<T> X;                   // n x F features
    std::vector<std::vector<T>> H;      // blocks+1 hidden states, n x W each
    std::vector<T> Y;                   // n x out
};

namespace detail {

template <typename T>
inline T silu(T x) {
    const T s = T(1) / (T(1) + std::exp(-x));
    return x * s;
}

template <typename T>
inline T silu_grad(T x) {
    const T s = T(1) / (T(1) + std::exp(-x));
    return s * (T(1) + x * (T(1) - s));
}

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

}  // namespace detail

// Geometrically spaced frequencies from 1 to 1000.
template <typename T>
void time_embedding(T t, int freqs, std::span<T> out) {
    constexpr double kMaxFreq = 1000.0;
    for (int j = 0; j < freqs; ++j) {
        const double e = freqs > 1 ? static_cast<double>(j) / (freqs - 1) : 0.0;
        const double f = std::pow(kMaxFreq, e);
        const double a = f * static_cast<double>(t);
        out[2 * j] = static_cast<T>(std::sin(a));
        out[2 * j + 1] = static_cast<T>(std::cos(a));
    }
}

template <typename T>
class Mlp {
public:
    Mlp() = default;

    Mlp(const MlpConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
        cfg_.validate();
        const int F = cfg_.feature_dim();
        const int W = cfg_.width;
        Rng rng(init_seed);

        auto add_matrix = [&](const std::string& name, int rows, int cols, bool zero) {
            NamedTensor<T> p;
            p.name = name;
            p.rows = rows;
            p.cols = cols;
            p.v.assign(static_cast<size_t>(rows) * cols, T(0));
            if (!zero) {
                const T std_dev = static_cast<T>(std::sqrt(2.0 / cols));
                for (auto& w : p.v) {
                    w = static_cast<T>(rng.gaussian()) * std_dev;
                }
            }
            params_.push_back(std::move(p));
        };
        auto add_bias = [&](const std::string& name, int rows) {
            NamedTensor<T> p;
            p.name = name;
            p.rows = rows;
            p.cols = 0;
            p.v.assign(rows, T(0));
            params_.push_back(std::move(p));
        };

        add_matrix("stem.w", W, F, false);
        add_bias("stem.b", W);
        for (int b = 0; b < cfg_.blocks; ++b) {
            add_matrix("block" + std::to_string(b) + ".w", W, W, false);
            add_bias("block" + std::to_string(b) + ".b", W);
        }
        add_matrix("head.w", cfg_.output_dim, W, true);
        add_bias("head.b", cfg_.output_dim);
    }

    const MlpConfig& config() const { return cfg_; }

    std::vector<NamedTensor<T>>& params() { return params_; }
    const std::vector<NamedTensor<T>>& params() const { return params_; }

    const NamedTensor<T>& param(const std::string& name) const {
        for (const auto& p : params_) {
            if (p.name == name) return p;
        }
        throw std::invalid_argument("Mlp: no parameter named " + name);
    }
    NamedTensor<T>& param(const std::string& name) {
        return const_cast<NamedTensor<T>&>(std::as_const(*this).param(name));
    }

    size_t num_params() const {
        size_t n = 0;
        for (const auto& p : params_) n += p.size();
        return n;
    }

    MlpGrads<T> make_grads() const {
        MlpGrads<T> g;
        for (const auto& p : params_) {
            NamedTensor<T> t;
            t.name = p.name;
            t.rows = p.rows;
            t.cols = p.cols;
            t.v.assign(p.v.size(), T(0));
            g.g.push_back(std::move(t));
        }
        return g;
    }

    // Assemble [state | time embedding | cond] rows for a batch. `ts` may be
    // empty when time_freqs == 0; `conds` may be empty when cond_dim == 0.
    std::vector<T> build_features(std::span<const T> states, int n,
                                  std::span<const T> ts,
                                  std::span<const T> conds) const {
        const int in = cfg_.input_dim;
        const int td = cfg_.time_dim();
        const int cd = cfg_.cond_dim;
        const int F = cfg_.feature_dim();
        require(states.size() == static_cast<size_t>(n) * in, "build_features: state size mismatch");
        if (td > 0) require(ts.size() == static_cast<size_t>(n), "build_features: t count mismatch");
        if (cd > 0) require(conds.size() == static_cast<size_t>(n) * cd, "build_features: cond size mismatch");

        std::vector<T> X(static_cast<size_t>(n) * F);
        for (int i = 0; i < n; ++i) {
            T* row = X.data() + static_cast<size_t>(i) * F;
            std::copy(states.begin() + static_cast<size_t>(i) * in,
                      states.begin() + static_cast<size_t>(i + 1) * in, row);
            if (td > 0) {
                time_embedding(ts[i], cfg_.time_freqs, std::span<T>(row + in, td));
            }
            if (cd > 0) {
                std::copy(conds.begin() + static_cast<size_t>(i) * cd,
                          conds.begin() + static_cast<size_t>(i + 1) * cd, row + in + td);
            }
        }
        return X;
    }

    // Batch forward over pre-built feature rows.
    ForwardTrace<T> forward_features(std::vector<T> X, int n) const {
        using detail::RowMat;
        const int F = cfg_.feature_dim();
        const int W = cfg_.width;
        require(X.size() == static_cast<size_t>(n) * F, "forward: feature size mismatch");

        ForwardTrace<T> tr;
        tr.n = n;
        tr.X = std::move(X);
        tr.H.resize(cfg_.blocks + 1);

        Eigen::Map<const RowMat<T>> Xm(tr.X.data(), n, F);
        Eigen::Map<const RowMat<T>> Ws(params_[0].v.data(), W, F);
        Eigen::Map<const detail::RowVec<T>> bs(params_[1].v.data(), W);

        tr.H[0].resize(static_cast<size_t>(n) * W);
        Eigen::Map<RowMat<T>> H0(tr.H[0].data(), n, W);
        H0.noalias() = Xm * Ws.transpose();
        H0.rowwise() += bs;

        std::vector<T> A(static_cast<size_t>(n) * W);
        for (int b = 0; b < cfg_.blocks; ++b) {
            const auto& wb = params_[2 + 2 * b];
            const auto& bb = params_[3 + 2 * b];
            const std::vector<T>& Hprev = tr.H[b];
            for (size_t i = 0; i < A.size(); ++i) {
                A[i] = detail::silu(Hprev[i]);
            }
            tr.H[b + 1].resize(static_cast<size_t>(n) * W);
            Eigen::Map<const RowMat<T>> Hp(Hprev.data(), n, W);
            Eigen::Map<const RowMat<T>> Am(A.data(), n, W);
            Eigen::Map<const RowMat<T>> Wb(wb.v.data(), W, W);
            Eigen::Map<const detail::RowVec<T>> bbm(bb.v.data(), W);
            Eigen::Map<RowMat<T>> Hn(tr.H[b + 1].data(), n, W);
            Hn.noalias() = Am * Wb.transpose();
            Hn.rowwise() += bbm;
            Hn += Hp;
        }

        const auto& wo = params_[2 + 2 * cfg_.blocks];
        const auto& bo = params_[3 + 2 * cfg_.blocks];
        tr.Y.resize(static_cast<size_t>(n) * cfg_.output_dim);
        Eigen::Map<const RowMat<T>> Hl(tr.H[cfg_.blocks].data(), n, W);
        Eigen::Map<const RowMat<T>> Wo(wo.v.data(), cfg_.output_dim, W);
        Eigen::Map<const detail::RowVec<T>> bom(bo.v.data(), cfg_.output_dim);
        Eigen::Map<RowMat<T>> Ym(tr.Y.data(), n, cfg_.output_dim);
        Ym.noalias() = Hl * Wo.transpose();
        Ym.rowwise() += bom;

        tr.valid = true;
        return tr;
    }

    ForwardTrace<T> forward_batch(std::span<const T> states, int n,
                                  std::span<const T> ts,
                                  std::span<const T> conds) const {
        return forward_features(build_features(states, n, ts, conds), n);
    }

    // Single-sample forward matching the operation contract.
    std::vector<T> forward(std::span<const T> state, T t, std::span<const T> cond) const {
        require(state.size() == static_cast<size_t>(cfg_.input_dim), "forward: state dimension mismatch");
        require(cond.size() == static_cast<size_t>(cfg_.cond_dim), "forward: cond dimension mismatch");
        std::vector<T> ts(cfg_.time_dim() > 0 ? 1 : 0, t);
        auto tr = forward_batch(state, 1, ts, cond);
        return std::move(tr.Y);
    }

    // Accumulates parameter gradients for d(loss)/dY into `grads`; optionally
    // returns d(loss)/dX over the feature rows (needed when gradients must
    // flow through this model's inputs, e.g. decoder -> encoder chains).
    void backward_batch(const ForwardTrace<T>& tr, std::span<const T> dY,
                        MlpGrads<T>& grads, std::vector<T>* dX = nullptr) const {
        using detail::RowMat;
        if (!tr.valid) {
            throw std::logic_error("Mlp::backward called without a recorded forward pass");
        }
        const int n = tr.n;
        const int F = cfg_.feature_dim();
        const int W = cfg_.width;
        const int out = cfg_.output_dim;
        require(dY.size() == static_cast<size_t>(n) * out, "backward: dY size mismatch");
        require(grads.g.size() == params_.size(), "backward: grads layout mismatch");

        Eigen::Map<const RowMat<T>> dYm(dY.data(), n, out);
        Eigen::Map<const RowMat<T>> Hl(tr.H[cfg_.blocks].data(), n, W);

        auto& gwo = grads.g[2 + 2 * cfg_.blocks];
        auto& gbo = grads.g[3 + 2 * cfg_.blocks];
        Eigen::Map<RowMat<T>> gWo(gwo.v.data(), out, W);
        Eigen::Map<detail::RowVec<T>> gbom(gbo.v.data(), out);
        gWo.noalias() += dYm.transpose() * Hl;
        gbom += dYm.colwise().sum();

        const auto& wo = params_[2 + 2 * cfg_.blocks];
        Eigen::Map<const RowMat<T>> Wo(wo.v.data(), out, W);
        std::vector<T> dH(static_cast<size_t>(n) * W);
        Eigen::Map<RowMat<T>> dHm(dH.data(), n, W);
        dHm.noalias() = dYm * Wo;

        std::vector<T> A(static_cast<size_t>(n) * W);
        std::vector<T> dA(static_cast<size_t>(n) * W);
        for (int b = cfg_.blocks - 1; b >= 0; --b) {
            const std::vector<T>& Hprev = tr.H[b];
            for (size_t i = 0; i < A.size(); ++i) {
                A[i] = detail::silu(Hprev[i]);
            }
            const auto& wb = params_[2 + 2 * b];
            auto& gwb = grads.g[2 + 2 * b];
            auto& gbb = grads.g[3 + 2 * b];
            Eigen::Map<const RowMat<T>> Am(A.data(), n, W);
            Eigen::Map<const RowMat<T>> Wb(wb.v.data(), W, W);
            Eigen::Map<RowMat<T>> gWb(gwb.v.data(), W, W);
            Eigen::Map<detail::RowVec<T>> gbbm(gbb.v.data(), W);
            gWb.noalias() += dHm.transpose() * Am;
            gbbm += dHm.colwise().sum();

            Eigen::Map<RowMat<T>> dAm(dA.data(), n, W);
            dAm.noalias() = dHm * Wb;
            for (size_t i = 0; i < dH.size(); ++i) {
                dH[i] += dA[i] * detail::silu_grad(Hprev[i]);
            }
        }

        auto& gws = grads.g[0];
        auto& gbs = grads.g[1];
        Eigen::Map<const RowMat<T>> Xm(tr.X.data(), n, F);
        Eigen::Map<RowMat<T>> gWs(gws.v.data(), W, F);
        Eigen::Map<detail::RowVec<T>> gbsm(gbs.v.data(), W);
        gWs.noalias() += dHm.transpose() * Xm;
        gbsm += dHm.colwise().sum();

        if (dX != nullptr) {
            dX->assign(static_cast<size_t>(n) * F, T(0));
            const auto& ws = params_[0];
            Eigen::Map<const RowMat<T>> Ws(ws.v.data(), W, F);
            Eigen::Map<RowMat<T>> dXm(dX->data(), n, F);
            dXm.noalias() = dHm * Ws;
        }
    }

private:
    MlpConfig cfg_;
    std::vector<NamedTensor<T>> params_;
};

}  // namespace lpflow
