#pragma once

#include <cmath>
#include <vector>

#include "tensor.hpp"

namespace ts {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment state for one parameter list. Parameters are matched
// by position, so the list order must not change between steps.
template <typename T>
class Adam {
  public:
    Adam(std::vector<Tensor<T>> params, AdamConfig cfg = {}) : params_(std::move(params)), cfg_(cfg) {
        check_arg(cfg_.lr > 0, "adam: learning rate must be positive");
        check_arg(cfg_.beta1 >= 0 && cfg_.beta1 < 1 && cfg_.beta2 >= 0 && cfg_.beta2 < 1,
                  "adam: betas must be in [0,1)");
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const auto& p : params_) {
            m_.emplace_back(static_cast<size_t>(p.size()), 0.0);
            v_.emplace_back(static_cast<size_t>(p.size()), 0.0);
        }
    }

    int64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

    // One update from the gradients currently stored on the parameters.
    // Parameters with no accumulated gradient are treated as zero-gradient
    // and stay put (the moment decay still runs so step counts stay aligned).
    void step() {
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (size_t pi = 0; pi < params_.size(); ++pi) {
            auto& p = params_[pi];
            auto data = p.mutable_data();
            auto& m = m_[pi];
            auto& v = v_[pi];
            if (p.has_grad()) {
                auto g = p.grad();
                for (size_t i = 0; i < data.size(); ++i) {
                    const double gi = g[i];
                    if (!std::isfinite(gi)) fail_runtime("adam: non-finite gradient");
                    m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
                    v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
                    const double mhat = m[i] / bc1;
                    const double vhat = v[i] / bc2;
                    data[i] -= static_cast<T>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
                }
            } else {
                for (size_t i = 0; i < data.size(); ++i) {
                    m[i] *= cfg_.beta1;
                    v[i] *= cfg_.beta2;
                    const double mhat = m[i] / bc1;
                    const double vhat = v[i] / bc2;
                    data[i] -= static_cast<T>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
                }
            }
        }
    }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

  private:
    std::vector<Tensor<T>> params_;
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    int64_t t_ = 0;
};

}  // namespace ts
