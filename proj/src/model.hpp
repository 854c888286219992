#pragma once

// The 12-layer scratch CNN: four conv/pool stages, one batchnorm, a flatten,
// one dropout, and a dense head emitting two logits. The activation map after
// the final conv stage's relu is exposed for Grad-CAM, and the flatten output
// doubles as the feature vector handed to the classical classifiers.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"
#include "ops.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace ts {

struct ConvSpec {
    int filters = 0;
    int kernel = 3;
    int stride = 1;
    int padding = 1;
};

struct ModelSpec {
    int input_size = 32;
    std::array<ConvSpec, 4> convs{{{32, 3, 1, 1}, {64, 3, 1, 1}, {128, 3, 1, 1}, {128, 3, 1, 1}}};
    int pool_window = 2;
    int pool_stride = 2;
    double dropout_rate = 0.3;
    static constexpr int classes = 2;

    // Spatial extent after each of the four conv+pool stages.
    std::array<int, 4> stage_extents() const {
        check_arg(input_size >= 1, "model spec: input size must be positive");
        check_arg(pool_window >= 1 && pool_stride >= 1, "model spec: pool window and stride must be positive");
        check_arg(dropout_rate >= 0.0 && dropout_rate < 1.0,
                  strformat("model spec: dropout rate must be in [0,1), got %g", dropout_rate));
        std::array<int, 4> extents{};
        int s = input_size;
        for (size_t i = 0; i < convs.size(); ++i) {
            const ConvSpec& c = convs[i];
            check_arg(c.filters >= 1, strformat("model spec: conv %zu needs at least one filter", i + 1));
            check_arg(c.kernel >= 1 && c.stride >= 1 && c.padding >= 0,
                      strformat("model spec: conv %zu has invalid geometry", i + 1));
            check_arg(c.kernel <= s + 2 * c.padding,
                      strformat("model spec: conv %zu kernel %d exceeds padded extent %d", i + 1, c.kernel,
                                s + 2 * c.padding));
            s = (s + 2 * c.padding - c.kernel) / c.stride + 1;
            check_arg(s >= 1, strformat("model spec: conv %zu collapses the spatial extent", i + 1));
            check_arg(pool_window <= s,
                      strformat("model spec: pool %zu window %d exceeds extent %d", i + 1, pool_window, s));
            s = (s - pool_window) / pool_stride + 1;
            check_arg(s >= 1, strformat("model spec: pool %zu collapses the spatial extent", i + 1));
            extents[i] = s;
        }
        return extents;
    }

    void validate() const { (void)stage_extents(); }
    int final_extent() const { return stage_extents()[3]; }
    int feature_dim() const {
        const int s = final_extent();
        return convs[3].filters * s * s;
    }
};

template <typename T>
struct Model {
    ModelSpec spec;
    std::array<Tensor<T>, 4> conv_w;
    std::array<Tensor<T>, 4> conv_b;
    Tensor<T> bn_gamma;
    Tensor<T> bn_beta;
    std::vector<T> bn_running_mean;
    std::vector<T> bn_running_var;
    Tensor<T> dense_w;
    Tensor<T> dense_b;

    uint64_t seed = 0;
    int trained_epochs = 0;
    double best_val_accuracy = 0.0;

    static Model initialized(const ModelSpec& spec, uint64_t seed) {
        spec.validate();
        Model m;
        m.spec = spec;
        m.seed = seed;
        Rng rng(derive_seed(seed, 0));
        int in_channels = 1;
        for (size_t i = 0; i < spec.convs.size(); ++i) {
            const ConvSpec& c = spec.convs[i];
            m.conv_w[i] = Tensor<T>::zeros({c.filters, in_channels, c.kernel, c.kernel}, true);
            init_kaiming_uniform(m.conv_w[i], int64_t(in_channels) * c.kernel * c.kernel, rng);
            m.conv_b[i] = Tensor<T>::zeros({c.filters}, true);
            in_channels = c.filters;
        }
        const int f4 = spec.convs[3].filters;
        m.bn_gamma = Tensor<T>::ones({f4}, true);
        m.bn_beta = Tensor<T>::zeros({f4}, true);
        m.bn_running_mean.assign(static_cast<size_t>(f4), T(0));
        m.bn_running_var.assign(static_cast<size_t>(f4), T(1));
        m.dense_w = Tensor<T>::zeros({spec.feature_dim(), ModelSpec::classes}, true);
        init_kaiming_uniform(m.dense_w, spec.feature_dim(), rng);
        m.dense_b = Tensor<T>::zeros({ModelSpec::classes}, true);
        return m;
    }

    // Fixed order; the optimizer and the checkpoint format both rely on it.
    std::vector<Tensor<T>> parameters() {
        std::vector<Tensor<T>> ps;
        for (auto& w : conv_w) ps.push_back(w);
        for (auto& b : conv_b) ps.push_back(b);
        ps.push_back(bn_gamma);
        ps.push_back(bn_beta);
        ps.push_back(dense_w);
        ps.push_back(dense_b);
        return ps;
    }

    Model clone() const {
        Model m = *this;
        for (size_t i = 0; i < conv_w.size(); ++i) {
            m.conv_w[i] = conv_w[i].clone();
            m.conv_b[i] = conv_b[i].clone();
        }
        m.bn_gamma = bn_gamma.clone();
        m.bn_beta = bn_beta.clone();
        m.dense_w = dense_w.clone();
        m.dense_b = dense_b.clone();
        return m;
    }
};

template <typename T>
struct ForwardResult {
    Tensor<T> logits;     // [N,2]
    Tensor<T> last_conv;  // relu output after batchnorm, [N,F4,s,s]; Grad-CAM target
    Tensor<T> features;   // flatten output, [N,feature_dim]
};

template <typename T>
ForwardResult<T> forward(Tape<T>* tape, Model<T>& model, Tensor<T> batch, Mode mode,
                         Rng* dropout_rng = nullptr) {
    const ModelSpec& spec = model.spec;
    check_arg(batch.ndim() == 4 && batch.dim(1) == 1 && batch.dim(2) == spec.input_size &&
                  batch.dim(3) == spec.input_size,
              strformat("forward: batch must be [N,1,%d,%d]", spec.input_size, spec.input_size));
    check_arg(mode == Mode::eval || dropout_rng != nullptr, "forward: train mode needs a dropout rng");

    Tensor<T> x = batch;
    std::optional<Tensor<T>> last_conv;
    for (size_t i = 0; i < spec.convs.size(); ++i) {
        const ConvSpec& c = spec.convs[i];
        x = conv2d(tape, x, model.conv_w[i], model.conv_b[i], c.stride, c.padding);
        if (i == 3) {
            x = batchnorm(tape, x, model.bn_gamma, model.bn_beta, model.bn_running_mean,
                          model.bn_running_var, mode);
        }
        x = relu(tape, x);
        if (i == 3) last_conv = x;
        x = maxpool2d(tape, x, spec.pool_window, spec.pool_stride);
    }

    ForwardResult<T> out;
    out.last_conv = *last_conv;
    out.features = reshape(tape, x, {batch.dim(0), spec.feature_dim()});
    Rng unused(0);
    Tensor<T> dropped = dropout(tape, out.features, spec.dropout_rate, mode,
                                dropout_rng != nullptr ? *dropout_rng : unused);
    out.logits = dense(tape, dropped, model.dense_w, model.dense_b);
    return out;
}

}  // namespace ts
