#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gemm.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace ts {

enum class Mode { train, eval };
enum class ConvAlgo { direct, im2col };

namespace detail {

template <typename T>
inline bool grad_wanted(Tape<T>* tape, std::initializer_list<const Tensor<T>*> ins) {
    if (!tape) return false;
    for (const auto* t : ins)
        if (t->requires_grad()) return true;
    return false;
}

struct ConvDims {
    int n, c, h, w, f, kh, kw, oh, ow;
};

template <typename T>
inline ConvDims conv_dims(Tensor<T> x, Tensor<T> kernels, Tensor<T> bias,
                          int stride, int padding) {
    check_arg(x.ndim() == 4, "conv2d: input must be [N,C,H,W], got " + shape_str(x.shape()));
    check_arg(kernels.ndim() == 4, "conv2d: kernels must be [F,C,kh,kw], got " + shape_str(kernels.shape()));
    check_arg(stride >= 1, "conv2d: stride must be positive");
    check_arg(padding >= 0, "conv2d: padding must be nonnegative");
    ConvDims d;
    d.n = x.dim(0), d.c = x.dim(1), d.h = x.dim(2), d.w = x.dim(3);
    d.f = kernels.dim(0), d.kh = kernels.dim(2), d.kw = kernels.dim(3);
    check_arg(kernels.dim(1) == d.c, strformat("conv2d: channel mismatch, input has %d, kernels expect %d",
                                               d.c, kernels.dim(1)));
    check_arg(bias.ndim() == 1 && bias.dim(0) == d.f, "conv2d: bias must be [F]");
    check_arg(d.kh <= d.h + 2 * padding && d.kw <= d.w + 2 * padding,
              strformat("conv2d: kernel %dx%d exceeds padded input %dx%d", d.kh, d.kw,
                        d.h + 2 * padding, d.w + 2 * padding));
    d.oh = (d.h + 2 * padding - d.kh) / stride + 1;
    d.ow = (d.w + 2 * padding - d.kw) / stride + 1;
    return d;
}

// col[(c*kh+i)*kw+j, oh*OW+ow] = x(n,c,ih,iw), zero where the window hangs
// over the padding. Row order matches the flattened kernel layout so the
// kernel matrix multiplies col directly.
template <typename T>
inline void im2col(const T* x, const ConvDims& d, int stride, int padding, T* col) {
    const int64_t ohw = static_cast<int64_t>(d.oh) * d.ow;
    for (int c = 0; c < d.c; ++c) {
        const T* xc = x + static_cast<int64_t>(c) * d.h * d.w;
        for (int i = 0; i < d.kh; ++i) {
            for (int j = 0; j < d.kw; ++j) {
                T* row = col + ((static_cast<int64_t>(c) * d.kh + i) * d.kw + j) * ohw;
                for (int oh = 0; oh < d.oh; ++oh) {
                    const int ih = oh * stride - padding + i;
                    T* dst = row + static_cast<int64_t>(oh) * d.ow;
                    if (ih < 0 || ih >= d.h) {
                        std::fill(dst, dst + d.ow, T(0));
                        continue;
                    }
                    const T* src = xc + static_cast<int64_t>(ih) * d.w;
                    for (int ow = 0; ow < d.ow; ++ow) {
                        const int iw = ow * stride - padding + j;
                        dst[ow] = (iw >= 0 && iw < d.w) ? src[iw] : T(0);
                    }
                }
            }
        }
    }
}

template <typename T>
inline void col2im_acc(const T* col, const ConvDims& d, int stride, int padding, T* dx) {
    const int64_t ohw = static_cast<int64_t>(d.oh) * d.ow;
    for (int c = 0; c < d.c; ++c) {
        T* xc = dx + static_cast<int64_t>(c) * d.h * d.w;
        for (int i = 0; i < d.kh; ++i) {
            for (int j = 0; j < d.kw; ++j) {
                const T* row = col + ((static_cast<int64_t>(c) * d.kh + i) * d.kw + j) * ohw;
                for (int oh = 0; oh < d.oh; ++oh) {
                    const int ih = oh * stride - padding + i;
                    if (ih < 0 || ih >= d.h) continue;
                    const T* src = row + static_cast<int64_t>(oh) * d.ow;
                    T* dst = xc + static_cast<int64_t>(ih) * d.w;
                    for (int ow = 0; ow < d.ow; ++ow) {
                        const int iw = ow * stride - padding + j;
                        if (iw >= 0 && iw < d.w) dst[iw] += src[ow];
                    }
                }
            }
        }
    }
}

}  // namespace detail

// Cross-correlation (no kernel flip). The direct loop nest is the reference;
// im2col+matmul is the fast path and both are required to agree.
template <typename T>
Tensor<T> conv2d(Tape<T>* tape, Tensor<T> x, Tensor<T> kernels, Tensor<T> bias,
                 int stride = 1, int padding = 0, ConvAlgo algo = ConvAlgo::im2col) {
    using detail::ConvDims;
    const ConvDims d = detail::conv_dims(x, kernels, bias, stride, padding);
    Tensor<T> out({d.n, d.f, d.oh, d.ow}, detail::grad_wanted(tape, {&x, &kernels, &bias}));

    const T* xp = x.data().data();
    const T* wp = kernels.data().data();
    const T* bp = bias.data().data();
    T* op = out.mutable_data().data();
    const int64_t in_stride = static_cast<int64_t>(d.c) * d.h * d.w;
    const int64_t out_stride = static_cast<int64_t>(d.f) * d.oh * d.ow;
    const int64_t ohw = static_cast<int64_t>(d.oh) * d.ow;
    const int64_t k = static_cast<int64_t>(d.c) * d.kh * d.kw;

    if (algo == ConvAlgo::im2col) {
        std::vector<T> col(static_cast<size_t>(k * ohw));
        for (int n = 0; n < d.n; ++n) {
            detail::im2col(xp + n * in_stride, d, stride, padding, col.data());
            T* on = op + n * out_stride;
            for (int f = 0; f < d.f; ++f) std::fill(on + f * ohw, on + (f + 1) * ohw, bp[f]);
            gemm_acc(d.f, k, ohw, wp, col.data(), on);
        }
    } else {
        for (int n = 0; n < d.n; ++n) {
            for (int f = 0; f < d.f; ++f) {
                for (int oh = 0; oh < d.oh; ++oh) {
                    for (int ow = 0; ow < d.ow; ++ow) {
                        T acc = bp[f];
                        for (int c = 0; c < d.c; ++c) {
                            for (int i = 0; i < d.kh; ++i) {
                                const int ih = oh * stride - padding + i;
                                if (ih < 0 || ih >= d.h) continue;
                                for (int j = 0; j < d.kw; ++j) {
                                    const int iw = ow * stride - padding + j;
                                    if (iw < 0 || iw >= d.w) continue;
                                    acc += xp[(n * static_cast<int64_t>(d.c) + c) * d.h * d.w + ih * static_cast<int64_t>(d.w) + iw] *
                                           wp[((f * static_cast<int64_t>(d.c) + c) * d.kh + i) * d.kw + j];
                                }
                            }
                        }
                        op[(n * static_cast<int64_t>(d.f) + f) * ohw + oh * static_cast<int64_t>(d.ow) + ow] = acc;
                    }
                }
            }
        }
    }
    check_finite(out, "conv2d");

    if (tape && out.requires_grad()) {
        tape->record("conv2d", out.id(), [x, kernels, bias, out, d, stride, padding, algo]() mutable {
            if (!out.has_grad()) return;
            const T* go = out.grad().data();
            const int64_t in_stride = static_cast<int64_t>(d.c) * d.h * d.w;
            const int64_t out_stride = static_cast<int64_t>(d.f) * d.oh * d.ow;
            const int64_t ohw = static_cast<int64_t>(d.oh) * d.ow;
            const int64_t k = static_cast<int64_t>(d.c) * d.kh * d.kw;
            const T* xp = x.data().data();
            const T* wp = kernels.data().data();

            if (bias.requires_grad()) {
                T* db = bias.grad_mut().data();
                for (int n = 0; n < d.n; ++n)
                    for (int f = 0; f < d.f; ++f) {
                        const T* row = go + n * out_stride + f * ohw;
                        T acc = T(0);
                        for (int64_t t = 0; t < ohw; ++t) acc += row[t];
                        db[f] += acc;
                    }
            }
            if (algo == ConvAlgo::im2col) {
                std::vector<T> col(static_cast<size_t>(k * ohw));
                std::vector<T> dcol;
                T* dw = kernels.requires_grad() ? kernels.grad_mut().data() : nullptr;
                T* dx = x.requires_grad() ? x.grad_mut().data() : nullptr;
                if (dx) dcol.assign(static_cast<size_t>(k * ohw), T(0));
                for (int n = 0; n < d.n; ++n) {
                    const T* gon = go + n * out_stride;
                    if (dw) {
                        detail::im2col(xp + n * in_stride, d, stride, padding, col.data());
                        gemm_a_bt_acc(d.f, ohw, k, gon, col.data(), dw);
                    }
                    if (dx) {
                        std::fill(dcol.begin(), dcol.end(), T(0));
                        gemm_at_b_acc(k, d.f, ohw, wp, gon, dcol.data());
                        detail::col2im_acc(dcol.data(), d, stride, padding, dx + n * in_stride);
                    }
                }
            } else {
                T* dw = kernels.requires_grad() ? kernels.grad_mut().data() : nullptr;
                T* dx = x.requires_grad() ? x.grad_mut().data() : nullptr;
                for (int n = 0; n < d.n; ++n) {
                    for (int f = 0; f < d.f; ++f) {
                        for (int oh = 0; oh < d.oh; ++oh) {
                            for (int ow = 0; ow < d.ow; ++ow) {
                                const T g = go[(n * static_cast<int64_t>(d.f) + f) * ohw + oh * static_cast<int64_t>(d.ow) + ow];
                                for (int c = 0; c < d.c; ++c) {
                                    for (int i = 0; i < d.kh; ++i) {
                                        const int ih = oh * stride - padding + i;
                                        if (ih < 0 || ih >= d.h) continue;
                                        for (int j = 0; j < d.kw; ++j) {
                                            const int iw = ow * stride - padding + j;
                                            if (iw < 0 || iw >= d.w) continue;
                                            const int64_t xi = (n * static_cast<int64_t>(d.c) + c) * d.h * d.w + ih * static_cast<int64_t>(d.w) + iw;
                                            const int64_t wi = ((f * static_cast<int64_t>(d.c) + c) * d.kh + i) * d.kw + j;
                                            if (dw) dw[wi] += g * xp[xi];
                                            if (dx) dx[xi] += g * wp[wi];
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        });
    }
    return out;
}

// Max over each window; gradient routes to the argmax only, first element in
// row-major window order on ties.
template <typename T>
Tensor<T> maxpool2d(Tape<T>* tape, Tensor<T> x, int window, int stride) {
    check_arg(x.ndim() == 4, "maxpool2d: input must be [N,C,H,W]");
    check_arg(window >= 1 && stride >= 1, "maxpool2d: window and stride must be positive");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    check_arg(window <= h && window <= w,
              strformat("maxpool2d: window %d larger than spatial extent %dx%d", window, h, w));
    const int oh = (h - window) / stride + 1;
    const int ow = (w - window) / stride + 1;

    Tensor<T> out({n, c, oh, ow}, detail::grad_wanted(tape, {&x}));
    auto argmax = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(out.size()));
    const T* xp = x.data().data();
    T* op = out.mutable_data().data();
    int64_t oi = 0;
    for (int in = 0; in < n; ++in) {
        for (int ic = 0; ic < c; ++ic) {
            const T* plane = xp + (static_cast<int64_t>(in) * c + ic) * h * w;
            const int64_t plane_off = (static_cast<int64_t>(in) * c + ic) * h * w;
            for (int ph = 0; ph < oh; ++ph) {
                for (int pw = 0; pw < ow; ++pw, ++oi) {
                    T best = plane[(ph * stride) * w + pw * stride];
                    int64_t best_idx = (ph * stride) * static_cast<int64_t>(w) + pw * stride;
                    for (int i = 0; i < window; ++i) {
                        for (int j = 0; j < window; ++j) {
                            const int64_t idx = (ph * stride + i) * static_cast<int64_t>(w) + pw * stride + j;
                            if (plane[idx] > best) {
                                best = plane[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    op[oi] = best;
                    (*argmax)[static_cast<size_t>(oi)] = plane_off + best_idx;
                }
            }
        }
    }
    check_finite(out, "maxpool2d");

    if (tape && out.requires_grad()) {
        tape->record("maxpool2d", out.id(), [x, out, argmax]() mutable {
            if (!out.has_grad()) return;
            auto go = out.grad();
            auto dx = x.grad_mut();
            for (size_t i = 0; i < go.size(); ++i) dx[static_cast<size_t>((*argmax)[i])] += go[i];
        });
    }
    return out;
}

// max(0,x); subgradient 0 at x==0
template <typename T>
Tensor<T> relu(Tape<T>* tape, Tensor<T> x) {
    Tensor<T> out(x.shape(), detail::grad_wanted(tape, {&x}));
    auto xd = x.data();
    auto od = out.mutable_data();
    for (size_t i = 0; i < od.size(); ++i) od[i] = xd[i] > T(0) ? xd[i] : T(0);
    check_finite(out, "relu");
    if (tape && out.requires_grad()) {
        tape->record("relu", out.id(), [x, out]() mutable {
            if (!out.has_grad()) return;
            auto go = out.grad();
            auto xd = x.data();
            auto dx = x.grad_mut();
            for (size_t i = 0; i < go.size(); ++i)
                if (xd[i] > T(0)) dx[i] += go[i];
        });
    }
    return out;
}

// y = x*W + b for x:[N,D], W:[D,K], b:[K]
template <typename T>
Tensor<T> dense(Tape<T>* tape, Tensor<T> x, Tensor<T> weights, Tensor<T> bias) {
    check_arg(x.ndim() == 2, "dense: input must be [N,D], got " + shape_str(x.shape()));
    check_arg(weights.ndim() == 2, "dense: weights must be [D,K]");
    check_arg(x.dim(1) == weights.dim(0),
              strformat("dense: inner dimensions disagree (%d vs %d)", x.dim(1), weights.dim(0)));
    const int n = x.dim(0), dI = x.dim(1), k = weights.dim(1);
    check_arg(bias.ndim() == 1 && bias.dim(0) == k, "dense: bias must be [K]");

    Tensor<T> out({n, k}, detail::grad_wanted(tape, {&x, &weights, &bias}));
    T* op = out.mutable_data().data();
    const T* bp = bias.data().data();
    for (int i = 0; i < n; ++i) std::copy(bp, bp + k, op + static_cast<int64_t>(i) * k);
    gemm_acc(n, dI, k, x.data().data(), weights.data().data(), op);
    check_finite(out, "dense");

    if (tape && out.requires_grad()) {
        tape->record("dense", out.id(), [x, weights, bias, out, n, dI, k]() mutable {
            if (!out.has_grad()) return;
            const T* go = out.grad().data();
            if (x.requires_grad())
                gemm_a_bt_acc(n, k, dI, go, weights.data().data(), x.grad_mut().data());
            if (weights.requires_grad())
                gemm_at_b_acc(dI, n, k, x.data().data(), go, weights.grad_mut().data());
            if (bias.requires_grad()) {
                T* db = bias.grad_mut().data();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < k; ++j) db[j] += go[static_cast<int64_t>(i) * k + j];
            }
        });
    }
    return out;
}

// Per-channel normalization over [N,H,W]. Train mode normalizes by batch
// statistics and folds them into the running estimates; eval mode uses the
// running estimates. running_var keeps the unbiased estimate.
template <typename T>
Tensor<T> batchnorm(Tape<T>* tape, Tensor<T> x, Tensor<T> gamma, Tensor<T> beta,
                    std::vector<T>& running_mean, std::vector<T>& running_var, Mode mode,
                    double momentum = 0.1, double eps = 1e-5) {
    check_arg(x.ndim() == 4, "batchnorm: input must be [N,C,H,W]");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    check_arg(gamma.ndim() == 1 && gamma.dim(0) == c, "batchnorm: gamma must be [C]");
    check_arg(beta.ndim() == 1 && beta.dim(0) == c, "batchnorm: beta must be [C]");
    check_arg(static_cast<int>(running_mean.size()) == c && static_cast<int>(running_var.size()) == c,
              "batchnorm: running stats must be [C]");
    if (mode == Mode::train) check_arg(n >= 2, "batchnorm: train mode needs a batch of at least 2");

    const int64_t m = static_cast<int64_t>(n) * h * w;  // elements per channel
    const int64_t hw = static_cast<int64_t>(h) * w;
    Tensor<T> out(x.shape(), detail::grad_wanted(tape, {&x, &gamma, &beta}));
    auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(x.size()));
    auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(c));

    const T* xp = x.data().data();
    const T* gp = gamma.data().data();
    const T* bp = beta.data().data();
    T* op = out.mutable_data().data();

    for (int ic = 0; ic < c; ++ic) {
        double mean, var;
        if (mode == Mode::train) {
            double sum = 0, sq = 0;
            for (int in = 0; in < n; ++in) {
                const T* p = xp + (static_cast<int64_t>(in) * c + ic) * hw;
                for (int64_t t = 0; t < hw; ++t) {
                    sum += p[t];
                    sq += static_cast<double>(p[t]) * p[t];
                }
            }
            mean = sum / static_cast<double>(m);
            var = sq / static_cast<double>(m) - mean * mean;
            if (var < 0) var = 0;  // guard fp cancellation
            const double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1) : var;
            running_mean[ic] = static_cast<T>((1.0 - momentum) * running_mean[ic] + momentum * mean);
            running_var[ic] = static_cast<T>((1.0 - momentum) * running_var[ic] + momentum * unbiased);
        } else {
            mean = running_mean[ic];
            var = running_var[ic];
        }
        const T istd = static_cast<T>(1.0 / std::sqrt(var + eps));
        (*inv_std)[static_cast<size_t>(ic)] = istd;
        for (int in = 0; in < n; ++in) {
            const int64_t base = (static_cast<int64_t>(in) * c + ic) * hw;
            for (int64_t t = 0; t < hw; ++t) {
                const T xh = (xp[base + t] - static_cast<T>(mean)) * istd;
                (*xhat)[static_cast<size_t>(base + t)] = xh;
                op[base + t] = gp[ic] * xh + bp[ic];
            }
        }
    }
    check_finite(out, "batchnorm");

    if (tape && out.requires_grad()) {
        const bool train = mode == Mode::train;
        tape->record("batchnorm", out.id(), [x, gamma, beta, out, xhat, inv_std, n, c, hw, m, train]() mutable {
            if (!out.has_grad()) return;
            const T* go = out.grad().data();
            const T* gp = gamma.data().data();
            for (int ic = 0; ic < c; ++ic) {
                double sum_dy = 0, sum_dy_xhat = 0;
                for (int in = 0; in < n; ++in) {
                    const int64_t base = (static_cast<int64_t>(in) * c + ic) * hw;
                    for (int64_t t = 0; t < hw; ++t) {
                        sum_dy += go[base + t];
                        sum_dy_xhat += static_cast<double>(go[base + t]) * (*xhat)[static_cast<size_t>(base + t)];
                    }
                }
                if (gamma.requires_grad()) gamma.grad_mut()[static_cast<size_t>(ic)] += static_cast<T>(sum_dy_xhat);
                if (beta.requires_grad()) beta.grad_mut()[static_cast<size_t>(ic)] += static_cast<T>(sum_dy);
                if (x.requires_grad()) {
                    T* dx = x.grad_mut().data();
                    const T istd = (*inv_std)[static_cast<size_t>(ic)];
                    const double g = gp[ic];
                    for (int in = 0; in < n; ++in) {
                        const int64_t base = (static_cast<int64_t>(in) * c + ic) * hw;
                        for (int64_t t = 0; t < hw; ++t) {
                            if (train) {
                                const double dxhat = g * go[base + t];
                                dx[base + t] += static_cast<T>(istd * (dxhat - sum_dy * g / static_cast<double>(m) -
                                                                       (*xhat)[static_cast<size_t>(base + t)] *
                                                                           sum_dy_xhat * g / static_cast<double>(m)));
                            } else {
                                dx[base + t] += static_cast<T>(g * istd * go[base + t]);
                            }
                        }
                    }
                }
            }
        });
    }
    return out;
}

// Inverted dropout: survivors are scaled by 1/(1-rate) so eval is identity.
template <typename T>
Tensor<T> dropout(Tape<T>* tape, Tensor<T> x, double rate, Mode mode, Rng& rng) {
    check_arg(rate >= 0.0 && rate < 1.0, strformat("dropout: rate must be in [0,1), got %g", rate));
    if (mode == Mode::eval || rate == 0.0) {
        Tensor<T> out(x.shape(), detail::grad_wanted(tape, {&x}));
        auto xd = x.data();
        std::copy(xd.begin(), xd.end(), out.mutable_data().begin());
        if (tape && out.requires_grad()) {
            tape->record("dropout", out.id(), [x, out]() mutable {
                if (!out.has_grad()) return;
                x.accumulate_grad(out.grad());
            });
        }
        return out;
    }
    Tensor<T> out(x.shape(), detail::grad_wanted(tape, {&x}));
    auto mask = std::make_shared<std::vector<uint8_t>>(static_cast<size_t>(x.size()));
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    auto xd = x.data();
    auto od = out.mutable_data();
    for (size_t i = 0; i < od.size(); ++i) {
        const bool keep = rng.uniform() >= rate;
        (*mask)[i] = keep;
        od[i] = keep ? xd[i] * scale : T(0);
    }
    check_finite(out, "dropout");
    if (tape && out.requires_grad()) {
        tape->record("dropout", out.id(), [x, out, mask, scale]() mutable {
            if (!out.has_grad()) return;
            auto go = out.grad();
            auto dx = x.grad_mut();
            for (size_t i = 0; i < go.size(); ++i)
                if ((*mask)[i]) dx[i] += go[i] * scale;
        });
    }
    return out;
}

// [N,C,H,W] -> [N,C] spatial mean
template <typename T>
Tensor<T> global_average_pool(Tape<T>* tape, Tensor<T> x) {
    check_arg(x.ndim() == 4, "global_average_pool: input must be [N,C,H,W]");
    const int n = x.dim(0), c = x.dim(1);
    const int64_t hw = static_cast<int64_t>(x.dim(2)) * x.dim(3);
    Tensor<T> out({n, c}, detail::grad_wanted(tape, {&x}));
    const T* xp = x.data().data();
    T* op = out.mutable_data().data();
    for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i) {
        T acc = T(0);
        for (int64_t t = 0; t < hw; ++t) acc += xp[i * hw + t];
        op[i] = acc / static_cast<T>(hw);
    }
    check_finite(out, "global_average_pool");
    if (tape && out.requires_grad()) {
        tape->record("global_average_pool", out.id(), [x, out, n, c, hw]() mutable {
            if (!out.has_grad()) return;
            const T* go = out.grad().data();
            T* dx = x.grad_mut().data();
            for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i) {
                const T g = go[i] / static_cast<T>(hw);
                for (int64_t t = 0; t < hw; ++t) dx[i * hw + t] += g;
            }
        });
    }
    return out;
}

// Copies into a new shape with the same element count; backward copies back.
template <typename T>
Tensor<T> reshape(Tape<T>* tape, Tensor<T> x, Shape shape) {
    check_arg(numel(shape) == x.size(),
              "reshape: element count mismatch " + shape_str(x.shape()) + " -> " + shape_str(shape));
    Tensor<T> out(std::move(shape), detail::grad_wanted(tape, {&x}));
    auto xd = x.data();
    std::copy(xd.begin(), xd.end(), out.mutable_data().begin());
    if (tape && out.requires_grad()) {
        tape->record("reshape", out.id(), [x, out]() mutable {
            if (!out.has_grad()) return;
            x.accumulate_grad(out.grad());
        });
    }
    return out;
}

template <typename T>
Tensor<T> add(Tape<T>* tape, Tensor<T> a, Tensor<T> b) {
    check_arg(a.shape() == b.shape(), "add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    Tensor<T> out(a.shape(), detail::grad_wanted(tape, {&a, &b}));
    auto ad = a.data();
    auto bd = b.data();
    auto od = out.mutable_data();
    for (size_t i = 0; i < od.size(); ++i) od[i] = ad[i] + bd[i];
    check_finite(out, "add");
    if (tape && out.requires_grad()) {
        tape->record("add", out.id(), [a, b, out]() mutable {
            if (!out.has_grad()) return;
            if (a.requires_grad()) a.accumulate_grad(out.grad());
            if (b.requires_grad()) b.accumulate_grad(out.grad());
        });
    }
    return out;
}

template <typename T>
Tensor<T> sum(Tape<T>* tape, Tensor<T> x) {
    Tensor<T> out({1}, detail::grad_wanted(tape, {&x}));
    T acc = T(0);
    for (T v : x.data()) acc += v;
    out.mutable_data()[0] = acc;
    check_finite(out, "sum");
    if (tape && out.requires_grad()) {
        tape->record("sum", out.id(), [x, out]() mutable {
            if (!out.has_grad()) return;
            const T g = out.grad()[0];
            auto dx = x.grad_mut();
            for (auto& v : dx) v += g;
        });
    }
    return out;
}

// Scalar view of one element; the gradient seed for localization maps.
template <typename T>
Tensor<T> pick(Tape<T>* tape, Tensor<T> x, int64_t flat_index) {
    check_arg(flat_index >= 0 && flat_index < x.size(), "pick: index out of range");
    Tensor<T> out({1}, detail::grad_wanted(tape, {&x}));
    out.mutable_data()[0] = x.data()[static_cast<size_t>(flat_index)];
    if (tape && out.requires_grad()) {
        tape->record("pick", out.id(), [x, out, flat_index]() mutable {
            if (!out.has_grad()) return;
            x.grad_mut()[static_cast<size_t>(flat_index)] += out.grad()[0];
        });
    }
    return out;
}

// Row-wise softmax, max-subtracted. No tape involvement; used for
// predictions and reporting.
template <typename T>
Tensor<T> softmax_rows(Tensor<T> logits) {
    check_arg(logits.ndim() == 2, "softmax_rows: input must be [N,K]");
    const int n = logits.dim(0), k = logits.dim(1);
    Tensor<T> out(logits.shape());
    const T* lp = logits.data().data();
    T* op = out.mutable_data().data();
    for (int i = 0; i < n; ++i) {
        const T* row = lp + static_cast<int64_t>(i) * k;
        T* orow = op + static_cast<int64_t>(i) * k;
        T mx = row[0];
        for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        T z = T(0);
        for (int j = 0; j < k; ++j) {
            orow[j] = std::exp(row[j] - mx);
            z += orow[j];
        }
        for (int j = 0; j < k; ++j) orow[j] /= z;
    }
    return out;
}

// Mean over the batch of -log softmax(logits)[label]. Gradient is
// (softmax - onehot)/N.
template <typename T>
Tensor<T> softmax_cross_entropy(Tape<T>* tape, Tensor<T> logits, const std::vector<int>& labels) {
    check_arg(logits.ndim() == 2, "softmax_cross_entropy: logits must be [N,K]");
    const int n = logits.dim(0), k = logits.dim(1);
    check_arg(static_cast<int>(labels.size()) == n,
              strformat("softmax_cross_entropy: %zu labels for %d rows", labels.size(), n));
    for (int label : labels)
        check_arg(label >= 0 && label < k, strformat("softmax_cross_entropy: label %d outside [0,%d)", label, k));

    auto probs = std::make_shared<Tensor<T>>(softmax_rows(logits));
    const T* pp = probs->data().data();
    const T* lp = logits.data().data();
    double loss = 0;
    for (int i = 0; i < n; ++i) {
        // recompute log softmax from shifted logits to avoid log(exp(..)) round trip
        const T* row = lp + static_cast<int64_t>(i) * k;
        T mx = row[0];
        for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        double z = 0;
        for (int j = 0; j < k; ++j) z += std::exp(static_cast<double>(row[j] - mx));
        loss += -(static_cast<double>(row[labels[static_cast<size_t>(i)]] - mx) - std::log(z));
    }
    Tensor<T> out({1}, detail::grad_wanted(tape, {&logits}));
    out.mutable_data()[0] = static_cast<T>(loss / n);
    check_finite(out, "softmax_cross_entropy");

    if (tape && out.requires_grad()) {
        auto labels_copy = std::make_shared<std::vector<int>>(labels);
        tape->record("softmax_cross_entropy", out.id(), [logits, out, probs, labels_copy, n, k]() mutable {
            if (!out.has_grad()) return;
            const T g = out.grad()[0];
            const T* pp = probs->data().data();
            T* dl = logits.grad_mut().data();
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < k; ++j) {
                    T v = pp[static_cast<int64_t>(i) * k + j];
                    if (j == (*labels_copy)[static_cast<size_t>(i)]) v -= T(1);
                    dl[static_cast<int64_t>(i) * k + j] += g * v / static_cast<T>(n);
                }
            }
        });
    }
    (void)pp;
    return out;
}

// Kaiming-uniform fan-in initialization (ReLU gain): U(-b, b), b = sqrt(6/fan_in)
template <typename T>
void init_kaiming_uniform(Tensor<T>& t, int64_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : t.mutable_data()) v = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
int argmax_row(Tensor<T> t, int row) {
    const int k = t.dim(1);
    const T* p = t.data().data() + static_cast<int64_t>(row) * k;
    int best = 0;
    for (int j = 1; j < k; ++j)
        if (p[j] > p[best]) best = j;
    return best;
}

}  // namespace ts
