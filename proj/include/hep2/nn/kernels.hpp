#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hep2/error.hpp"
#include "hep2/tensor.hpp"

// Layer kernels, templated on the scalar type: float instantiations train,
// double instantiations back the finite-difference and oracle checks.
//
// Parallelization rule: OpenMP loops only over outputs that are computed
// independently, with every per-element reduction running in a fixed serial
// order. Results are therefore bit-identical for any thread count.
namespace hep2::nn {

template <class T>
struct ConvGrads {
    Tensor4T<T> input;
    Tensor4T<T> weights;
    std::vector<T> bias;
};

template <class T>
struct PoolResult {
    Tensor4T<T> out;
    std::vector<std::int32_t> argmax;  // flat index into the input, per output element
};

template <class T>
struct SoftmaxResult {
    T loss;
    Tensor4T<T> probs;
};

inline int conv_out_dim(int in, int kernel, int stride, int padding) {
    const int span = in + 2 * padding - kernel;
    if (span < 0 || span % stride != 0) return -1;
    return span / stride + 1;
}

inline int pool_out_dim(int in, int window, int stride) {
    const int span = in - window;
    if (span < 0 || span % stride != 0) return -1;
    return span / stride + 1;
}

// Cross-correlation with per-output-channel bias.
// input (n, ic, h, w), weights (oc, ic, kh, kw) -> (n, oc, oh, ow)
template <class T>
Tensor4T<T> conv_forward(const Tensor4T<T>& in, const Tensor4T<T>& w,
                         std::span<const T> bias, int stride, int padding) {
    if (w.c() != in.c())
        throw ConfigError("conv: weight in_channels " + std::to_string(w.c()) +
                          " != input channels " + std::to_string(in.c()));
    if (!bias.empty() && static_cast<int>(bias.size()) != w.n())
        throw ConfigError("conv: bias size " + std::to_string(bias.size()) +
                          " != out_channels " + std::to_string(w.n()));
    const int oh = conv_out_dim(in.h(), w.h(), stride, padding);
    const int ow = conv_out_dim(in.w(), w.w(), stride, padding);
    if (oh <= 0 || ow <= 0)
        throw ConfigError("conv: non-integral or non-positive output size for input " +
                          in.shape_str() + ", kernel " + std::to_string(w.h()) + "x" +
                          std::to_string(w.w()) + ", stride " + std::to_string(stride) +
                          ", padding " + std::to_string(padding));

    Tensor4T<T> out(in.n(), w.n(), oh, ow);
    const int N = in.n(), OC = w.n(), IC = in.c();
    const int KH = w.h(), KW = w.w(), IH = in.h(), IW = in.w();

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n)
        for (int oc = 0; oc < OC; ++oc) {
            const T b = bias.empty() ? T(0) : bias[oc];
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T acc = b;
                    const int y0 = oy * stride - padding;
                    const int x0 = ox * stride - padding;
                    for (int ic = 0; ic < IC; ++ic)
                        for (int ky = 0; ky < KH; ++ky) {
                            const int iy = y0 + ky;
                            if (iy < 0 || iy >= IH) continue;
                            for (int kx = 0; kx < KW; ++kx) {
                                const int ix = x0 + kx;
                                if (ix < 0 || ix >= IW) continue;
                                acc += in(n, ic, iy, ix) * w(oc, ic, ky, kx);
                            }
                        }
                    out(n, oc, oy, ox) = acc;
                }
        }
    return out;
}

// Analytic gradients of conv_forward wrt input, weights and bias.
template <class T>
ConvGrads<T> conv_backward(const Tensor4T<T>& in, const Tensor4T<T>& w,
                           const Tensor4T<T>& grad_out, int stride, int padding) {
    const int oh = conv_out_dim(in.h(), w.h(), stride, padding);
    const int ow = conv_out_dim(in.w(), w.w(), stride, padding);
    if (grad_out.n() != in.n() || grad_out.c() != w.n() || grad_out.h() != oh ||
        grad_out.w() != ow)
        throw ConfigError("conv backward: grad_out shape " + grad_out.shape_str() +
                          " does not match forward output");

    ConvGrads<T> g;
    g.input = Tensor4T<T>(in.n(), in.c(), in.h(), in.w());
    g.weights = Tensor4T<T>(w.n(), w.c(), w.h(), w.w());
    g.bias.assign(w.n(), T(0));

    const int N = in.n(), OC = w.n(), IC = in.c();
    const int KH = w.h(), KW = w.w(), IH = in.h(), IW = in.w();

    // each image's input gradient is private to one iteration
#pragma omp parallel for schedule(static)
    for (int n = 0; n < N; ++n)
        for (int oc = 0; oc < OC; ++oc)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    const T go = grad_out(n, oc, oy, ox);
                    if (go == T(0)) continue;
                    const int y0 = oy * stride - padding;
                    const int x0 = ox * stride - padding;
                    for (int ic = 0; ic < IC; ++ic)
                        for (int ky = 0; ky < KH; ++ky) {
                            const int iy = y0 + ky;
                            if (iy < 0 || iy >= IH) continue;
                            for (int kx = 0; kx < KW; ++kx) {
                                const int ix = x0 + kx;
                                if (ix < 0 || ix >= IW) continue;
                                g.input(n, ic, iy, ix) += go * w(oc, ic, ky, kx);
                            }
                        }
                }

    // each (oc, ic) weight slice accumulates independently, batch-major order
#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < IC; ++ic)
            for (int n = 0; n < N; ++n)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        const T go = grad_out(n, oc, oy, ox);
                        if (go == T(0)) continue;
                        const int y0 = oy * stride - padding;
                        const int x0 = ox * stride - padding;
                        for (int ky = 0; ky < KH; ++ky) {
                            const int iy = y0 + ky;
                            if (iy < 0 || iy >= IH) continue;
                            for (int kx = 0; kx < KW; ++kx) {
                                const int ix = x0 + kx;
                                if (ix < 0 || ix >= IW) continue;
                                g.weights(oc, ic, ky, kx) += go * in(n, ic, iy, ix);
                            }
                        }
                    }

#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < OC; ++oc) {
        T acc = T(0);
        for (int n = 0; n < N; ++n)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) acc += grad_out(n, oc, oy, ox);
        g.bias[oc] = acc;
    }
    return g;
}

template <class T>
Tensor4T<T> relu_forward(const Tensor4T<T>& in) {
    Tensor4T<T> out(in.n(), in.c(), in.h(), in.w());
    const std::int64_t sz = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
    return out;
}

// derivative at exactly 0 is defined as 0
template <class T>
Tensor4T<T> relu_backward(const Tensor4T<T>& in, const Tensor4T<T>& grad_out) {
    if (!in.same_shape(grad_out))
        throw ConfigError("relu backward: grad shape " + grad_out.shape_str() +
                          " != input shape " + in.shape_str());
    Tensor4T<T> out(in.n(), in.c(), in.h(), in.w());
    const std::int64_t sz = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < sz; ++i) out[i] = in[i] > T(0) ? grad_out[i] : T(0);
    return out;
}

// Per-window maximum; ties go to the first maximum in row-major order so the
// backward routing is deterministic.
template <class T>
PoolResult<T> maxpool_forward(const Tensor4T<T>& in, int window, int stride) {
    if (window > in.h() || window > in.w())
        throw ConfigError("maxpool: window " + std::to_string(window) +
                          " exceeds spatial dims of " + in.shape_str());
    const int oh = pool_out_dim(in.h(), window, stride);
    const int ow = pool_out_dim(in.w(), window, stride);
    if (oh <= 0 || ow <= 0)
        throw ConfigError("maxpool: non-integral or non-positive output size for input " +
                          in.shape_str() + ", window " + std::to_string(window) +
                          ", stride " + std::to_string(stride));

    PoolResult<T> r;
    r.out = Tensor4T<T>(in.n(), in.c(), oh, ow);
    r.argmax.assign(r.out.size(), 0);
    const int N = in.n(), C = in.c();

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T best = in(n, c, oy * stride, ox * stride);
                    std::size_t best_idx = in.index(n, c, oy * stride, ox * stride);
                    for (int ky = 0; ky < window; ++ky)
                        for (int kx = 0; kx < window; ++kx) {
                            const std::size_t idx =
                                in.index(n, c, oy * stride + ky, ox * stride + kx);
                            if (in[idx] > best) {
                                best = in[idx];
                                best_idx = idx;
                            }
                        }
                    const std::size_t o = r.out.index(n, c, oy, ox);
                    r.out[o] = best;
                    r.argmax[o] = static_cast<std::int32_t>(best_idx);
                }
    return r;
}

// routes each gradient to the recorded argmax position only
template <class T>
Tensor4T<T> maxpool_backward(const std::vector<std::int32_t>& argmax,
                             const Tensor4T<T>& grad_out, int in_n, int in_c, int in_h,
                             int in_w) {
    if (argmax.size() != grad_out.size())
        throw ConfigError("maxpool backward: argmax count " + std::to_string(argmax.size()) +
                          " != grad element count " + std::to_string(grad_out.size()));
    Tensor4T<T> out(in_n, in_c, in_h, in_w);
    // windows can overlap when stride < window, so accumulation is serial
    for (std::size_t i = 0; i < argmax.size(); ++i)
        out[static_cast<std::size_t>(argmax[i])] += grad_out[i];
    return out;
}

template <class T>
Tensor4T<T> avgpool_forward(const Tensor4T<T>& in, int window, int stride) {
    if (window > in.h() || window > in.w())
        throw ConfigError("avgpool: window " + std::to_string(window) +
                          " exceeds spatial dims of " + in.shape_str());
    const int oh = pool_out_dim(in.h(), window, stride);
    const int ow = pool_out_dim(in.w(), window, stride);
    if (oh <= 0 || ow <= 0)
        throw ConfigError("avgpool: non-integral or non-positive output size for input " +
                          in.shape_str() + ", window " + std::to_string(window) +
                          ", stride " + std::to_string(stride));

    Tensor4T<T> out(in.n(), in.c(), oh, ow);
    const T denom = T(window) * T(window);
    const int N = in.n(), C = in.c();

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T acc = T(0);
                    for (int ky = 0; ky < window; ++ky)
                        for (int kx = 0; kx < window; ++kx)
                            acc += in(n, c, oy * stride + ky, ox * stride + kx);
                    out(n, c, oy, ox) = acc / denom;
                }
    return out;
}

template <class T>
Tensor4T<T> avgpool_backward(const Tensor4T<T>& grad_out, int window, int stride, int in_n,
                             int in_c, int in_h, int in_w) {
    Tensor4T<T> out(in_n, in_c, in_h, in_w);
    const T denom = T(window) * T(window);
    for (int n = 0; n < grad_out.n(); ++n)
        for (int c = 0; c < grad_out.c(); ++c)
            for (int oy = 0; oy < grad_out.h(); ++oy)
                for (int ox = 0; ox < grad_out.w(); ++ox) {
                    const T share = grad_out(n, c, oy, ox) / denom;
                    for (int ky = 0; ky < window; ++ky)
                        for (int kx = 0; kx < window; ++kx)
                            out(n, c, oy * stride + ky, ox * stride + kx) += share;
                }
    return out;
}

// input (n, f, 1, 1), weights (out, f, 1, 1) -> (n, out, 1, 1)
template <class T>
Tensor4T<T> fc_forward(const Tensor4T<T>& in, const Tensor4T<T>& w, std::span<const T> bias) {
    if (in.h() != 1 || in.w() != 1)
        throw ConfigError("fully_connected: input not flattened: " + in.shape_str());
    if (w.c() != in.c())
        throw ConfigError("fully_connected: weight in_features " + std::to_string(w.c()) +
                          " != input features " + std::to_string(in.c()));
    const int N = in.n(), O = w.n(), F = in.c();
    Tensor4T<T> out(N, O, 1, 1);
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o) {
            T acc = bias.empty() ? T(0) : bias[o];
            for (int f = 0; f < F; ++f) acc += w(o, f, 0, 0) * in(n, f, 0, 0);
            out(n, o, 0, 0) = acc;
        }
    return out;
}

template <class T>
ConvGrads<T> fc_backward(const Tensor4T<T>& in, const Tensor4T<T>& w,
                         const Tensor4T<T>& grad_out) {
    if (grad_out.n() != in.n() || grad_out.c() != w.n())
        throw ConfigError("fully_connected backward: grad shape " + grad_out.shape_str() +
                          " does not match forward output");
    const int N = in.n(), O = w.n(), F = in.c();
    ConvGrads<T> g;
    g.input = Tensor4T<T>(N, F, 1, 1);
    g.weights = Tensor4T<T>(O, F, 1, 1);
    g.bias.assign(O, T(0));

#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n)
        for (int f = 0; f < F; ++f) {
            T acc = T(0);
            for (int o = 0; o < O; ++o) acc += grad_out(n, o, 0, 0) * w(o, f, 0, 0);
            g.input(n, f, 0, 0) = acc;
        }

#pragma omp parallel for collapse(2) schedule(static)
    for (int o = 0; o < O; ++o)
        for (int f = 0; f < F; ++f) {
            T acc = T(0);
            for (int n = 0; n < N; ++n) acc += grad_out(n, o, 0, 0) * in(n, f, 0, 0);
            g.weights(o, f, 0, 0) = acc;
        }

    for (int o = 0; o < O; ++o) {
        T acc = T(0);
        for (int n = 0; n < N; ++n) acc += grad_out(n, o, 0, 0);
        g.bias[o] = acc;
    }
    return g;
}

// logits (n, K, 1, 1); loss = mean over the batch of -log softmax[label]
template <class T>
SoftmaxResult<T> softmax_xent_forward(const Tensor4T<T>& logits, std::span<const int> labels) {
    if (logits.h() != 1 || logits.w() != 1)
        throw ConfigError("softmax: logits not flattened: " + logits.shape_str());
    const int N = logits.n(), K = logits.c();
    if (static_cast<int>(labels.size()) != N)
        throw DataError("softmax: " + std::to_string(labels.size()) + " labels for batch of " +
                        std::to_string(N));
    for (int n = 0; n < N; ++n)
        if (labels[n] < 0 || labels[n] >= K)
            throw DataError("record " + std::to_string(n) + ": label " +
                            std::to_string(labels[n]) + " out of range [0, " +
                            std::to_string(K) + ")");

    SoftmaxResult<T> r;
    r.probs = Tensor4T<T>(N, K, 1, 1);
    std::vector<T> losses(N);

#pragma omp parallel for schedule(static)
    for (int n = 0; n < N; ++n) {
        T m = logits(n, 0, 0, 0);
        for (int k = 1; k < K; ++k) m = std::max(m, logits(n, k, 0, 0));
        T sum = T(0);
        for (int k = 0; k < K; ++k) {
            const T e = std::exp(logits(n, k, 0, 0) - m);
            r.probs(n, k, 0, 0) = e;
            sum += e;
        }
        for (int k = 0; k < K; ++k) r.probs(n, k, 0, 0) /= sum;
        losses[n] = -(logits(n, labels[n], 0, 0) - m - std::log(sum));
    }

    T total = T(0);
    for (int n = 0; n < N; ++n) total += losses[n];
    r.loss = total / T(N);
    return r;
}

// d(loss)/d(logits) = (probs - onehot) / n
template <class T>
Tensor4T<T> softmax_xent_backward(const Tensor4T<T>& probs, std::span<const int> labels) {
    const int N = probs.n(), K = probs.c();
    Tensor4T<T> grad(N, K, 1, 1);
    const T inv_n = T(1) / T(N);
#pragma omp parallel for schedule(static)
    for (int n = 0; n < N; ++n)
        for (int k = 0; k < K; ++k)
            grad(n, k, 0, 0) = (probs(n, k, 0, 0) - (labels[n] == k ? T(1) : T(0))) * inv_n;
    return grad;
}

}  // namespace hep2::nn
