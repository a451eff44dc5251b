#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hep2/nn/kernels.hpp"
#include "hep2/nn/layer_spec.hpp"
#include "hep2/nn/params.hpp"

namespace hep2::nn {

/// Everything the backward pass needs: acts[i] is the input to layer i,
/// acts[layers.size()] is the network output (class probabilities).
template <class T>
struct ForwardCache {
    std::vector<Tensor4T<T>> acts;
    std::vector<std::vector<std::int32_t>> pool_argmax;  // per layer, maxpool only

    const Tensor4T<T>& probs() const { return acts.back(); }
};

namespace detail {

[[noreturn]] inline void rethrow_with_layer(std::size_t idx, const std::exception& e) {
    throw ConfigError("layer " + std::to_string(idx) + ": " + e.what());
}

}  // namespace detail

/// Runs the batch through every layer in order. The final SoftmaxOutput
/// layer emits probabilities; rows sum to 1 up to float rounding.
template <class T>
Tensor4T<T> network_forward(const NetworkConfig& cfg, const ParametersT<T>& params,
                            const Tensor4T<T>& batch, ForwardCache<T>* cache = nullptr) {
    if (batch.c() != cfg.input.c || batch.h() != cfg.input.h || batch.w() != cfg.input.w)
        throw ConfigError("batch shape " + batch.shape_str() + " does not match input shape " +
                          cfg.input.str());

    if (cache) {
        cache->acts.clear();
        cache->acts.reserve(cfg.layers.size() + 1);
        cache->pool_argmax.assign(cfg.layers.size(), {});
    }

    Tensor4T<T> cur = batch;
    for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
        const LayerSpec& s = cfg.layers[i];
        if (cache) cache->acts.push_back(cur);
        try {
            switch (s.kind) {
                case LayerKind::Conv:
                    cur = conv_forward(cur, params.weights[i],
                                       std::span<const T>(params.biases[i]), s.stride,
                                       s.padding);
                    break;
                case LayerKind::ReLU:
                    cur = relu_forward(cur);
                    break;
                case LayerKind::MaxPool: {
                    PoolResult<T> r = maxpool_forward(cur, s.window, s.pool_stride);
                    if (cache) cache->pool_argmax[i] = std::move(r.argmax);
                    cur = std::move(r.out);
                    break;
                }
                case LayerKind::AvgPool:
                    cur = avgpool_forward(cur, s.window, s.pool_stride);
                    break;
                case LayerKind::Flatten:
                    cur = cur.reshaped(cur.n(), cur.features(), 1, 1);
                    break;
                case LayerKind::FullyConnected:
                    cur = fc_forward(cur, params.weights[i],
                                     std::span<const T>(params.biases[i]));
                    break;
                case LayerKind::SoftmaxOutput: {
                    // probabilities only; the loss needs labels and is
                    // computed in network_backward
                    const Tensor4T<T> logits = cur.reshaped(cur.n(), cur.features(), 1, 1);
                    const int N = logits.n(), K = logits.c();
                    Tensor4T<T> probs(N, K, 1, 1);
                    for (int n = 0; n < N; ++n) {
                        T m = logits(n, 0, 0, 0);
                        for (int k = 1; k < K; ++k) m = std::max(m, logits(n, k, 0, 0));
                        T sum = T(0);
                        for (int k = 0; k < K; ++k) {
                            const T e = std::exp(logits(n, k, 0, 0) - m);
                            probs(n, k, 0, 0) = e;
                            sum += e;
                        }
                        for (int k = 0; k < K; ++k) probs(n, k, 0, 0) /= sum;
                    }
                    cur = std::move(probs);
                    break;
                }
            }
        } catch (const ConfigError& e) {
            detail::rethrow_with_layer(i, e);
        }
    }
    if (cache) cache->acts.push_back(cur);
    return cur;
}

/// Backward pass from cached activations; returns the mean cross-entropy
/// loss and gradients for every parameterized layer.
template <class T>
std::pair<T, ParametersT<T>> network_backward(const NetworkConfig& cfg,
                                              const ParametersT<T>& params,
                                              const ForwardCache<T>& cache,
                                              std::span<const int> labels) {
    const Tensor4T<T>& probs = cache.probs();
    const int N = probs.n(), K = probs.c();
    if (static_cast<int>(labels.size()) != N)
        throw DataError("network backward: " + std::to_string(labels.size()) +
                        " labels for batch of " + std::to_string(N));
    for (int n = 0; n < N; ++n)
        if (labels[n] < 0 || labels[n] >= K)
            throw DataError("record " + std::to_string(n) + ": label " +
                            std::to_string(labels[n]) + " out of range [0, " +
                            std::to_string(K) + ")");

    T loss = T(0);
    for (int n = 0; n < N; ++n) loss -= std::log(probs(n, labels[n], 0, 0));
    loss /= T(N);

    ParametersT<T> grads = zero_params<T>(cfg);
    Tensor4T<T> grad = softmax_xent_backward(probs, labels);

    for (std::size_t ii = cfg.layers.size(); ii-- > 0;) {
        const LayerSpec& s = cfg.layers[ii];
        const Tensor4T<T>& in = cache.acts[ii];
        switch (s.kind) {
            case LayerKind::SoftmaxOutput:
                // grad holds d(loss)/d(logits); restore the pre-softmax shape
                grad = grad.reshaped(in.n(), in.c(), in.h(), in.w());
                break;
            case LayerKind::Conv: {
                ConvGrads<T> g = conv_backward(in, params.weights[ii], grad, s.stride, s.padding);
                grads.weights[ii] = std::move(g.weights);
                grads.biases[ii] = std::move(g.bias);
                grad = std::move(g.input);
                break;
            }
            case LayerKind::ReLU:
                grad = relu_backward(in, grad);
                break;
            case LayerKind::MaxPool:
                grad = maxpool_backward(cache.pool_argmax[ii], grad, in.n(), in.c(), in.h(),
                                        in.w());
                break;
            case LayerKind::AvgPool:
                grad = avgpool_backward(grad, s.window, s.pool_stride, in.n(), in.c(), in.h(),
                                        in.w());
                break;
            case LayerKind::Flatten:
                grad = grad.reshaped(in.n(), in.c(), in.h(), in.w());
                break;
            case LayerKind::FullyConnected: {
                ConvGrads<T> g = fc_backward(in, params.weights[ii], grad);
                grads.weights[ii] = std::move(g.weights);
                grads.biases[ii] = std::move(g.bias);
                grad = std::move(g.input);
                break;
            }
        }
    }
    return {loss, std::move(grads)};
}

}  // namespace hep2::nn
