#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hep2/error.hpp"
#include "hep2/nn/layer_spec.hpp"
#include "hep2/rng.hpp"
#include "hep2/tensor.hpp"

namespace hep2::nn {

/// Per-layer weight and bias blocks, indexed by layer position in the
/// NetworkConfig. Layers without parameters hold empty entries. The same
/// structure stores gradients.
template <class T>
struct ParametersT {
    std::vector<Tensor4T<T>> weights;
    std::vector<std::vector<T>> biases;

    std::size_t total_count() const {
        std::size_t n = 0;
        for (const auto& w : weights) n += w.size();
        for (const auto& b : biases) n += b.size();
        return n;
    }
};

using Parameters = ParametersT<float>;
using Gradients = ParametersT<float>;

/// Weight/bias shapes implied by the config: conv (out, in, kh, kw),
/// fully-connected (units, features, 1, 1); bias one entry per output
/// channel/unit.
template <class T>
ParametersT<T> zero_params(const NetworkConfig& cfg) {
    const std::vector<Shape3> shapes = cfg.validate();
    ParametersT<T> p;
    p.weights.resize(cfg.layers.size());
    p.biases.resize(cfg.layers.size());
    Shape3 cur = cfg.input;
    for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
        const LayerSpec& s = cfg.layers[i];
        if (s.kind == LayerKind::Conv) {
            p.weights[i] = Tensor4T<T>(s.out_channels, cur.c, s.kernel_h, s.kernel_w);
            p.biases[i].assign(s.out_channels, T(0));
        } else if (s.kind == LayerKind::FullyConnected) {
            p.weights[i] = Tensor4T<T>(s.out_units, cur.features(), 1, 1);
            p.biases[i].assign(s.out_units, T(0));
        }
        cur = shapes[i];
    }
    return p;
}

/// Weights i.i.d. uniform on [-0.001*sqrt(3), +0.001*sqrt(3)] (std 0.001),
/// biases zero, deterministic per seed.
template <class T>
ParametersT<T> init_params(const NetworkConfig& cfg, std::uint64_t seed) {
    ParametersT<T> p = zero_params<T>(cfg);
    Rng rng(seed);
    const double bound = 0.001 * std::sqrt(3.0);
    for (auto& w : p.weights)
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = static_cast<T>(rng.uniform(-bound, bound));
    return p;
}

/// w <- w - lr * g, elementwise, in place.
template <class T>
void sgd_step(ParametersT<T>& params, const ParametersT<T>& grads, T lr) {
    if (params.weights.size() != grads.weights.size())
        throw InternalError("sgd_step: layer count mismatch");
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Tensor4T<T>& w = params.weights[l];
        const Tensor4T<T>& gw = grads.weights[l];
        if (!w.same_shape(gw))
            throw InternalError("sgd_step: weight shape mismatch at layer " + std::to_string(l));
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];

        std::vector<T>& b = params.biases[l];
        const std::vector<T>& gb = grads.biases[l];
        if (b.size() != gb.size())
            throw InternalError("sgd_step: bias shape mismatch at layer " + std::to_string(l));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
    }
}

/// Versioned binary checkpoint: magic "H2NN", format version u32, config
/// hash u64, then every parameter block as little-endian 32-bit floats in
/// declaration order (per layer: weights, then bias). Loading refuses a
/// file whose config hash does not match.
void save_checkpoint(const std::string& path, const NetworkConfig& cfg, const Parameters& p);
Parameters load_checkpoint(const std::string& path, const NetworkConfig& cfg);

}  // namespace hep2::nn
