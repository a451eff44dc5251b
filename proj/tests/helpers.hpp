#pragma once

// Shared oracles and generators for the test suites: finite-difference
// gradient checks, random tensors with O(1)-scale values, and tiny
// synthetic training sets.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hep2/data/records.hpp"
#include "hep2/nn/layer_spec.hpp"
#include "hep2/nn/params.hpp"
#include "hep2/rng.hpp"
#include "hep2/tensor.hpp"

namespace hep2::testutil {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

template <class T>
Tensor4T<T> random_tensor(int n, int c, int h, int w, Rng& rng, double lo = -1.0,
                          double hi = 1.0) {
    Tensor4T<T> t(n, c, h, w);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

// projection target: L(out) = sum(out .* proj), so dL/dout = proj
inline double project(const Tensor4d& out, const Tensor4d& proj) {
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * proj[i];
    return s;
}

// central finite difference of f() wrt x
template <class F>
double fd_central(F&& f, double& x, double eps = 1e-4) {
    const double saved = x;
    x = saved + eps;
    const double fp = f();
    x = saved - eps;
    const double fm = f();
    x = saved;
    return (fp - fm) / (2.0 * eps);
}

// O(1)-scale parameters keep interior gradients measurable in deep stacks;
// init_params' 1e-3 scale is tested against its own contract separately
template <class T>
nn::ParametersT<T> test_scale_params(const nn::NetworkConfig& cfg, std::uint64_t seed) {
    nn::ParametersT<T> p = nn::zero_params<T>(cfg);
    Rng rng(seed);
    for (auto& w : p.weights) {
        if (w.empty()) continue;
        const double bound = std::sqrt(3.0 / (w.c() * w.h() * w.w()));
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = static_cast<T>(rng.uniform(-bound, bound));
    }
    for (auto& b : p.biases)
        for (auto& v : b) v = static_cast<T>(rng.uniform(-0.1, 0.1));
    return p;
}

// two-class linearly separable toy set: centered blob vs vertical stripes
inline data::Records blob_stripe_set(int count, int side, std::uint64_t seed) {
    data::Records out;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        data::CellRecord rec;
        rec.pixels = data::GrayImage(side, side);
        rec.label = i % 2;
        rec.specimen_id = rec.label == 0 ? "blob_spec" : "stripe_spec";
        const double jitter = rng.uniform(-3.0, 3.0);
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                double v;
                if (rec.label == 0) {
                    const double dy = y - side / 2.0 - jitter, dx = x - side / 2.0 + jitter;
                    v = std::exp(-(dy * dy + dx * dx) / (2.0 * 90.0));
                } else {
                    v = 0.5 + 0.5 * std::sin((x + jitter) * 0.7);
                }
                rec.pixels.at(y, x) =
                    static_cast<float>(std::clamp(v + rng.uniform(-0.03, 0.03), 0.0, 1.0));
            }
        out.push_back(std::move(rec));
    }
    return out;
}

// Minimal 2-class network over 60x60 inputs for training tests. The head
// reads pooled pixels directly: at the 1e-3 init scale a conv in front
// would starve it of signal at the default learning rate.
inline nn::NetworkConfig toy2_config() {
    nn::NetworkConfig cfg;
    cfg.input = nn::Shape3{1, 60, 60};
    cfg.num_classes = 2;
    cfg.layers = {
        nn::LayerSpec::avgpool(5, 5),  // 12x12
        nn::LayerSpec::flatten(),
        nn::LayerSpec::fully_connected(2),
        nn::LayerSpec::softmax_output(),
    };
    return cfg;
}

}  // namespace hep2::testutil
