#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hep2/error.hpp"

namespace hep2 {

/// Dense 4-D array in (batch, channel, height, width) row-major order.
/// Holds every activation, gradient and weight block in the network;
/// weights use the layout (out_channels, in_channels, kh, kw).
template <class T>
class Tensor4T {
public:
    Tensor4T() = default;

    Tensor4T(int n, int c, int h, int w)
        : n_(n), c_(c), h_(h), w_(w) {
        if (n < 0 || c < 0 || h < 0 || w < 0)
            throw InternalError("Tensor4: negative dimension");
        data_.assign(static_cast<std::size_t>(n) * c * h * w, T(0));
    }

    int n() const { return n_; }
    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }

    // per-sample feature count when the tensor is viewed as (n, c*h*w)
    int features() const { return c_ * h_ * w_; }

    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    std::size_t index(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
    }

    T& operator()(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
    const T& operator()(int n, int c, int y, int x) const { return data_[index(n, c, y, x)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    bool same_shape(const Tensor4T& o) const {
        return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }

    // reshape without copying; element count must not change
    Tensor4T reshaped(int n, int c, int h, int w) const {
        if (static_cast<std::size_t>(n) * c * h * w != data_.size())
            throw InternalError("Tensor4: reshape changes element count");
        Tensor4T out;
        out.n_ = n;
        out.c_ = c;
        out.h_ = h;
        out.w_ = w;
        out.data_ = data_;
        return out;
    }

    void fill(T v) { data_.assign(data_.size(), v); }

    bool all_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    std::string shape_str() const {
        return std::to_string(n_) + "x" + std::to_string(c_) + "x" +
               std::to_string(h_) + "x" + std::to_string(w_);
    }

private:
    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

using Tensor4 = Tensor4T<float>;
using Tensor4d = Tensor4T<double>;

}  // namespace hep2
