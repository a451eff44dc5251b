#pragma once

#include <span>
#include <vector>

#include "hep2/tensor.hpp"

// Deliberately naive serial kernels. They are the independent oracle the
// parallel kernels are tested against and the baseline in bench_kernels;
// do not optimize them.
namespace hep2::nn::reference {

// plain six-nested-loop cross-correlation
template <class T>
Tensor4T<T> conv_forward_ref(const Tensor4T<T>& in, const Tensor4T<T>& w,
                             std::span<const T> bias, int stride, int padding) {
    const int oh = (in.h() + 2 * padding - w.h()) / stride + 1;
    const int ow = (in.w() + 2 * padding - w.w()) / stride + 1;
    Tensor4T<T> out(in.n(), w.n(), oh, ow);
    for (int n = 0; n < in.n(); ++n)
        for (int oc = 0; oc < w.n(); ++oc)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T acc = bias.empty() ? T(0) : bias[oc];
                    for (int ic = 0; ic < in.c(); ++ic)
                        for (int ky = 0; ky < w.h(); ++ky)
                            for (int kx = 0; kx < w.w(); ++kx) {
                                const int iy = oy * stride - padding + ky;
                                const int ix = ox * stride - padding + kx;
                                if (iy < 0 || iy >= in.h() || ix < 0 || ix >= in.w())
                                    continue;
                                acc += in(n, ic, iy, ix) * w(oc, ic, ky, kx);
                            }
                    out(n, oc, oy, ox) = acc;
                }
    return out;
}

template <class T>
Tensor4T<T> maxpool_forward_ref(const Tensor4T<T>& in, int window, int stride) {
    const int oh = (in.h() - window) / stride + 1;
    const int ow = (in.w() - window) / stride + 1;
    Tensor4T<T> out(in.n(), in.c(), oh, ow);
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T best = in(n, c, oy * stride, ox * stride);
                    for (int ky = 0; ky < window; ++ky)
                        for (int kx = 0; kx < window; ++kx) {
                            const T v = in(n, c, oy * stride + ky, ox * stride + kx);
                            if (v > best) best = v;
                        }
                    out(n, c, oy, ox) = best;
                }
    return out;
}

template <class T>
Tensor4T<T> avgpool_forward_ref(const Tensor4T<T>& in, int window, int stride) {
    const int oh = (in.h() - window) / stride + 1;
    const int ow = (in.w() - window) / stride + 1;
    Tensor4T<T> out(in.n(), in.c(), oh, ow);
    const T denom = T(window) * T(window);
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
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

}  // namespace hep2::nn::reference
