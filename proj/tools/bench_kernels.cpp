// Times the OpenMP layer kernels against the serial reference loops and
// cross-checks their outputs. Run with --small for a quick smoke pass.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "hep2/nn/kernels.hpp"
#include "hep2/nn/reference.hpp"
#include "hep2/rng.hpp"

using namespace hep2;

namespace {

Tensor4 random_tensor(int n, int c, int h, int w, Rng& rng) {
    Tensor4 t(n, c, h, w);
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
    return t;
}

template <class F>
double time_ms(const F& f, int reps) {
    f();  // warmup, pays the OpenMP pool startup outside the clock
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

float max_abs_diff(const Tensor4& a, const Tensor4& b) {
    float m = 0.f;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct ConvCase {
    const char* name;
    int n, c, h, oc, k;
};

}  // namespace

int main(int argc, char** argv) {
    bool small = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--small") == 0) small = true;

    const int reps = small ? 2 : 10;
    std::vector<ConvCase> cases;
    if (small) {
        cases = {{"conv 3x3", 2, 8, 16, 8, 3}, {"conv 1x1", 2, 8, 16, 8, 1}};
    } else {
        cases = {
            {"conv 5x5 input", 8, 1, 60, 32, 5},
            {"conv 3x3 mid", 8, 32, 28, 48, 3},
            {"conv 1x1 mid", 8, 48, 26, 48, 1},
        };
    }

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-18s %12s %12s %9s %10s\n", "kernel", "omp ms", "serial ms", "speedup",
                "max|diff|");

    Rng rng(7);
    for (const ConvCase& cc : cases) {
        const Tensor4 in = random_tensor(cc.n, cc.c, cc.h, cc.h, rng);
        const Tensor4 w = random_tensor(cc.oc, cc.c, cc.k, cc.k, rng);
        std::vector<float> bias(static_cast<std::size_t>(cc.oc));
        for (float& b : bias) b = static_cast<float>(rng.uniform(-0.5, 0.5));

        Tensor4 out_omp, out_ref;
        const double ms_omp =
            time_ms([&] { out_omp = nn::conv_forward(in, w, std::span<const float>(bias), 1, 0); },
                    reps);
        const double ms_ref = time_ms(
            [&] {
                out_ref = nn::reference::conv_forward_ref(in, w, std::span<const float>(bias), 1, 0);
            },
            reps);
        std::printf("%-18s %12.3f %12.3f %8.2fx %10.2e\n", cc.name, ms_omp, ms_ref,
                    ms_ref / ms_omp, max_abs_diff(out_omp, out_ref));
    }

    {
        const int side = small ? 16 : 56;
        const Tensor4 in = random_tensor(small ? 2 : 8, 32, side, side, rng);
        Tensor4 out_omp, out_ref;
        const double ms_omp =
            time_ms([&] { out_omp = nn::maxpool_forward(in, 2, 2).out; }, reps);
        const double ms_ref =
            time_ms([&] { out_ref = nn::reference::maxpool_forward_ref(in, 2, 2); }, reps);
        std::printf("%-18s %12.3f %12.3f %8.2fx %10.2e\n", "maxpool 2x2", ms_omp, ms_ref,
                    ms_ref / ms_omp, max_abs_diff(out_omp, out_ref));

        const double ms_omp_a =
            time_ms([&] { out_omp = nn::avgpool_forward(in, 2, 2); }, reps);
        const double ms_ref_a =
            time_ms([&] { out_ref = nn::reference::avgpool_forward_ref(in, 2, 2); }, reps);
        std::printf("%-18s %12.3f %12.3f %8.2fx %10.2e\n", "avgpool 2x2", ms_omp_a, ms_ref_a,
                    ms_ref_a / ms_omp_a, max_abs_diff(out_omp, out_ref));
    }
    return 0;
}
