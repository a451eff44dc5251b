#pragma once

#include <cstdint>

#include "hep2/data/records.hpp"

namespace hep2::synth {

/// Controls for the synthetic specimen generator. Each class has its own
/// procedural texture family; each specimen draws a latent style whose
/// influence on its cells scales with intra_specimen_correlation. At
/// correlation 0 cells are exchangeable across same-class specimens; at 1
/// (and zero noise) a specimen's cells differ only by position/orientation.
struct SynthSpec {
    int specimens_per_class = 8;
    int cells_per_specimen = 40;
    int classes = 6;
    double intra_specimen_correlation = 0.8;
    double noise_std = 0.03;
    std::uint64_t seed = 0;

    int side = 60;
    int max_shift = 5;               // per-cell translation jitter, pixels
    bool random_orientation = true;  // per-cell rotation jitter

    void check() const;
};

/// Deterministic per seed; specimens use derived subseeds, so generating
/// them in parallel cannot change the output.
data::Records generate(const SynthSpec& spec);

}  // namespace hep2::synth
