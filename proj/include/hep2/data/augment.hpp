#pragma once

#include <cstdint>
#include <map>

#include "hep2/data/records.hpp"

namespace hep2::data {

/// Eightfold geometric augmentation: the four quarter-turn rotations of
/// each cell, each also mirrored. Output order is grouped per input record
/// (orig, rot90, rot180, rot270, then their mirrors); labels and specimen
/// ids carry over unchanged.
Records augment_x8(const Records& records);

/// Per-class multiplier map. x1 keeps the original; x2 adds rot90; x4 adds
/// all quarter turns; x8 additionally mirrors each. Every class present in
/// the input must appear in the policy.
using AugmentPolicy = std::map<int, int>;

Records augment_task2_policy(const Records& records, const AugmentPolicy& policy);

/// Default policy matching the shipped dataset table: x2 for the first four
/// classes, x4 for NuMem, x8 for Golgi.
AugmentPolicy default_task2_policy();

/// Parses "Homogeneous:2,Speckled:2,...,Golgi:8".
AugmentPolicy parse_policy(const std::string& text);

/// Pools both inputs, then samples min(per_specimen, available) cells
/// without replacement from every distinct specimen. Per-specimen subseeds
/// are derived from the specimen id, so the selection is independent of
/// specimen iteration order. Output keeps specimens in first-appearance
/// order and selected cells in original order.
Records build_set3(const Records& task1, const Records& task2_specimens, int per_specimen,
                   std::uint64_t seed);

}  // namespace hep2::data
