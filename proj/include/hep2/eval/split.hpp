#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hep2/data/records.hpp"

namespace hep2::eval {

enum class SplitScheme { LOSO, KFold };

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Ordered train/test index pairs. LOSO: one fold per distinct specimen in
/// first-appearance order, testing exactly that specimen's records. KFold:
/// a seeded permutation cut into k near-equal folds, specimen ids ignored.
struct SplitPlan {
    SplitScheme scheme = SplitScheme::LOSO;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
    std::vector<std::string> fold_names;  // LOSO: test specimen id; KFold: fold number
};

SplitPlan plan_loso(const data::Records& records);
SplitPlan plan_kfold(std::size_t record_count, int k, std::uint64_t seed);
SplitPlan plan_kfold(const data::Records& records, int k, std::uint64_t seed);

/// Plain-text serialization for the split subcommand; load inverts save.
std::string save_split_plan(const SplitPlan& plan);
SplitPlan parse_split_plan(const std::string& text);

}  // namespace hep2::eval
