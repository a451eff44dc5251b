#pragma once

#include <string>

#include "hep2/data/augment.hpp"
#include "hep2/eval/metrics.hpp"
#include "hep2/eval/split.hpp"
#include "hep2/train/trainer.hpp"

namespace hep2::train {

/// How the training side of each fold is composed. Augmentation always runs
/// on the training side only, after splitting; the Set3 composition is
/// applied to the pooled corpus before splitting (it adds no variants).
enum class Composition { Raw, X8, Policy, Set3 };

struct ExperimentSpec {
    std::string name = "custom";  // set-1 | set-2 | set-3 | custom
    data::Records base;           // set-1/2: Task-1; custom: anything
    data::Records extra;          // set-3: the additional specimen pool

    Composition composition = Composition::Raw;
    data::AugmentPolicy policy;   // Composition::Policy
    int per_specimen = 41;        // Composition::Set3
    std::uint64_t set3_seed = 0;

    eval::SplitScheme scheme = eval::SplitScheme::LOSO;
    int k = 5;
    std::uint64_t split_seed = 0;

    nn::NetworkConfig net;
    TrainConfig tcfg;

    double fold_budget_sec = 0.0;  // 0 = unlimited
    int jobs = 1;

    /// Composition presets for the named experiment sets.
    static ExperimentSpec named(const std::string& name);
};

/// Throws LeakageError if any augmented (non-Original provenance) training
/// record shares a specimen with the fold's test set.
void verify_no_augmented_leakage(const data::Records& train_records,
                                 const data::Records& test_records);

/// Composes the experiment's corpus (before splitting): set-3 sampling
/// happens here; raw/x8/policy return the base unchanged (their
/// augmentation is per-fold).
data::Records compose_corpus(const ExperimentSpec& spec);

/// Composes one fold's training records (augmentation applied here).
data::Records compose_fold_train(const ExperimentSpec& spec, const data::Records& corpus,
                                 const eval::Fold& fold);

/// Full protocol run: split, per-fold training on training-side records
/// only, ensemble prediction over the late checkpoints, one aggregated
/// confusion matrix. Fold results do not depend on scheduling order.
/// Folds exceeding the wall-clock budget are excluded and listed in the
/// report as incomplete.
eval::EvalReport run_experiment(const ExperimentSpec& spec);

}  // namespace hep2::train
