#pragma once

#include <string>

#include "hep2/train/experiment.hpp"

namespace hep2::train {

/// Experiment description file: "key = value" lines, '#' comments.
/// Names the manifests, network config, training hyperparameters, split
/// scheme, augmentation policy and output directory.
struct ExperimentFile {
    ExperimentSpec spec;          // base/extra records filled by the caller
    std::string task1_manifest;
    std::string task2_manifest;   // set-3 only
    std::string network = "default10";
    std::string out_dir;
};

ExperimentFile parse_experiment_config(const std::string& text);
ExperimentFile load_experiment_config(const std::string& path);

/// Canonical echo of the resolved configuration, one key per line.
std::string resolved_experiment_config(const ExperimentFile& file);

}  // namespace hep2::train
