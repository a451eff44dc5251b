#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "hep2/data/records.hpp"
#include "hep2/nn/network.hpp"

namespace hep2::train {

/// Fixed-hyperparameter SGD settings. checkpoint_epochs empty means "the
/// last three epochs" (which is {48, 49, 50} at the default 50); explicit
/// epochs must lie in [1, epochs]. Epoch numbers are 1-based.
struct TrainConfig {
    int batch_size = 200;
    int epochs = 50;
    float learning_rate = 0.002f;
    std::uint64_t seed = 0;
    std::vector<int> checkpoint_epochs;

    /// Checked between epochs; return true to stop early. The run is then
    /// marked aborted (used for per-fold wall-clock budgets).
    std::function<bool()> should_abort;

    std::vector<int> resolved_checkpoint_epochs() const;
};

struct TrainRun {
    std::vector<double> epoch_loss;      // mean per-record loss
    std::vector<double> epoch_accuracy;  // training accuracy, pre-update probs
    std::map<int, nn::Parameters> checkpoints;
    bool aborted = false;
};

/// Minibatch SGD: per epoch a fresh seeded shuffle, sequential batches
/// (a short final batch is trained on), forward/backward/step per batch.
/// Deterministic for a given (config, seed, record order).
TrainRun train(const nn::NetworkConfig& net, const TrainConfig& cfg,
               const data::Records& trainset);

/// Class scores averaged over the checkpoints' probability vectors; the
/// prediction is the argmax, ties resolved to the lowest class index.
std::pair<int, std::vector<float>> ensemble_predict(const nn::NetworkConfig& net,
                                                    const std::vector<nn::Parameters>& checkpoints,
                                                    const data::CellRecord& cell);

/// Batched version for whole test sets; returns one prediction per record.
std::vector<int> ensemble_predict_batch(const nn::NetworkConfig& net,
                                        const std::vector<nn::Parameters>& checkpoints,
                                        const data::Records& cells, int batch_size = 200);

/// Packs records[first, first+count) into an (count, c, h, w) batch.
Tensor4 make_batch(const data::Records& records, const std::vector<std::size_t>& order,
                       std::size_t first, std::size_t count, const nn::Shape3& input);

}  // namespace hep2::train
