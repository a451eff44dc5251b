#include "hep2/train/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "hep2/rng.hpp"

namespace hep2::train {

std::vector<int> TrainConfig::resolved_checkpoint_epochs() const {
    std::vector<int> out;
    if (checkpoint_epochs.empty()) {
        for (int e = std::max(1, epochs - 2); e <= epochs; ++e) out.push_back(e);
        return out;
    }
    out = checkpoint_epochs;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int e : out)
        if (e < 1 || e > epochs)
            throw ConfigError("checkpoint epoch " + std::to_string(e) + " outside [1, " +
                              std::to_string(epochs) + "]");
    return out;
}

Tensor4 make_batch(const data::Records& records, const std::vector<std::size_t>& order,
                       std::size_t first, std::size_t count, const nn::Shape3& input) {
    Tensor4 batch(static_cast<int>(count), input.c, input.h, input.w);
    for (std::size_t b = 0; b < count; ++b) {
        const data::GrayImage& img = records[order[first + b]].pixels;
        if (input.c != 1 || img.height != input.h || img.width != input.w)
            throw DataError("record " + std::to_string(order[first + b]) + ": cell " +
                            std::to_string(img.height) + "x" + std::to_string(img.width) +
                            " does not match network input " + input.str());
        std::copy(img.pixels.begin(), img.pixels.end(),
                  batch.data() + b * static_cast<std::size_t>(input.h) * input.w);
    }
    return batch;
}

TrainRun train(const nn::NetworkConfig& net, const TrainConfig& cfg,
               const data::Records& trainset) {
    net.validate();  // abort before epoch 1 on any shape problem
    if (trainset.empty()) throw DataError("training set is empty");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    const std::vector<int> ckpt_epochs = cfg.resolved_checkpoint_epochs();

    nn::Parameters params = nn::init_params<float>(net, cfg.seed);
    const std::size_t n = trainset.size();
    std::vector<std::size_t> order(n);

    TrainRun run;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.should_abort && cfg.should_abort()) {
            run.aborted = true;
            break;
        }

        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::int64_t correct = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t bsz = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n - start);
            Tensor4 batch = make_batch(trainset, order, start, bsz, net.input);
            std::vector<int> labels(bsz);
            for (std::size_t b = 0; b < bsz; ++b) labels[b] = trainset[order[start + b]].label;

            nn::ForwardCache<float> cache;
            const Tensor4 probs = nn::network_forward(net, params, batch, &cache);
            auto [loss, grads] = nn::network_backward(net, params, cache, labels);
            nn::sgd_step(params, grads, cfg.learning_rate);

            loss_sum += static_cast<double>(loss) * static_cast<double>(bsz);
            for (std::size_t b = 0; b < bsz; ++b) {
                int best = 0;
                for (int k = 1; k < probs.c(); ++k)
                    if (probs(static_cast<int>(b), k, 0, 0) >
                        probs(static_cast<int>(b), best, 0, 0))
                        best = k;
                if (best == labels[b]) ++correct;
            }
        }
        run.epoch_loss.push_back(loss_sum / static_cast<double>(n));
        run.epoch_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n));
        if (std::find(ckpt_epochs.begin(), ckpt_epochs.end(), epoch) != ckpt_epochs.end())
            run.checkpoints.emplace(epoch, params);
    }
    return run;
}

std::pair<int, std::vector<float>> ensemble_predict(const nn::NetworkConfig& net,
                                                    const std::vector<nn::Parameters>& checkpoints,
                                                    const data::CellRecord& cell) {
    if (checkpoints.empty()) throw ConfigError("ensemble_predict needs at least one checkpoint");
    const data::Records one{cell};
    std::vector<std::size_t> order{0};
    const Tensor4 batch = make_batch(one, order, 0, 1, net.input);

    std::vector<float> scores(static_cast<std::size_t>(net.num_classes), 0.f);
    for (const nn::Parameters& p : checkpoints) {
        const Tensor4 probs = nn::network_forward(net, p, batch);
        for (int k = 0; k < net.num_classes; ++k) scores[static_cast<std::size_t>(k)] += probs(0, k, 0, 0);
    }
    const float inv = 1.f / static_cast<float>(checkpoints.size());
    for (float& s : scores) s *= inv;

    int best = 0;
    for (int k = 1; k < net.num_classes; ++k)
        if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(best)]) best = k;
    return {best, scores};
}

std::vector<int> ensemble_predict_batch(const nn::NetworkConfig& net,
                                        const std::vector<nn::Parameters>& checkpoints,
                                        const data::Records& cells, int batch_size) {
    if (checkpoints.empty()) throw ConfigError("ensemble_predict needs at least one checkpoint");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");

    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> preds(cells.size());

    for (std::size_t start = 0; start < cells.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t bsz =
            std::min<std::size_t>(static_cast<std::size_t>(batch_size), cells.size() - start);
        const Tensor4 batch = make_batch(cells, order, start, bsz, net.input);

        std::vector<float> scores(bsz * static_cast<std::size_t>(net.num_classes), 0.f);
        for (const nn::Parameters& p : checkpoints) {
            const Tensor4 probs = nn::network_forward(net, p, batch);
            for (std::size_t b = 0; b < bsz; ++b)
                for (int k = 0; k < net.num_classes; ++k)
                    scores[b * static_cast<std::size_t>(net.num_classes) +
                           static_cast<std::size_t>(k)] += probs(static_cast<int>(b), k, 0, 0);
        }
        for (std::size_t b = 0; b < bsz; ++b) {
            int best = 0;
            for (int k = 1; k < net.num_classes; ++k)
                if (scores[b * static_cast<std::size_t>(net.num_classes) + static_cast<std::size_t>(k)] >
                    scores[b * static_cast<std::size_t>(net.num_classes) + static_cast<std::size_t>(best)])
                    best = k;
            preds[start + b] = best;
        }
    }
    return preds;
}

}  // namespace hep2::train
