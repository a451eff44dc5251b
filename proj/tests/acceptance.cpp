// Acceptance suite: runs every toolkit-level criterion and prints one
// PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "hep2/data/augment.hpp"
#include "hep2/eval/metrics.hpp"
#include "hep2/eval/split.hpp"
#include "hep2/nn/network.hpp"
#include "hep2/nn/reference.hpp"
#include "hep2/synth/generator.hpp"
#include "hep2/train/experiment.hpp"

using namespace hep2;
using testutil::fd_central;
using testutil::project;
using testutil::random_tensor;
using testutil::rel_err;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure(msg);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

data::CellRecord dummy_cell(int side, int label, const std::string& specimen) {
    data::CellRecord r;
    r.pixels = data::GrayImage(side, side);
    r.label = label;
    r.specimen_id = specimen;
    return r;
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

void mca_oracle() {
    const std::vector<double> set3{86.16, 70.96, 86.87, 83.62, 85.42, 61.74};
    const double m3 = eval::mca(set3);
    require(std::abs(m3 - 79.13) <= 0.005, "set-3 MCA " + fmt(m3) + " != 79.13 +/- 0.005");

    const std::vector<double> pooled{85.93, 79.97, 85.84, 84.93, 94.34, 70.30};
    const double mp = eval::mca(pooled);
    require(std::abs(mp - 83.55) <= 0.005, "pooled MCA " + fmt(mp) + " != 83.55 +/- 0.005");
}

void augmentation_arithmetic() {
    const std::int64_t task1[6] = {2494, 2831, 2598, 2741, 2208, 724};
    const std::int64_t x8_expected[6] = {19952, 22648, 20784, 21928, 17664, 5792};
    data::Records in;
    for (int cls = 0; cls < 6; ++cls)
        for (std::int64_t i = 0; i < task1[cls]; ++i)
            in.push_back(dummy_cell(2, cls, "t1_" + std::to_string(cls)));
    const data::Records x8 = data::augment_x8(in);
    require(x8.size() == 108768, "x8 total " + std::to_string(x8.size()) + " != 108768");
    const auto x8_counts = data::class_counts(x8);
    for (int cls = 0; cls < 6; ++cls)
        require(x8_counts[static_cast<std::size_t>(cls)] == x8_expected[cls],
                "x8 class " + std::to_string(cls) + " count " +
                    std::to_string(x8_counts[static_cast<std::size_t>(cls)]));

    const std::int64_t task2[6] = {11386, 11858, 9320, 10199, 4363, 1501};
    const std::int64_t pol_expected[6] = {22772, 23716, 18640, 20398, 17452, 12008};
    data::Records in2;
    for (int cls = 0; cls < 6; ++cls)
        for (std::int64_t i = 0; i < task2[cls]; ++i)
            in2.push_back(dummy_cell(2, cls, "t2_" + std::to_string(cls)));
    const data::Records pol = data::augment_task2_policy(in2, data::default_task2_policy());
    require(pol.size() == 114986, "policy total " + std::to_string(pol.size()) + " != 114986");
    const auto pol_counts = data::class_counts(pol);
    for (int cls = 0; cls < 6; ++cls)
        require(pol_counts[static_cast<std::size_t>(cls)] == pol_expected[cls],
                "policy class " + std::to_string(cls) + " count " +
                    std::to_string(pol_counts[static_cast<std::size_t>(cls)]));
}

void set3_arithmetic() {
    data::Records task1, task2;
    Rng rng(40);
    for (int s = 0; s < 83; ++s) {
        const int cells = 41 + static_cast<int>(rng.below(30));
        for (int c = 0; c < cells; ++c) task1.push_back(dummy_cell(2, s % 6, "t1_" + std::to_string(s)));
    }
    for (int s = 0; s < 237; ++s) {
        const int cells = 41 + static_cast<int>(rng.below(170));
        for (int c = 0; c < cells; ++c) task2.push_back(dummy_cell(2, s % 6, "t2_" + std::to_string(s)));
    }
    const data::Records set3 = data::build_set3(task1, task2, 41, 17);
    require(set3.size() == 13120,
            "set-3 size " + std::to_string(set3.size()) + " != 13120 (= 320 * 41)");
}

void convolution_oracle() {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed * 31 + 5);
        const int n = 1 + static_cast<int>(rng.below(3));
        const int c = 1 + static_cast<int>(rng.below(4));
        const int h = 3 + static_cast<int>(rng.below(7));
        const int w_dim = 3 + static_cast<int>(rng.below(7));
        const int oc = 1 + static_cast<int>(rng.below(4));
        const int k = (seed % 3 == 0) ? 1 : 1 + static_cast<int>(rng.below(3));
        const int pad = static_cast<int>(rng.below(2));
        int stride = 1 + static_cast<int>(rng.below(2));
        if ((h + 2 * pad - k) % stride != 0 || (w_dim + 2 * pad - k) % stride != 0) stride = 1;

        const Tensor4d in = random_tensor<double>(n, c, h, w_dim, rng);
        const Tensor4d wt = random_tensor<double>(oc, c, k, k, rng);
        std::vector<double> bias(static_cast<std::size_t>(oc));
        for (double& b : bias) b = rng.uniform(-1.0, 1.0);

        const Tensor4d out = nn::conv_forward(in, wt, std::span<const double>(bias), stride, pad);
        const Tensor4d ref =
            nn::reference::conv_forward_ref(in, wt, std::span<const double>(bias), stride, pad);
        for (std::size_t i = 0; i < out.size(); ++i)
            require(std::abs(out[i] - ref[i]) <= 1e-10,
                    "conv/reference mismatch at seed " + std::to_string(seed));
    }
}

void per_layer_gradients() {
    int conv_cases = 0, relu_cases = 0, pool_cases = 0, avg_cases = 0, fc_cases = 0,
        soft_cases = 0;

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed * 97 + 13);

        {  // conv
            const int n = 1 + static_cast<int>(rng.below(2));
            const int c = 1 + static_cast<int>(rng.below(3));
            const int h = 4 + static_cast<int>(rng.below(3));
            const int oc = 1 + static_cast<int>(rng.below(3));
            const int k = 1 + static_cast<int>(rng.below(3));
            const int pad = static_cast<int>(rng.below(2));
            Tensor4d in = random_tensor<double>(n, c, h, h, rng);
            Tensor4d w = random_tensor<double>(oc, c, k, k, rng);
            std::vector<double> bias(static_cast<std::size_t>(oc));
            for (double& b : bias) b = rng.uniform(-1.0, 1.0);
            const Tensor4d out0 = nn::conv_forward(in, w, std::span<const double>(bias), 1, pad);
            const Tensor4d proj = random_tensor<double>(out0.n(), out0.c(), out0.h(), out0.w(), rng);
            const nn::ConvGrads<double> g = nn::conv_backward(in, w, proj, 1, pad);
            auto loss = [&] {
                return project(nn::conv_forward(in, w, std::span<const double>(bias), 1, pad), proj);
            };
            for (std::size_t i = 0; i < in.size(); ++i)
                require(rel_err(g.input[i], fd_central(loss, in[i])) <= 1e-4, "conv dIn FD");
            for (std::size_t i = 0; i < w.size(); ++i)
                require(rel_err(g.weights[i], fd_central(loss, w[i])) <= 1e-4, "conv dW FD");
            for (std::size_t i = 0; i < bias.size(); ++i)
                require(rel_err(g.bias[i], fd_central(loss, bias[i])) <= 1e-4, "conv dB FD");
            ++conv_cases;
        }

        {  // relu, inputs kept away from the kink
            Tensor4d in(1, 2, 5, 5);
            for (std::size_t i = 0; i < in.size(); ++i) {
                double v = rng.uniform(-1.0, 1.0);
                if (std::abs(v) < 0.01) v = v < 0 ? -0.05 : 0.05;
                in[i] = v;
            }
            const Tensor4d proj = random_tensor<double>(1, 2, 5, 5, rng);
            const Tensor4d g = nn::relu_backward(in, proj);
            auto loss = [&] { return project(nn::relu_forward(in), proj); };
            for (std::size_t i = 0; i < in.size(); ++i)
                require(rel_err(g[i], fd_central(loss, in[i])) <= 1e-4, "relu FD");
            ++relu_cases;
        }

        {  // maxpool, distinct values so the argmax is FD-stable
            Tensor4d in(1, 2, 6, 6);
            std::vector<std::size_t> perm(in.size());
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
            for (std::size_t i = 0; i < in.size(); ++i)
                in[i] = static_cast<double>(perm[i]) * 0.002 - 0.072;
            const nn::PoolResult<double> fwd = nn::maxpool_forward(in, 2, 2);
            const Tensor4d proj =
                random_tensor<double>(fwd.out.n(), fwd.out.c(), fwd.out.h(), fwd.out.w(), rng);
            const Tensor4d g = nn::maxpool_backward(fwd.argmax, proj, 1, 2, 6, 6);
            auto loss = [&] { return project(nn::maxpool_forward(in, 2, 2).out, proj); };
            for (std::size_t i = 0; i < in.size(); ++i)
                require(rel_err(g[i], fd_central(loss, in[i])) <= 1e-4, "maxpool FD");
            ++pool_cases;
        }

        {  // avgpool
            Tensor4d in = random_tensor<double>(1, 2, 6, 6, rng);
            const Tensor4d proj = random_tensor<double>(1, 2, 3, 3, rng);
            const Tensor4d g = nn::avgpool_backward(proj, 2, 2, 1, 2, 6, 6);
            auto loss = [&] { return project(nn::avgpool_forward(in, 2, 2), proj); };
            for (std::size_t i = 0; i < in.size(); ++i)
                require(rel_err(g[i], fd_central(loss, in[i])) <= 1e-4, "avgpool FD");
            ++avg_cases;
        }

        {  // fully connected
            const int n = 1 + static_cast<int>(rng.below(3));
            const int f = 2 + static_cast<int>(rng.below(8));
            const int o = 1 + static_cast<int>(rng.below(5));
            Tensor4d in = random_tensor<double>(n, f, 1, 1, rng);
            Tensor4d w = random_tensor<double>(o, f, 1, 1, rng);
            std::vector<double> bias(static_cast<std::size_t>(o));
            for (double& b : bias) b = rng.uniform(-1.0, 1.0);
            const Tensor4d proj = random_tensor<double>(n, o, 1, 1, rng);
            const nn::ConvGrads<double> g = nn::fc_backward(in, w, proj);
            auto loss = [&] {
                return project(nn::fc_forward(in, w, std::span<const double>(bias)), proj);
            };
            for (std::size_t i = 0; i < in.size(); ++i)
                require(rel_err(g.input[i], fd_central(loss, in[i])) <= 1e-4, "fc dIn FD");
            for (std::size_t i = 0; i < w.size(); ++i)
                require(rel_err(g.weights[i], fd_central(loss, w[i])) <= 1e-4, "fc dW FD");
            for (std::size_t i = 0; i < bias.size(); ++i)
                require(rel_err(g.bias[i], fd_central(loss, bias[i])) <= 1e-4, "fc dB FD");
            ++fc_cases;
        }

        {  // softmax + cross-entropy
            const int n = 1 + static_cast<int>(rng.below(4));
            Tensor4d logits = random_tensor<double>(n, 6, 1, 1, rng, -2.0, 2.0);
            std::vector<int> labels(static_cast<std::size_t>(n));
            for (int& l : labels) l = static_cast<int>(rng.below(6));
            const nn::SoftmaxResult<double> r = nn::softmax_xent_forward(logits, labels);
            const Tensor4d g = nn::softmax_xent_backward(r.probs, labels);
            auto loss = [&] { return nn::softmax_xent_forward(logits, labels).loss; };
            for (std::size_t i = 0; i < logits.size(); ++i)
                require(rel_err(g[i], fd_central(loss, logits[i])) <= 1e-4, "softmax FD");
            ++soft_cases;
        }
    }
    require(conv_cases >= 100 && relu_cases >= 100 && pool_cases >= 100 && avg_cases >= 100 &&
                fc_cases >= 100 && soft_cases >= 100,
            "fewer than 100 cases per layer");
}

void whole_network_gradients() {
    const nn::NetworkConfig cfg = nn::default10_config();
    require(cfg.counted_layers() == 10, "default config does not count 10 layers");
    nn::ParametersT<double> params = testutil::test_scale_params<double>(cfg, 77);
    Rng rng(78);
    const Tensor4d batch = random_tensor<double>(2, 1, 60, 60, rng, 0.0, 1.0);
    const std::vector<int> labels{2, 5};

    nn::ForwardCache<double> cache;
    nn::network_forward(cfg, params, batch, &cache);
    const auto [loss, grads] = nn::network_backward(cfg, params, cache, labels);
    require(std::isfinite(loss), "non-finite loss");

    auto loss_fn = [&] {
        nn::ForwardCache<double> c2;
        nn::network_forward(cfg, params, batch, &c2);
        double l = 0.0;
        for (std::size_t b = 0; b < labels.size(); ++b)
            l -= std::log(c2.probs()(static_cast<int>(b), labels[b], 0, 0));
        return l / static_cast<double>(labels.size());
    };

    struct Slot {
        std::size_t layer;
        bool is_bias;
        std::size_t idx;
    };
    std::vector<Slot> slots;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].size(); ++i) slots.push_back({l, false, i});
        for (std::size_t i = 0; i < params.biases[l].size(); ++i) slots.push_back({l, true, i});
    }
    Rng pick(79);
    for (int checked = 0; checked < 50; ++checked) {
        const Slot s = slots[pick.below(slots.size())];
        double& x = s.is_bias ? params.biases[s.layer][s.idx] : params.weights[s.layer][s.idx];
        const double analytic =
            s.is_bias ? grads.biases[s.layer][s.idx] : grads.weights[s.layer][s.idx];
        const double fd = fd_central(loss_fn, x);
        require(rel_err(analytic, fd) <= 1e-3,
                "whole-network FD mismatch: layer " + std::to_string(s.layer) + " analytic " +
                    fmt(analytic) + " fd " + fmt(fd));
    }
}

void protocol_partitions() {
    synth::SynthSpec spec;
    spec.specimens_per_class = 3;
    spec.cells_per_specimen = 8;
    spec.seed = 50;
    const data::Records records = synth::generate(spec);

    const eval::SplitPlan loso = eval::plan_loso(records);
    require(loso.folds.size() == 18, "LOSO fold count != specimen count");
    std::set<std::size_t> tested;
    for (const eval::Fold& fold : loso.folds) {
        require(fold.train.size() + fold.test.size() == records.size(), "fold does not partition");
        std::set<std::string> train_specs, test_specs;
        for (std::size_t i : fold.train) train_specs.insert(records[i].specimen_id);
        for (std::size_t i : fold.test) {
            test_specs.insert(records[i].specimen_id);
            require(tested.insert(i).second, "record tested twice across LOSO folds");
        }
        require(test_specs.size() == 1, "LOSO fold tests more than one specimen");
        for (const std::string& s : test_specs)
            require(train_specs.count(s) == 0, "specimen leaks across a LOSO fold");
    }
    require(tested.size() == records.size(), "LOSO test sets do not cover the dataset");

    const eval::SplitPlan kf = eval::plan_kfold(records, 5, 3);
    bool overlap = false;
    for (const eval::Fold& fold : kf.folds) {
        std::set<std::string> train_specs;
        for (std::size_t i : fold.train) train_specs.insert(records[i].specimen_id);
        for (std::size_t i : fold.test)
            if (train_specs.count(records[i].specimen_id)) overlap = true;
    }
    require(overlap, "k-fold shows no specimen overlap on multi-specimen data");
}

// shared protocol runner for the two training criteria
eval::EvalReport run_protocol(const data::Records& records, eval::SplitScheme scheme) {
    train::ExperimentSpec spec = train::ExperimentSpec::named("custom");
    spec.base = records;
    spec.scheme = scheme;
    spec.k = 5;
    spec.split_seed = 11;
    spec.net = nn::tiny_config();
    spec.tcfg.epochs = 10;
    spec.tcfg.batch_size = 32;
    spec.tcfg.learning_rate = 0.02f;
    spec.tcfg.seed = 123;
    return train::run_experiment(spec);
}

double g_kfold_mca = 0.0, g_loso_mca = 0.0, g_learn_mca = 0.0;

void leakage_gap() {
    synth::SynthSpec spec;  // default spec, correlation 0.8
    spec.intra_specimen_correlation = 0.8;
    spec.seed = 202;
    const data::Records records = synth::generate(spec);

    g_kfold_mca = run_protocol(records, eval::SplitScheme::KFold).mca;
    g_loso_mca = run_protocol(records, eval::SplitScheme::LOSO).mca;
    require(g_kfold_mca >= g_loso_mca + 10.0,
            "k-fold MCA " + fmt(g_kfold_mca) + " does not exceed LOSO MCA " + fmt(g_loso_mca) +
                " by 10 points");
}

void learnability() {
    synth::SynthSpec spec;
    spec.intra_specimen_correlation = 0.0;
    spec.seed = 203;
    const data::Records records = synth::generate(spec);
    g_learn_mca = run_protocol(records, eval::SplitScheme::LOSO).mca;
    require(g_learn_mca > 90.0, "correlation-0 LOSO MCA " + fmt(g_learn_mca) + " <= 90");
}

void determinism() {
    synth::SynthSpec sspec;
    sspec.specimens_per_class = 2;
    sspec.cells_per_specimen = 6;
    sspec.seed = 204;
    const data::Records records = synth::generate(sspec);

    train::ExperimentSpec spec = train::ExperimentSpec::named("custom");
    spec.base = records;
    spec.scheme = eval::SplitScheme::KFold;
    spec.k = 3;
    spec.split_seed = 5;
    spec.net = nn::tiny_config();
    spec.tcfg.epochs = 2;
    spec.tcfg.batch_size = 16;
    spec.tcfg.seed = 6;

    const std::string a = train::run_experiment(spec).serialize();
    const std::string b = train::run_experiment(spec).serialize();
    require(!a.empty() && a == b, "identical reruns produced different reports");
}

void ensemble_rule() {
    nn::NetworkConfig cfg;
    cfg.input = nn::Shape3{1, 2, 2};
    cfg.num_classes = 2;
    cfg.layers = {nn::LayerSpec::flatten(), nn::LayerSpec::fully_connected(2),
                  nn::LayerSpec::softmax_output()};
    cfg.validate();

    auto with_probs = [&cfg](double p0, double p1) {
        nn::Parameters p = nn::zero_params<float>(cfg);
        p.biases[1][0] = static_cast<float>(std::log(p0));
        p.biases[1][1] = static_cast<float>(std::log(p1));
        return p;
    };
    const std::vector<nn::Parameters> ckpts{with_probs(0.9, 0.1), with_probs(0.45, 0.55),
                                            with_probs(0.45, 0.55)};
    data::CellRecord cell;
    cell.pixels = data::GrayImage(2, 2);
    cell.specimen_id = "x";

    // majority vote would say class 1; averaged scores [0.6, 0.4] say class 0
    const auto [cls, scores] = train::ensemble_predict(cfg, ckpts, cell);
    require(std::abs(scores[0] - 0.6) < 1e-4 && std::abs(scores[1] - 0.4) < 1e-4,
            "averaged scores are not [0.6, 0.4]");
    require(cls == 0, "ensemble did not follow the averaged-score rule");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> fn;
        std::string note;
    };
    std::vector<Criterion> criteria = {
        {"mca-oracle", mca_oracle, ""},
        {"augmentation-arithmetic", augmentation_arithmetic, ""},
        {"set3-arithmetic", set3_arithmetic, ""},
        {"convolution-oracle", convolution_oracle, ""},
        {"gradient-suite-per-layer", per_layer_gradients, ""},
        {"gradient-suite-network", whole_network_gradients, ""},
        {"protocol-partitions", protocol_partitions, ""},
        {"leakage-gap", leakage_gap, ""},
        {"learnability-sanity", learnability, ""},
        {"determinism", determinism, ""},
        {"ensemble-rule", ensemble_rule, ""},
    };

    int failures = 0;
    for (Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.fn();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::string extra;
        if (std::string(c.name) == "leakage-gap" && error.empty())
            extra = " (kfold " + fmt(g_kfold_mca) + ", loso " + fmt(g_loso_mca) + ")";
        if (std::string(c.name) == "learnability-sanity" && error.empty())
            extra = " (loso " + fmt(g_learn_mca) + ")";

        if (error.empty()) {
            std::printf("[PASS] %-26s %7.1fs%s\n", c.name, sec, extra.c_str());
        } else {
            std::printf("[FAIL] %-26s %7.1fs  %s\n", c.name, sec, error.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
