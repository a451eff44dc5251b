#include "hep2/train/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <unordered_set>

#include "hep2/rng.hpp"

namespace hep2::train {

ExperimentSpec ExperimentSpec::named(const std::string& name) {
    ExperimentSpec spec;
    spec.name = name;
    if (name == "set-1") {
        spec.composition = Composition::Raw;
    } else if (name == "set-2") {
        spec.composition = Composition::X8;
    } else if (name == "set-3") {
        spec.composition = Composition::Set3;
    } else if (name == "custom") {
        spec.composition = Composition::Raw;
    } else {
        throw ConfigError("unknown experiment name '" + name +
                          "' (expected set-1, set-2, set-3 or custom)");
    }
    return spec;
}

void verify_no_augmented_leakage(const data::Records& train_records,
                                 const data::Records& test_records) {
    std::unordered_set<std::string> test_ids;
    for (const data::CellRecord& r : test_records) test_ids.insert(r.specimen_id);
    for (const data::CellRecord& r : train_records) {
        if (r.provenance.original()) continue;
        if (test_ids.count(r.specimen_id))
            throw LeakageError("augmented variant (" + r.provenance.str() +
                               ") of test specimen '" + r.specimen_id +
                               "' found in the training set");
    }
}

data::Records compose_corpus(const ExperimentSpec& spec) {
    if (spec.composition == Composition::Set3)
        return data::build_set3(spec.base, spec.extra, spec.per_specimen, spec.set3_seed);
    return spec.base;
}

data::Records compose_fold_train(const ExperimentSpec& spec, const data::Records& corpus,
                                 const eval::Fold& fold) {
    data::Records train;
    train.reserve(fold.train.size());
    for (std::size_t i : fold.train) train.push_back(corpus[i]);

    switch (spec.composition) {
        case Composition::Raw:
        case Composition::Set3:
            break;
        case Composition::X8:
            train = data::augment_x8(train);
            break;
        case Composition::Policy:
            train = data::augment_task2_policy(train, spec.policy);
            break;
    }
    return train;
}

eval::EvalReport run_experiment(const ExperimentSpec& spec) {
    spec.net.validate();
    const data::Records corpus = compose_corpus(spec);
    if (corpus.empty()) throw ConfigError("experiment corpus is empty");

    const eval::SplitPlan plan = spec.scheme == eval::SplitScheme::LOSO
                                     ? eval::plan_loso(corpus)
                                     : eval::plan_kfold(corpus, spec.k, spec.split_seed);

    const std::size_t nfolds = plan.folds.size();
    std::vector<eval::ConfusionMatrix> fold_cm(nfolds,
                                               eval::ConfusionMatrix(spec.net.num_classes));
    std::vector<double> fold_acc(nfolds, 0.0);
    std::vector<char> fold_done(nfolds, 0);
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    // folds are independent; per-fold results land in private slots and are
    // merged in index order afterwards, so scheduling cannot change output
#pragma omp parallel for schedule(dynamic) num_threads(spec.jobs) if (spec.jobs > 1)
    for (std::size_t f = 0; f < nfolds; ++f) {
        if (failed.load()) continue;
        try {
            const eval::Fold& fold = plan.folds[f];
            data::Records train_records = compose_fold_train(spec, corpus, fold);
            data::Records test_records;
            test_records.reserve(fold.test.size());
            for (std::size_t i : fold.test) test_records.push_back(corpus[i]);

            verify_no_augmented_leakage(train_records, test_records);

            TrainConfig tcfg = spec.tcfg;
            tcfg.seed = mix_seed(spec.tcfg.seed, f);  // folds are independent runs
            if (spec.fold_budget_sec > 0.0) {
                const auto deadline = std::chrono::steady_clock::now() +
                                      std::chrono::duration<double>(spec.fold_budget_sec);
                tcfg.should_abort = [deadline] {
                    return std::chrono::steady_clock::now() >= deadline;
                };
            }

            const TrainRun run = train(spec.net, tcfg, train_records);
            if (run.aborted || run.checkpoints.empty()) continue;  // incomplete fold

            std::vector<nn::Parameters> ckpts;
            for (const auto& [epoch, params] : run.checkpoints) ckpts.push_back(params);

            const std::vector<int> preds =
                ensemble_predict_batch(spec.net, ckpts, test_records, spec.tcfg.batch_size);
            std::int64_t correct = 0;
            for (std::size_t i = 0; i < test_records.size(); ++i) {
                fold_cm[f].accumulate(test_records[i].label, preds[i]);
                if (preds[i] == test_records[i].label) ++correct;
            }
            fold_acc[f] = test_records.empty()
                              ? 0.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(test_records.size());
            fold_done[f] = 1;
        } catch (...) {
#pragma omp critical
            {
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    eval::ConfusionMatrix total(spec.net.num_classes);
    std::vector<double> acc;
    std::vector<std::string> incomplete;
    for (std::size_t f = 0; f < nfolds; ++f) {
        if (fold_done[f]) {
            total.merge(fold_cm[f]);
            acc.push_back(fold_acc[f]);
        } else {
            incomplete.push_back(plan.fold_names[f]);
        }
    }
    if (static_cast<std::size_t>(std::count(fold_done.begin(), fold_done.end(), 1)) == 0)
        throw EvalError("no fold completed within the budget; nothing to report");
    return eval::make_report(total, std::move(acc), std::move(incomplete));
}

}  // namespace hep2::train
