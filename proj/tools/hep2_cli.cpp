// Command-line front end: extract, augment, synth, split, train, eval,
// report. All artifacts land under --out (or $HEP2_OUT_ROOT/<subcommand>);
// a failed run's partial outputs are moved to <out>/quarantine.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hep2/data/augment.hpp"
#include "hep2/data/extract.hpp"
#include "hep2/data/image.hpp"
#include "hep2/data/manifest.hpp"
#include "hep2/eval/metrics.hpp"
#include "hep2/eval/split.hpp"
#include "hep2/nn/params.hpp"
#include "hep2/synth/generator.hpp"
#include "hep2/train/exp_config.hpp"
#include "hep2/train/experiment.hpp"

namespace fs = std::filesystem;
using namespace hep2;

namespace {

void log_line(const std::string& msg) { std::cout << msg << "\n"; }

std::string resolve_out(const std::string& flag, const std::string& subcommand) {
    if (!flag.empty()) return flag;
    if (const char* root = std::getenv("HEP2_OUT_ROOT"))
        return (fs::path(root) / subcommand).string();
    return subcommand + "-out";
}

// Runs body writing into <out>/.staging, then promotes the results into
// <out> on success or moves them to <out>/quarantine on failure.
template <class Body>
void staged_run(const std::string& out_dir, const Body& body) {
    const fs::path out(out_dir);
    const fs::path staging = out / ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);
    try {
        body(staging.string());
    } catch (...) {
        const fs::path quarantine = out / "quarantine";
        fs::remove_all(quarantine);
        fs::rename(staging, quarantine);
        log_line("event run failed; partial outputs moved to " + quarantine.string());
        throw;
    }
    for (const fs::directory_entry& e : fs::directory_iterator(staging)) {
        const fs::path target = out / e.path().filename();
        fs::remove_all(target);
        fs::rename(e.path(), target);
    }
    fs::remove_all(staging);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path.string());
    f << text;
}

data::Records load_records(const std::string& manifest) {
    log_line("event loading manifest " + manifest);
    data::Records r = data::load_manifest(manifest);
    log_line("event loaded " + std::to_string(r.size()) + " records");
    return r;
}

int find_label_in_stem(const std::string& stem) {
    // filenames look like <specimen_id>_<ClassName>; the label is the
    // trailing token
    const auto us = stem.rfind('_');
    if (us == std::string::npos) return -1;
    const std::string tail = stem.substr(us + 1);
    for (int i = 0; i < data::kNumClasses; ++i)
        if (tail == data::kClassNames[static_cast<std::size_t>(i)]) return i;
    return -1;
}

std::map<std::string, int> load_label_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open labels file: " + path);
    std::map<std::string, int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError("labels line " + std::to_string(line_no) +
                            ": expected specimen_id,class");
        labels[line.substr(0, comma)] = data::label_from_name(line.substr(comma + 1));
    }
    return labels;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::string specimens, masks, labels, out;
    int box = 77;
    int resize = 0;  // 0 = keep crop size
};

void run_extract(const ExtractArgs& a) {
    std::map<std::string, int> label_map;
    if (!a.labels.empty()) label_map = load_label_csv(a.labels);

    std::vector<fs::path> files;
    for (const fs::directory_entry& e : fs::directory_iterator(a.specimens)) {
        const std::string ext = e.path().extension().string();
        if (ext == ".png" || ext == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .png/.pgm specimens in " + a.specimens);

    staged_run(a.out, [&](const std::string& staging) {
        data::Records all;
        for (const fs::path& f : files) {
            const std::string stem = f.stem().string();
            data::SpecimenImage spec;
            spec.pixels = data::load_image(f.string());

            const int stem_label = find_label_in_stem(stem);
            if (stem_label >= 0) {
                spec.label = stem_label;
                spec.specimen_id = stem.substr(0, stem.rfind('_'));
            } else if (label_map.count(stem)) {
                spec.label = label_map[stem];
                spec.specimen_id = stem;
            } else {
                throw DataError("no label for specimen '" + stem +
                                "': name it <id>_<Class> or pass --labels");
            }

            const fs::path mask_path = fs::path(a.masks) / f.filename();
            if (!fs::exists(mask_path))
                throw DataError("missing mask for specimen: " + mask_path.string());
            const data::SegmentationMask mask =
                data::mask_from_image(data::load_image(mask_path.string()));

            data::Records cells = data::extract_cells(spec, mask, a.box);
            if (a.resize > 0)
                for (data::CellRecord& c : cells) c = data::resize_bilinear(c, a.resize);
            log_line("event specimen " + spec.specimen_id + ": " +
                     std::to_string(cells.size()) + " cells");
            all.insert(all.end(), cells.begin(), cells.end());
        }
        data::write_manifest(all, staging);
        log_line("event wrote " + std::to_string(all.size()) + " cells");
    });
}

struct AugmentArgs {
    std::string manifest, out, policy;
    bool x8 = false;
};

void run_augment(const AugmentArgs& a) {
    if (a.x8 == a.policy.empty())
        throw ConfigError("augment needs exactly one of --x8 or --policy");
    data::Records records = load_records(a.manifest);
    data::Records augmented =
        a.x8 ? data::augment_x8(records)
             : data::augment_task2_policy(records, data::parse_policy(a.policy));
    staged_run(a.out, [&](const std::string& staging) {
        data::write_manifest(augmented, staging);
        log_line("event wrote " + std::to_string(augmented.size()) + " records");
    });
}

struct SynthArgs {
    std::string out;
    synth::SynthSpec spec;
};

void run_synth(const SynthArgs& a) {
    const data::Records records = synth::generate(a.spec);
    staged_run(a.out, [&](const std::string& staging) {
        data::write_manifest(records, staging);
        const auto counts = data::class_counts(records);
        std::ostringstream os;
        os << "event generated " << records.size() << " cells; per class:";
        for (int i = 0; i < a.spec.classes; ++i)
            os << " " << counts[static_cast<std::size_t>(i)];
        log_line(os.str());
    });
}

struct SplitArgs {
    std::string manifest, scheme = "loso", out;
    int k = 5;
    std::uint64_t seed = 0;
};

void run_split(const SplitArgs& a) {
    const data::DatasetManifest manifest = data::read_manifest_index(a.manifest);
    data::Records stubs;  // split planning needs specimen ids only
    stubs.reserve(manifest.entries.size());
    for (const data::ManifestEntry& e : manifest.entries) {
        data::CellRecord r;
        r.label = e.label;
        r.specimen_id = e.specimen_id;
        stubs.push_back(std::move(r));
    }

    eval::SplitPlan plan;
    if (a.scheme == "loso")
        plan = eval::plan_loso(stubs);
    else if (a.scheme == "kfold")
        plan = eval::plan_kfold(stubs, a.k, a.seed);
    else
        throw ConfigError("--scheme must be loso or kfold, got '" + a.scheme + "'");

    staged_run(a.out, [&](const std::string& staging) {
        write_text(fs::path(staging) / "plan.txt", eval::save_split_plan(plan));
        log_line("event wrote " + std::to_string(plan.folds.size()) + " folds");
    });
}

struct TrainArgs {
    std::string manifest, net = "default10", out, checkpoint_epochs;
    train::TrainConfig tcfg;
};

void run_train(const TrainArgs& a) {
    const nn::NetworkConfig net = nn::resolve_network_config(a.net);
    train::TrainConfig tcfg = a.tcfg;
    if (!a.checkpoint_epochs.empty()) {
        tcfg.checkpoint_epochs.clear();
        std::istringstream ss(a.checkpoint_epochs);
        std::string item;
        while (std::getline(ss, item, ',')) tcfg.checkpoint_epochs.push_back(std::stoi(item));
    }

    const data::Records records = load_records(a.manifest);
    const train::TrainRun run = train::train(net, tcfg, records);

    staged_run(a.out, [&](const std::string& staging) {
        std::ostringstream loss_csv;
        loss_csv << "epoch,loss,accuracy\n";
        char buf[64];
        for (std::size_t e = 0; e < run.epoch_loss.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", e + 1, run.epoch_loss[e],
                          run.epoch_accuracy[e]);
            loss_csv << buf;
        }
        write_text(fs::path(staging) / "loss.csv", loss_csv.str());
        write_text(fs::path(staging) / "network.cfg", net.serialize());
        for (const auto& [epoch, params] : run.checkpoints) {
            std::snprintf(buf, sizeof(buf), "epoch_%03d.ckpt", epoch);
            nn::save_checkpoint((fs::path(staging) / buf).string(), net, params);
            log_line(std::string("event checkpoint ") + buf);
        }
    });
    for (std::size_t e = 0; e < run.epoch_loss.size(); ++e) {
        char line[96];
        std::snprintf(line, sizeof(line), "event epoch %zu loss %.6f acc %.4f", e + 1,
                      run.epoch_loss[e], run.epoch_accuracy[e]);
        log_line(line);
    }
}

struct EvalArgs {
    std::string confusion, manifest, net = "default10", checkpoints, out;
    int batch = 200;
};

void run_eval(const EvalArgs& a) {
    if (!a.confusion.empty()) {
        const std::vector<double> ccrs = eval::ccr_from_matrix_file(a.confusion);
        std::ostringstream os;
        os << "ccr:";
        char buf[32];
        for (double c : ccrs) {
            std::snprintf(buf, sizeof(buf), " %.2f", c);
            os << buf;
        }
        log_line(os.str());
        std::snprintf(buf, sizeof(buf), "MCA %.2f", eval::mca(ccrs));
        log_line(buf);
        return;
    }

    if (a.manifest.empty() || a.checkpoints.empty())
        throw ConfigError("eval needs --confusion, or --manifest with --checkpoints");
    const nn::NetworkConfig net = nn::resolve_network_config(a.net);
    std::vector<nn::Parameters> ckpts;
    std::istringstream ss(a.checkpoints);
    std::string path;
    while (std::getline(ss, path, ','))
        ckpts.push_back(nn::load_checkpoint(path, net));

    const data::Records records = load_records(a.manifest);
    const std::vector<int> preds = train::ensemble_predict_batch(net, ckpts, records, a.batch);

    eval::ConfusionMatrix cm(net.num_classes);
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        cm.accumulate(records[i].label, preds[i]);
        if (preds[i] == records[i].label) ++correct;
    }
    const eval::EvalReport report = eval::make_report(
        cm, {records.empty() ? 0.0
                             : static_cast<double>(correct) / static_cast<double>(records.size())});
    std::cout << report.serialize();
    if (!a.out.empty())
        staged_run(a.out, [&](const std::string& staging) {
            write_text(fs::path(staging) / "report.txt", report.serialize());
            write_text(fs::path(staging) / "confusion.csv", eval::confusion_csv(cm));
        });
}

struct ReportArgs {
    std::string config, out;
    int jobs = 0;  // 0 = take from config
};

void run_report(const ReportArgs& a) {
    train::ExperimentFile file = train::load_experiment_config(a.config);
    if (!a.out.empty()) file.out_dir = a.out;
    if (file.out_dir.empty()) file.out_dir = resolve_out("", "report");
    if (a.jobs > 0) file.spec.jobs = a.jobs;

    file.spec.net = nn::resolve_network_config(file.network);
    file.spec.base = load_records(file.task1_manifest);
    if (!file.task2_manifest.empty()) file.spec.extra = load_records(file.task2_manifest);

    const std::string resolved = train::resolved_experiment_config(file);
    std::istringstream rs(resolved);
    std::string rline;
    while (std::getline(rs, rline)) log_line("config " + rline);

    const eval::EvalReport report = train::run_experiment(file.spec);
    staged_run(file.out_dir, [&](const std::string& staging) {
        write_text(fs::path(staging) / "report.txt", report.serialize());
        write_text(fs::path(staging) / "confusion.csv", eval::confusion_csv(report.confusion));
        write_text(fs::path(staging) / "resolved.cfg", resolved);
    });
    std::cout << report.serialize();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HEp-2 cell classification experiment toolkit"};
    app.require_subcommand(1);

    ExtractArgs xa;
    CLI::App* extract = app.add_subcommand(
        "extract", "Extract cell crops from specimen images and masks");
    extract->add_option("--specimens", xa.specimens, "Directory of specimen images")->required();
    extract->add_option("--masks", xa.masks, "Directory of segmentation masks (same filenames)")
        ->required();
    extract->add_option("--labels", xa.labels, "CSV of specimen_id,class for unlabeled names");
    extract->add_option("--box", xa.box, "Crop box side (default 77)");
    extract->add_option("--resize", xa.resize, "Resize crops to this side (0 = keep)");
    extract->add_option("--out", xa.out, "Output directory");

    AugmentArgs aa;
    CLI::App* augment = app.add_subcommand("augment", "Apply a geometric augmentation policy");
    augment->add_option("--manifest", aa.manifest, "Input manifest.csv")->required();
    augment->add_flag("--x8", aa.x8, "Four rotations, each also mirrored");
    augment->add_option("--policy", aa.policy,
                        "Per-class multipliers, e.g. Homogeneous:2,...,Golgi:8");
    augment->add_option("--out", aa.out, "Output directory");

    SynthArgs sa;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic specimen dataset");
    synth_cmd->add_option("--specimens-per-class", sa.spec.specimens_per_class, "Default 8");
    synth_cmd->add_option("--cells", sa.spec.cells_per_specimen, "Cells per specimen (default 40)");
    synth_cmd->add_option("--classes", sa.spec.classes, "Number of classes (default 6)");
    synth_cmd->add_option("--correlation", sa.spec.intra_specimen_correlation,
                          "Intra-specimen correlation in [0,1] (default 0.8)");
    synth_cmd->add_option("--noise", sa.spec.noise_std, "Pixel noise std (default 0.03)");
    synth_cmd->add_option("--seed", sa.spec.seed, "Generator seed");
    synth_cmd->add_option("--max-shift", sa.spec.max_shift, "Translation jitter (default 5)");
    synth_cmd->add_flag("!--no-rotation", sa.spec.random_orientation, "Disable rotation jitter");
    synth_cmd->add_option("--out", sa.out, "Output directory");

    SplitArgs pa;
    CLI::App* split = app.add_subcommand("split", "Write a LOSO or k-fold split plan");
    split->add_option("--manifest", pa.manifest, "Input manifest.csv")->required();
    split->add_option("--scheme", pa.scheme, "loso or kfold (default loso)");
    split->add_option("--k", pa.k, "Folds for kfold (default 5)");
    split->add_option("--seed", pa.seed, "Shuffle seed for kfold");
    split->add_option("--out", pa.out, "Output directory");

    TrainArgs ta;
    CLI::App* train_cmd = app.add_subcommand("train", "Train on every record of a manifest");
    train_cmd->add_option("--manifest", ta.manifest, "Training manifest.csv")->required();
    train_cmd->add_option("--net", ta.net, "Network config: default10, tiny, or a path");
    train_cmd->add_option("--epochs", ta.tcfg.epochs, "Default 50");
    train_cmd->add_option("--batch", ta.tcfg.batch_size, "Default 200");
    train_cmd->add_option("--lr", ta.tcfg.learning_rate, "Default 0.002");
    train_cmd->add_option("--seed", ta.tcfg.seed, "Training seed");
    train_cmd->add_option("--checkpoint-epochs", ta.checkpoint_epochs,
                          "Comma list; default = last three epochs");
    train_cmd->add_option("--out", ta.out, "Output directory");

    EvalArgs ea;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a confusion matrix or a checkpoint ensemble");
    eval_cmd->add_option("--confusion", ea.confusion,
                         "Confusion matrix file: integer counts, or row percentages");
    eval_cmd->add_option("--manifest", ea.manifest, "Test manifest.csv");
    eval_cmd->add_option("--net", ea.net, "Network config: default10, tiny, or a path");
    eval_cmd->add_option("--checkpoints", ea.checkpoints, "Comma list of .ckpt files");
    eval_cmd->add_option("--batch", ea.batch, "Prediction batch size");
    eval_cmd->add_option("--out", ea.out, "Optional output directory for report files");

    ReportArgs ra;
    CLI::App* report = app.add_subcommand("report", "Run a full split/train/eval experiment");
    report->add_option("--config", ra.config, "Experiment config file")->required();
    report->add_option("--out", ra.out, "Output directory (overrides config)");
    report->add_option("--jobs", ra.jobs, "Parallel folds (default from config, 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*extract) {
            xa.out = resolve_out(xa.out, "extract");
            log_line("config out = " + xa.out);
            run_extract(xa);
        } else if (*augment) {
            aa.out = resolve_out(aa.out, "augment");
            log_line("config out = " + aa.out);
            run_augment(aa);
        } else if (*synth_cmd) {
            sa.out = resolve_out(sa.out, "synth");
            std::ostringstream cfg;
            cfg << "config out = " << sa.out << "\nconfig specimens_per_class = "
                << sa.spec.specimens_per_class << "\nconfig cells = " << sa.spec.cells_per_specimen
                << "\nconfig classes = " << sa.spec.classes
                << "\nconfig correlation = " << sa.spec.intra_specimen_correlation
                << "\nconfig noise = " << sa.spec.noise_std << "\nconfig seed = " << sa.spec.seed;
            log_line(cfg.str());
            run_synth(sa);
        } else if (*split) {
            pa.out = resolve_out(pa.out, "split");
            log_line("config out = " + pa.out + ", scheme = " + pa.scheme);
            run_split(pa);
        } else if (*train_cmd) {
            ta.out = resolve_out(ta.out, "train");
            std::ostringstream cfg;
            cfg << "config out = " << ta.out << ", net = " << ta.net
                << ", epochs = " << ta.tcfg.epochs << ", batch = " << ta.tcfg.batch_size
                << ", lr = " << ta.tcfg.learning_rate << ", seed = " << ta.tcfg.seed;
            log_line(cfg.str());
            run_train(ta);
        } else if (*eval_cmd) {
            run_eval(ea);
        } else if (*report) {
            run_report(ra);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 1;
    } catch (const LeakageError& e) {
        std::cerr << "leakage error: " << e.what() << "\n";
        return 1;
    } catch (const EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
