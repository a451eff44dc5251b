#include "hep2/train/exp_config.hpp"

#include <fstream>
#include <sstream>

namespace hep2::train {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(trim(item)));
    return out;
}

}  // namespace

ExperimentFile parse_experiment_config(const std::string& text) {
    ExperimentFile file;
    ExperimentSpec& spec = file.spec;
    bool saw_experiment = false;
    std::string augment = "none";

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("experiment config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("experiment config line " + std::to_string(line_no) +
                              ": empty value for '" + key + "'");

        try {
            if (key == "experiment") {
                spec = ExperimentSpec::named(value);
                saw_experiment = true;
            } else if (key == "task1" || key == "manifest") {
                file.task1_manifest = value;
            } else if (key == "task2") {
                file.task2_manifest = value;
            } else if (key == "network") {
                file.network = value;
            } else if (key == "epochs") {
                spec.tcfg.epochs = std::stoi(value);
            } else if (key == "batch") {
                spec.tcfg.batch_size = std::stoi(value);
            } else if (key == "lr") {
                spec.tcfg.learning_rate = std::stof(value);
            } else if (key == "seed") {
                spec.tcfg.seed = std::stoull(value);
            } else if (key == "checkpoint_epochs") {
                spec.tcfg.checkpoint_epochs = parse_int_list(value);
            } else if (key == "split") {
                if (value == "loso")
                    spec.scheme = eval::SplitScheme::LOSO;
                else if (value == "kfold")
                    spec.scheme = eval::SplitScheme::KFold;
                else
                    throw ConfigError("split must be loso or kfold, got '" + value + "'");
            } else if (key == "k") {
                spec.k = std::stoi(value);
            } else if (key == "split_seed") {
                spec.split_seed = std::stoull(value);
            } else if (key == "augment") {
                if (value != "none" && value != "x8" && value != "policy")
                    throw ConfigError("augment must be none, x8 or policy, got '" + value + "'");
                augment = value;
            } else if (key == "policy") {
                spec.policy = data::parse_policy(value);
            } else if (key == "per_specimen") {
                spec.per_specimen = std::stoi(value);
            } else if (key == "set3_seed") {
                spec.set3_seed = std::stoull(value);
            } else if (key == "jobs") {
                spec.jobs = std::stoi(value);
            } else if (key == "fold_budget_sec") {
                spec.fold_budget_sec = std::stod(value);
            } else if (key == "out") {
                file.out_dir = value;
            } else {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const ConfigError& e) {
            throw ConfigError("experiment config line " + std::to_string(line_no) + ": " +
                              e.what());
        } catch (const std::exception&) {
            throw ConfigError("experiment config line " + std::to_string(line_no) +
                              ": bad value '" + value + "' for '" + key + "'");
        }
    }

    if (!saw_experiment) throw ConfigError("experiment config: missing 'experiment' key");
    if (spec.name == "custom") {
        if (augment == "x8") spec.composition = Composition::X8;
        if (augment == "policy") {
            spec.composition = Composition::Policy;
            if (spec.policy.empty()) spec.policy = data::default_task2_policy();
        }
    }
    if (file.task1_manifest.empty())
        throw ConfigError("experiment config: missing 'task1' (or 'manifest') key");
    if (spec.composition == Composition::Set3 && file.task2_manifest.empty())
        throw ConfigError("experiment config: set-3 requires a 'task2' manifest");
    return file;
}

ExperimentFile load_experiment_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open experiment config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string resolved_experiment_config(const ExperimentFile& file) {
    const ExperimentSpec& s = file.spec;
    std::ostringstream os;
    os << "experiment = " << s.name << "\n";
    os << "task1 = " << file.task1_manifest << "\n";
    if (!file.task2_manifest.empty()) os << "task2 = " << file.task2_manifest << "\n";
    os << "network = " << file.network << "\n";
    os << "epochs = " << s.tcfg.epochs << "\n";
    os << "batch = " << s.tcfg.batch_size << "\n";
    os << "lr = " << s.tcfg.learning_rate << "\n";
    os << "seed = " << s.tcfg.seed << "\n";
    os << "checkpoint_epochs =";
    for (int e : s.tcfg.resolved_checkpoint_epochs()) os << " " << e;
    os << "\n";
    os << "split = " << (s.scheme == eval::SplitScheme::LOSO ? "loso" : "kfold") << "\n";
    if (s.scheme == eval::SplitScheme::KFold)
        os << "k = " << s.k << "\nsplit_seed = " << s.split_seed << "\n";
    switch (s.composition) {
        case Composition::Raw: os << "augment = none\n"; break;
        case Composition::X8: os << "augment = x8\n"; break;
        case Composition::Policy: {
            os << "augment = policy\npolicy = ";
            bool first = true;
            for (const auto& [label, mult] : s.policy) {
                os << (first ? "" : ",") << data::name_from_label(label) << ":" << mult;
                first = false;
            }
            os << "\n";
            break;
        }
        case Composition::Set3:
            os << "per_specimen = " << s.per_specimen << "\nset3_seed = " << s.set3_seed << "\n";
            break;
    }
    os << "jobs = " << s.jobs << "\n";
    os << "fold_budget_sec = " << s.fold_budget_sec << "\n";
    if (!file.out_dir.empty()) os << "out = " << file.out_dir << "\n";
    return os.str();
}

}  // namespace hep2::train
