#include "hep2/eval/split.hpp"

#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hep2/rng.hpp"

namespace hep2::eval {

SplitPlan plan_loso(const data::Records& records) {
    if (records.empty()) throw ConfigError("cannot plan splits for an empty dataset");
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].specimen_id.empty())
            throw DataError("record " + std::to_string(i) + " has no specimen id");

    const std::vector<std::string> order = data::specimen_order(records);
    std::unordered_map<std::string, std::size_t> fold_of;
    for (std::size_t f = 0; f < order.size(); ++f) fold_of[order[f]] = f;

    SplitPlan plan;
    plan.scheme = SplitScheme::LOSO;
    plan.folds.resize(order.size());
    plan.fold_names = order;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t f = fold_of[records[i].specimen_id];
        for (std::size_t g = 0; g < order.size(); ++g) {
            if (g == f)
                plan.folds[g].test.push_back(i);
            else
                plan.folds[g].train.push_back(i);
        }
    }
    return plan;
}

SplitPlan plan_kfold(std::size_t record_count, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold requires k >= 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > record_count)
        throw ConfigError("k = " + std::to_string(k) + " exceeds record count " +
                          std::to_string(record_count));

    std::vector<std::size_t> perm(record_count);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);

    SplitPlan plan;
    plan.scheme = SplitScheme::KFold;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(k));

    // the first (count % k) folds take one extra record
    const std::size_t base = record_count / static_cast<std::size_t>(k);
    const std::size_t extra = record_count % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
        const std::size_t sz = base + (f < extra ? 1 : 0);
        plan.folds[f].test.assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                  perm.begin() + static_cast<std::ptrdiff_t>(pos + sz));
        pos += sz;
        plan.fold_names.push_back("fold" + std::to_string(f));
    }
    for (std::size_t f = 0; f < plan.folds.size(); ++f)
        for (std::size_t g = 0; g < plan.folds.size(); ++g) {
            if (g == f) continue;
            plan.folds[f].train.insert(plan.folds[f].train.end(), plan.folds[g].test.begin(),
                                       plan.folds[g].test.end());
        }
    return plan;
}

SplitPlan plan_kfold(const data::Records& records, int k, std::uint64_t seed) {
    return plan_kfold(records.size(), k, seed);
}

std::string save_split_plan(const SplitPlan& plan) {
    std::ostringstream os;
    if (plan.scheme == SplitScheme::LOSO)
        os << "scheme loso\n";
    else
        os << "scheme kfold k=" << plan.k << " seed=" << plan.seed << "\n";
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        os << "fold " << f << " name=" << plan.fold_names[f] << "\n";
        os << "train";
        for (std::size_t i : plan.folds[f].train) os << " " << i;
        os << "\ntest";
        for (std::size_t i : plan.folds[f].test) os << " " << i;
        os << "\n";
    }
    return os.str();
}

SplitPlan parse_split_plan(const std::string& text) {
    SplitPlan plan;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "scheme") {
            std::string s;
            ls >> s;
            if (s == "loso") {
                plan.scheme = SplitScheme::LOSO;
            } else if (s == "kfold") {
                plan.scheme = SplitScheme::KFold;
                std::string kv;
                while (ls >> kv) {
                    if (kv.rfind("k=", 0) == 0) plan.k = std::stoi(kv.substr(2));
                    if (kv.rfind("seed=", 0) == 0) plan.seed = std::stoull(kv.substr(5));
                }
            } else {
                throw ConfigError("split plan line " + std::to_string(line_no) +
                                  ": unknown scheme '" + s + "'");
            }
        } else if (tag == "fold") {
            plan.folds.emplace_back();
            std::size_t idx;
            std::string name;
            ls >> idx >> name;
            plan.fold_names.push_back(name.rfind("name=", 0) == 0 ? name.substr(5) : name);
        } else if (tag == "train" || tag == "test") {
            if (plan.folds.empty())
                throw ConfigError("split plan line " + std::to_string(line_no) +
                                  ": indices before any fold");
            auto& dst = tag == "train" ? plan.folds.back().train : plan.folds.back().test;
            std::size_t i;
            while (ls >> i) dst.push_back(i);
        } else {
            throw ConfigError("split plan line " + std::to_string(line_no) + ": unknown tag '" +
                              tag + "'");
        }
    }
    return plan;
}

}  // namespace hep2::eval
