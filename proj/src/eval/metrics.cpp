#include "hep2/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hep2::eval {

ConfusionMatrix::ConfusionMatrix(int num_classes) : k_(num_classes) {
    if (num_classes <= 0) throw ConfigError("confusion matrix needs a positive class count");
    counts_.assign(static_cast<std::size_t>(k_) * k_, 0);
}

std::int64_t ConfusionMatrix::at(int t, int p) const {
    return counts_[static_cast<std::size_t>(t) * k_ + p];
}

void ConfusionMatrix::accumulate(int t, int p) {
    if (t < 0 || t >= k_ || p < 0 || p >= k_)
        throw EvalError("confusion accumulate: label pair (" + std::to_string(t) + ", " +
                        std::to_string(p) + ") out of range [0, " + std::to_string(k_) + ")");
    ++counts_[static_cast<std::size_t>(t) * k_ + p];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.k_ != k_) throw EvalError("confusion merge: class count mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::int64_t ConfusionMatrix::row_sum(int t) const {
    std::int64_t s = 0;
    for (int p = 0; p < k_; ++p) s += at(t, p);
    return s;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t s = 0;
    for (std::int64_t c : counts_) s += c;
    return s;
}

std::vector<double> ccr(const ConfusionMatrix& cm) {
    std::vector<double> out(static_cast<std::size_t>(cm.num_classes()));
    for (int t = 0; t < cm.num_classes(); ++t) {
        const std::int64_t row = cm.row_sum(t);
        if (row == 0) {
            const std::string name = t < data::kNumClasses ? data::kClassNames[static_cast<std::size_t>(t)]
                                                           : std::to_string(t);
            throw EvalError("class " + name + " absent from all test folds; MCA undefined");
        }
        out[static_cast<std::size_t>(t)] =
            100.0 * static_cast<double>(cm.at(t, t)) / static_cast<double>(row);
    }
    return out;
}

double mca(const std::vector<double>& ccrs) {
    if (ccrs.empty()) throw EvalError("MCA of an empty CCR vector is undefined");
    double s = 0.0;
    for (double c : ccrs) s += c;
    return s / static_cast<double>(ccrs.size());
}

double mca(const ConfusionMatrix& cm) { return mca(ccr(cm)); }

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::vector<std::string> default_names(int k) {
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i)
        names.push_back(i < data::kNumClasses ? data::kClassNames[static_cast<std::size_t>(i)]
                                              : "class" + std::to_string(i));
    return names;
}

}  // namespace

std::string render_confusion(const ConfusionMatrix& cm, const std::vector<std::string>& names_in) {
    const int k = cm.num_classes();
    const std::vector<std::string> names = names_in.empty() ? default_names(k) : names_in;

    std::size_t name_w = 0;
    for (const std::string& n : names) name_w = std::max(name_w, n.size());

    std::ostringstream os;
    std::vector<int> empty_rows;
    os << std::string(name_w, ' ');
    for (int p = 0; p < k; ++p) os << "  " << names[static_cast<std::size_t>(p)];
    os << "\n";
    for (int t = 0; t < k; ++t) {
        const std::string& n = names[static_cast<std::size_t>(t)];
        os << n << std::string(name_w - n.size(), ' ');
        const std::int64_t row = cm.row_sum(t);
        for (int p = 0; p < k; ++p) {
            os << "  ";
            if (row == 0) {
                os << std::string(names[static_cast<std::size_t>(p)].size() > 3
                                      ? names[static_cast<std::size_t>(p)].size() - 3
                                      : 0,
                                  ' ')
                   << "n/a";
            } else {
                const std::string v =
                    fmt2(100.0 * static_cast<double>(cm.at(t, p)) / static_cast<double>(row));
                const std::size_t w = names[static_cast<std::size_t>(p)].size();
                os << (v.size() < w ? std::string(w - v.size(), ' ') : "") << v;
            }
        }
        os << "\n";
        if (row == 0) empty_rows.push_back(t);
    }
    for (int t : empty_rows)
        os << "# warning: class " << names[static_cast<std::size_t>(t)]
           << " has no test records\n";
    return os.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream os;
    const std::vector<std::string> names = default_names(cm.num_classes());
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << "\n";
    for (int t = 0; t < cm.num_classes(); ++t) {
        for (int p = 0; p < cm.num_classes(); ++p) os << (p ? "," : "") << cm.at(t, p);
        os << "\n";
    }
    return os.str();
}

std::string EvalReport::serialize() const {
    std::ostringstream os;
    os << "classes:";
    for (int i = 0; i < confusion.num_classes(); ++i)
        os << " "
           << (i < data::kNumClasses ? data::kClassNames[static_cast<std::size_t>(i)]
                                     : "class" + std::to_string(i));
    os << "\n";
    os << "ccr:";
    for (double c : ccr_per_class) os << " " << fmt2(c);
    os << "\n";
    os << "mca: " << fmt2(mca) << "\n";
    os << "folds: " << fold_accuracy.size() << "\n";
    os << "fold_accuracy:";
    for (double a : fold_accuracy) os << " " << fmt4(a);
    os << "\n";
    if (!incomplete_folds.empty()) {
        os << "incomplete_folds:";
        for (const std::string& f : incomplete_folds) os << " " << f;
        os << "\n";
    }
    os << "confusion_counts:\n" << confusion_csv(confusion);
    os << "confusion_percent:\n" << render_confusion(confusion);
    return os.str();
}

EvalReport make_report(const ConfusionMatrix& cm, std::vector<double> fold_accuracy,
                       std::vector<std::string> incomplete_folds) {
    EvalReport r;
    r.confusion = cm;
    r.ccr_per_class = ccr(cm);
    r.mca = eval::mca(r.ccr_per_class);
    r.fold_accuracy = std::move(fold_accuracy);
    r.incomplete_folds = std::move(incomplete_folds);
    return r;
}

std::vector<double> ccr_from_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open confusion matrix file: " + path);

    std::vector<std::vector<double>> rows;
    bool fractional = false;
    std::string line;
    while (std::getline(f, line)) {
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) {
            row.push_back(v);
            if (v != std::floor(v)) fractional = true;
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("confusion matrix file is empty: " + path);
    const std::size_t k = rows.size();
    for (const auto& row : rows)
        if (row.size() != k)
            throw DataError("confusion matrix file is not square: " + path);

    std::vector<double> ccrs(k);
    for (std::size_t t = 0; t < k; ++t) {
        if (fractional) {
            // rows are already percentages; the diagonal is the CCR
            ccrs[t] = rows[t][t];
        } else {
            double row_sum = 0.0;
            for (double x : rows[t]) row_sum += x;
            if (row_sum == 0.0)
                throw EvalError("class " + std::to_string(t) +
                                " has an empty row; MCA undefined");
            ccrs[t] = 100.0 * rows[t][t] / row_sum;
        }
    }
    return ccrs;
}

}  // namespace hep2::eval
