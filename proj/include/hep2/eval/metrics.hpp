#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hep2/data/records.hpp"

namespace hep2::eval {

/// K x K prediction counts; rows are true classes, columns predictions,
/// both in the fixed reporting class order.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int num_classes = data::kNumClasses);

    int num_classes() const { return k_; }
    std::int64_t at(int true_label, int predicted) const;
    void accumulate(int true_label, int predicted);
    void merge(const ConfusionMatrix& other);

    std::int64_t row_sum(int true_label) const;
    std::int64_t total() const;

private:
    int k_;
    std::vector<std::int64_t> counts_;
};

/// Per-class correct classification rates in percent. A class with no test
/// records makes the metric undefined and raises EvalError naming it.
std::vector<double> ccr(const ConfusionMatrix& cm);

/// Mean class accuracy: the unweighted mean of per-class CCRs, in percent.
double mca(const std::vector<double>& ccrs);
double mca(const ConfusionMatrix& cm);

/// Row-normalized percentage table, entries rounded to 2 decimals for
/// display. Rows with no counts render as "n/a" with a trailing warning.
std::string render_confusion(const ConfusionMatrix& cm,
                             const std::vector<std::string>& class_names = {});

/// Confusion matrix as delimiter-separated count rows.
std::string confusion_csv(const ConfusionMatrix& cm);

struct EvalReport {
    ConfusionMatrix confusion{data::kNumClasses};
    std::vector<double> ccr_per_class;
    double mca = 0.0;
    std::vector<double> fold_accuracy;
    std::vector<std::string> incomplete_folds;

    /// Byte-stable structured text: per-class CCRs (2 decimals), MCA,
    /// per-fold accuracies, then the rendered confusion table.
    std::string serialize() const;
};

EvalReport make_report(const ConfusionMatrix& cm, std::vector<double> fold_accuracy,
                       std::vector<std::string> incomplete_folds = {});

/// Reads a bare confusion matrix file (whitespace- or comma-separated
/// rows) and returns per-class CCRs. An all-integer matrix is treated as
/// counts and row-normalized; fractional entries mean the rows are already
/// percentages, whose diagonal is read as CCR directly.
std::vector<double> ccr_from_matrix_file(const std::string& path);

}  // namespace hep2::eval
