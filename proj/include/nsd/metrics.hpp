#pragma once

#include <array>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd::metrics {

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    long long total() const { return tp + fp + tn + fn; }
};

/// Seizure = class 1: tp = seizure classified as seizure, fp = non-seizure
/// classified as seizure, and so on. Throws LengthMismatch, NonBinaryValue.
ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels);

/// Per-class precision/recall/F1 plus accuracy. Zero-denominator slots come
/// back as 0 with the matching degenerate flag set, never NaN.
struct MetricReport {
    double accuracy = 0.0;
    std::array<double, 2> precision{0.0, 0.0};
    std::array<double, 2> recall{0.0, 0.0};
    std::array<double, 2> f1{0.0, 0.0};
    double auc = 0.0;
    std::array<bool, 2> precision_degenerate{false, false};
    std::array<bool, 2> recall_degenerate{false, false};
    std::array<bool, 2> f1_degenerate{false, false};

    /// Recall of the seizure class; the clinically decisive number.
    double sensitivity() const { return recall[1]; }
};

/// Throws EmptyEvaluation when no windows were counted.
MetricReport metrics(const ConfusionCounts& counts);

/// Area under the ROC over all distinct thresholds of the class-1 scores;
/// equals the tie-corrected Mann-Whitney pair statistic. Throws
/// SingleClassLabels, LengthMismatch.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace nsd::metrics
