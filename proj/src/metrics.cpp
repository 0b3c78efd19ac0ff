#include "nsd/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace nsd::metrics {

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size())
        throw LengthMismatch("confusion: predictions and labels differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int p = preds[i], l = labels[i];
        if ((p != 0 && p != 1) || (l != 0 && l != 1))
            throw NonBinaryValue("confusion: entries must be 0 or 1");
        if (l == 1)
            (p == 1 ? c.tp : c.fn)++;
        else
            (p == 1 ? c.fp : c.tn)++;
    }
    return c;
}

MetricReport metrics(const ConfusionCounts& counts) {
    if (counts.total() == 0) throw EmptyEvaluation("metrics: no windows evaluated");
    MetricReport r;
    r.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());

    // class 1 straight, class 0 with polarity flipped
    const long long tp[2] = {counts.tn, counts.tp};
    const long long fp[2] = {counts.fn, counts.fp};
    const long long fn[2] = {counts.fp, counts.fn};
    for (int cls = 0; cls < 2; ++cls) {
        if (tp[cls] + fp[cls] > 0)
            r.precision[cls] = static_cast<double>(tp[cls]) / static_cast<double>(tp[cls] + fp[cls]);
        else
            r.precision_degenerate[cls] = true;
        if (tp[cls] + fn[cls] > 0)
            r.recall[cls] = static_cast<double>(tp[cls]) / static_cast<double>(tp[cls] + fn[cls]);
        else
            r.recall_degenerate[cls] = true;
        const double denom = r.precision[cls] + r.recall[cls];
        if (!r.precision_degenerate[cls] && !r.recall_degenerate[cls] && denom > 0.0)
            r.f1[cls] = 2.0 * r.precision[cls] * r.recall[cls] / denom;
        else
            r.f1_degenerate[cls] = true;
    }
    return r;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw LengthMismatch("auc: scores and labels differ in length");
    long long n1 = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw NonBinaryValue("auc: labels must be 0 or 1");
        n1 += l;
    }
    const long long n0 = static_cast<long long>(labels.size()) - n1;
    if (n0 == 0 || n1 == 0) throw SingleClassLabels("auc: both classes must be present");

    // Mann-Whitney via midranks: ties contribute half, exactly the
    // trapezoidal area under the all-thresholds ROC.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum1 = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            if (labels[order[t]] == 1) rank_sum1 += midrank;
        i = j + 1;
    }
    const double u1 = rank_sum1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    return u1 / (static_cast<double>(n0) * static_cast<double>(n1));
}

}  // namespace nsd::metrics
