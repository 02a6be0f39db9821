#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hadr {

struct ConfusionCounts {
    long tp = 0;
    long fn = 0;
    long fp = 0;
    long tn = 0;
};

// Exact counts; throws on length mismatch or non-binary values.
ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Degenerate denominators yield an absent value, never a silent 0.
std::optional<double> recall(const ConfusionCounts& c);
std::optional<double> tnr(const ConfusionCounts& c);
std::optional<double> g_mean(const ConfusionCounts& c);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0; // predict positive when score >= threshold
};

struct RocResult {
    double auc = 0.0;
    std::vector<RocPoint> points; // sorted by fpr, from (0,0) to (1,1)
};

// AUC by the Mann-Whitney rank statistic: the probability that a random
// positive outscores a random negative, ties counted 1/2. The emitted ROC
// points (one per distinct score) integrate to the same area.
RocResult roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// Best achievable G-mean over the ROC sweep and the threshold reaching it.
// Diagnostic only; headline numbers always use the fixed 0.5 vote rule.
struct ThresholdSweep {
    double best_g_mean = 0.0;
    double best_threshold = 0.0;
};
ThresholdSweep best_g_mean_threshold(const RocResult& roc);

// "fpr,tpr,threshold" with a header line.
std::string roc_csv(const std::vector<RocPoint>& points);

struct EvalReport {
    std::string dataset;
    std::uint64_t seed = 0;
    ConfusionCounts counts;
    double recall = 0.0;
    double tnr = 0.0;
    double g_mean = 0.0;
    double auc = 0.0;
    std::vector<RocPoint> roc;
    double g_mean_at_best_threshold = 0.0; // see ThresholdSweep
    double best_threshold = 0.0;
};

} // namespace hadr
