#include "hadr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hadr/errors.hpp"

namespace hadr {

ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty()) {
        throw DataError("confusion: label vectors must have equal, nonzero length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
            throw DataError("confusion: labels must be 0 or 1");
        }
        if (t == 1) {
            p == 1 ? ++c.tp : ++c.fn;
        } else {
            p == 1 ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

std::optional<double> recall(const ConfusionCounts& c) {
    const long denom = c.tp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> tnr(const ConfusionCounts& c) {
    const long denom = c.tn + c.fp;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tn) / static_cast<double>(denom);
}

std::optional<double> g_mean(const ConfusionCounts& c) {
    const auto r = recall(c);
    const auto t = tnr(c);
    if (!r || !t) return std::nullopt;
    return std::sqrt(*r * *t);
}

RocResult roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size() || y_true.empty()) {
        throw DataError("roc_auc: labels and scores must have equal, nonzero length");
    }
    long n_pos = 0, n_neg = 0;
    for (int t : y_true) {
        if (t != 0 && t != 1) throw DataError("roc_auc: labels must be 0 or 1");
        t == 1 ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("roc_auc: AUC undefined, both classes must be present");
    }

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Doubled average ranks stay integral under ties, so the rank sum is
    // exact; auc = (2U) / (2 * n_pos * n_neg).
    long long rank2_pos_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const long long rank2 = static_cast<long long>(i) + static_cast<long long>(j) + 1;
        for (std::size_t k = i; k < j; ++k) {
            if (y_true[order[k]] == 1) rank2_pos_sum += rank2;
        }
        i = j;
    }
    const long long u2 = rank2_pos_sum - static_cast<long long>(n_pos) * (n_pos + 1);

    RocResult res;
    res.auc = static_cast<double>(u2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));

    // Threshold sweep, highest score first; one point per distinct score.
    res.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    long tp = 0, fp = 0;
    std::size_t k = order.size();
    while (k > 0) {
        const double thr = scores[order[k - 1]];
        while (k > 0 && scores[order[k - 1]] == thr) {
            y_true[order[k - 1]] == 1 ? ++tp : ++fp;
            --k;
        }
        res.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos), thr});
    }
    return res;
}

ThresholdSweep best_g_mean_threshold(const RocResult& roc) {
    ThresholdSweep best;
    for (const RocPoint& p : roc.points) {
        const double g = std::sqrt(p.tpr * (1.0 - p.fpr));
        if (g > best.best_g_mean) {
            best.best_g_mean = g;
            best.best_threshold = p.threshold;
        }
    }
    return best;
}

std::string roc_csv(const std::vector<RocPoint>& points) {
    std::ostringstream os;
    os.precision(17);
    os << "fpr,tpr,threshold\n";
    for (const RocPoint& p : points) {
        os << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
    }
    return os.str();
}

} // namespace hadr
