#include "hadr/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "hadr/errors.hpp"
#include "hadr/rng.hpp"

namespace hadr {

std::size_t Dataset::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::validate() const {
    if (features.rows() != labels.size()) {
        throw DataError("dataset '" + name + "': feature rows and label count differ");
    }
    if (!feature_names.empty() && feature_names.size() != features.cols()) {
        throw DataError("dataset '" + name + "': feature name count differs from columns");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw DataError("dataset '" + name + "': labels must be exactly 0 or 1");
        }
    }
    if (!features.all_finite()) {
        throw DataError("dataset '" + name + "': non-finite feature value");
    }
}

void Dataset::validate_for_pipeline() const {
    validate();
    if (n() < 2 || count(0) == 0 || count(1) == 0) {
        throw DataError("dataset '" + name +
                        "': pipeline needs n >= 2 and both classes present");
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows, std::string subset_name) const {
    Dataset out;
    out.features = take_rows(features, rows);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(labels[r]);
    out.feature_names = feature_names;
    out.name = std::move(subset_name);
    return out;
}

SplitPair stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    d.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("stratified_split: train_fraction must lie in (0,1)");
    }
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < d.n(); ++i) (d.labels[i] == 1 ? pos : neg).push_back(i);
    if (neg.size() < 2 || pos.size() < 2) {
        throw DataError("stratified_split: each class needs at least 2 samples");
    }

    Rng rng(seed);
    SplitPair split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    for (std::vector<std::size_t>* cls : {&neg, &pos}) {
        rng.shuffle(*cls);
        const auto total = static_cast<long>(cls->size());
        long k = std::lround(train_fraction * static_cast<double>(total));
        k = std::clamp(k, 1L, total - 1); // keep the class on both sides
        split.train_indices.insert(split.train_indices.end(), cls->begin(), cls->begin() + k);
        split.test_indices.insert(split.test_indices.end(), cls->begin() + k, cls->end());
    }
    split.train = d.subset(split.train_indices, d.name + "/train");
    split.test = d.subset(split.test_indices, d.name + "/test");
    return split;
}

Standardizer fit_standardizer(const Matrix& x) {
    if (x.rows() == 0) {
        throw DataError("fit_standardizer: empty input");
    }
    const std::size_t n = x.rows(), m = x.cols();
    Standardizer s;
    s.means.assign(m, 0.0);
    s.std_devs.assign(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = x(i, j) - mean;
            sq += c * c;
        }
        const double sd = std::sqrt(sq / static_cast<double>(n));
        s.means[j] = mean;
        s.std_devs[j] = sd > 0.0 ? sd : 1.0; // constant feature passes through
    }
    return s;
}

Standardizer fit_standardizer(const Dataset& d) { return fit_standardizer(d.features); }

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
    if (x.cols() != s.means.size()) {
        throw DataError("apply_standardizer: column count differs from fitted width");
    }
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            out(i, j) = (out(i, j) - s.means[j]) / s.std_devs[j];
    return out;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& d) {
    Dataset out = d;
    out.features = apply_standardizer(s, d.features);
    return out;
}

} // namespace hadr
