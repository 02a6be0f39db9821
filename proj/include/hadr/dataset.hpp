#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hadr/matrix.hpp"

namespace hadr {

// Feature matrix plus binary labels; label 1 is the minority/positive
// class. The unit every pipeline stage consumes. Immutable by convention
// after construction.
struct Dataset {
    Matrix features; // n x m
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::string name;

    std::size_t n() const { return features.rows(); }
    std::size_t m() const { return features.cols(); }
    std::size_t count(int label) const;

    // Row-count agreement and binary labels. Throws DataError.
    void validate() const;
    // validate() plus: n >= 2 and both classes present.
    void validate_for_pipeline() const;

    Dataset subset(const std::vector<std::size_t>& rows, std::string subset_name) const;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
    std::vector<std::size_t> train_indices; // parent row ids, for audit
    std::vector<std::size_t> test_indices;
};

// Per-class draw without replacement: round(train_fraction * class count)
// rows to train (clamped so both sides keep at least one row of each
// class), the remainder to test. Deterministic for a fixed seed.
SplitPair stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed);

// Per-feature affine map fitted on training rows only: x -> (x - mean)/std,
// population std. Constant features get std 1 recorded, so they pass
// through as zeros.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> std_devs;
};

Standardizer fit_standardizer(const Dataset& d);
Standardizer fit_standardizer(const Matrix& x);
Dataset apply_standardizer(const Standardizer& s, const Dataset& d);
Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

} // namespace hadr
