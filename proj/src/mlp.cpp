#include "hadr/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hadr/dataset.hpp"
#include "hadr/errors.hpp"

namespace hadr {

namespace {

constexpr double kProbFloor = 1e-12;     // keeps forward output inside (0,1)
constexpr double kBceClamp = 1e-7;       // clamp inside the loss

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double activate(double z, Activation act) {
    return act == Activation::relu ? std::max(0.0, z) : sigmoid(z);
}

double activate_deriv(double z, double a, Activation act) {
    return act == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : a * (1.0 - a);
}

// Full forward pass keeping pre-activations and activations per layer.
struct ForwardTrace {
    std::vector<std::vector<double>> z; // per layer beyond input
    std::vector<std::vector<double>> a; // a[0] = input copy
    double p = 0.5;
};

ForwardTrace forward_trace(const MlpModel& model, std::span<const double> x) {
    ForwardTrace tr;
    tr.a.emplace_back(x.begin(), x.end());
    const std::size_t layers = model.weights.size();
    for (std::size_t k = 0; k < layers; ++k) {
        const Matrix& w = model.weights[k];
        const auto& b = model.biases[k];
        std::vector<double> z(w.rows());
        std::vector<double> a(w.rows());
        const bool is_output = (k + 1 == layers);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            double s = b[r];
            const auto wrow = w.row(r);
            const auto& prev = tr.a.back();
            for (std::size_t c = 0; c < wrow.size(); ++c) s += wrow[c] * prev[c];
            z[r] = s;
            a[r] = is_output ? sigmoid(s) : activate(s, model.hidden_activation);
        }
        tr.z.push_back(std::move(z));
        tr.a.push_back(std::move(a));
    }
    tr.p = std::clamp(tr.a.back()[0], kProbFloor, 1.0 - kProbFloor);
    return tr;
}

MlpGradients zero_gradients(const MlpModel& model) {
    MlpGradients g;
    for (std::size_t k = 0; k < model.weights.size(); ++k) {
        g.weights.emplace_back(model.weights[k].rows(), model.weights[k].cols(), 0.0);
        g.biases.emplace_back(model.biases[k].size(), 0.0);
    }
    return g;
}

// Backprop for one sample; gradients accumulate into g.
void accumulate_sample(const MlpModel& model, std::span<const double> x, int y,
                       MlpGradients& g) {
    const ForwardTrace tr = forward_trace(model, x);
    const std::size_t layers = model.weights.size();

    // Output delta for sigmoid + BCE is p - y, exact and stable.
    std::vector<double> delta{tr.p - static_cast<double>(y)};
    for (std::size_t k = layers; k-- > 0;) {
        const auto& prev_a = tr.a[k];
        Matrix& gw = g.weights[k];
        auto& gb = g.biases[k];
        for (std::size_t r = 0; r < gw.rows(); ++r) {
            gb[r] += delta[r];
            auto grow = gw.row(r);
            for (std::size_t c = 0; c < grow.size(); ++c) grow[c] += delta[r] * prev_a[c];
        }
        if (k == 0) break;
        const Matrix& w = model.weights[k];
        std::vector<double> next(w.cols(), 0.0);
        for (std::size_t c = 0; c < w.cols(); ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < w.rows(); ++r) s += w(r, c) * delta[r];
            next[c] = s * activate_deriv(tr.z[k - 1][c], tr.a[k][c], model.hidden_activation);
        }
        delta = std::move(next);
    }
}

MlpModel init_model(std::size_t input_dim, const MlpTrainConfig& cfg, Rng& rng) {
    MlpModel model;
    model.hidden_activation = cfg.hidden_activation;
    model.dims.push_back(static_cast<int>(input_dim));
    for (int h : cfg.hidden_layers) model.dims.push_back(h);
    model.dims.push_back(1);
    for (std::size_t k = 0; k + 1 < model.dims.size(); ++k) {
        const std::size_t fan_in = model.dims[k], fan_out = model.dims[k + 1];
        Matrix w(fan_out, fan_in);
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& v : w.data()) v = scale * rng.normal();
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

} // namespace

double forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        throw DataError("mlp forward: input dimension mismatch");
    }
    return forward_trace(model, x).p;
}

double bce_loss(double p, int y) {
    const double q = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
    return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

double mean_bce(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) total += bce_loss(forward(model, x.row(i)), y[i]);
    return total / static_cast<double>(x.rows());
}

MlpGradients bce_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
    MlpGradients g = zero_gradients(model);
    for (std::size_t i = 0; i < x.rows(); ++i) accumulate_sample(model, x.row(i), y[i], g);
    const double inv = 1.0 / static_cast<double>(x.rows());
    for (auto& w : g.weights) w *= inv;
    for (auto& b : g.biases)
        for (double& v : b) v *= inv;
    return g;
}

MlpModel train_mlp(const Matrix& x, const std::vector<int>& y, const MlpTrainConfig& cfg,
                   Rng& rng) {
    if (x.rows() != y.size()) {
        throw DataError("train_mlp: feature rows and label count differ");
    }
    if (x.rows() < 5) {
        throw DataError("train_mlp: need at least 5 samples");
    }

    MlpModel model = init_model(x.cols(), cfg, rng);
    if (cfg.epochs <= 0) return model;

    // Inner stratified split for validation; fall back to training on
    // everything when a class is too small to appear on both sides.
    Matrix train_x;
    std::vector<int> train_y;
    Matrix val_x;
    std::vector<int> val_y;
    bool has_val = false;
    if (cfg.validation_fraction > 0.0) {
        Dataset d;
        d.features = x;
        d.labels = y;
        d.name = "mlp-inner";
        long pos = 0, neg = 0;
        for (int v : y) (v == 1 ? pos : neg)++;
        if (pos >= 2 && neg >= 2) {
            const SplitPair split =
                stratified_split(d, 1.0 - cfg.validation_fraction, rng.next_u64());
            train_x = split.train.features;
            train_y = split.train.labels;
            val_x = split.test.features;
            val_y = split.test.labels;
            has_val = true;
        }
    }
    if (!has_val) {
        train_x = x;
        train_y = y;
    }
    model.validation_used = has_val;

    bool both_classes = false;
    {
        bool p = false, n = false;
        for (int v : train_y) (v == 1 ? p : n) = true;
        both_classes = p && n;
    }
    if (!both_classes) {
        throw DataError("train_mlp: training portion must contain both classes");
    }

    MlpGradients velocity = zero_gradients(model);
    MlpModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<std::size_t> order(train_x.rows());
    std::iota(order.begin(), order.end(), 0);

    const int batch = std::max(1, cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            std::vector<std::size_t> rows(order.begin() + start, order.begin() + stop);
            const Matrix bx = take_rows(train_x, rows);
            std::vector<int> by;
            by.reserve(rows.size());
            for (std::size_t r : rows) by.push_back(train_y[r]);

            const MlpGradients g = bce_gradients(model, bx, by);
            for (std::size_t k = 0; k < model.weights.size(); ++k) {
                auto& vw = velocity.weights[k];
                auto& w = model.weights[k];
                for (std::size_t ii = 0; ii < w.data().size(); ++ii) {
                    vw.data()[ii] = cfg.momentum * vw.data()[ii] -
                                    cfg.learning_rate * g.weights[k].data()[ii];
                    w.data()[ii] += vw.data()[ii];
                }
                auto& vb = velocity.biases[k];
                auto& b = model.biases[k];
                for (std::size_t ii = 0; ii < b.size(); ++ii) {
                    vb[ii] = cfg.momentum * vb[ii] - cfg.learning_rate * g.biases[k][ii];
                    b[ii] += vb[ii];
                }
            }
        }

        EpochStats stats;
        stats.train_loss = mean_bce(model, train_x, train_y);
        if (!std::isfinite(stats.train_loss)) {
            throw TrainError("train_mlp: non-finite loss at epoch " + std::to_string(epoch));
        }
        for (const Matrix& w : model.weights) {
            if (!w.all_finite()) {
                throw TrainError("train_mlp: non-finite weights at epoch " +
                                 std::to_string(epoch));
            }
        }
        if (has_val) {
            stats.val_loss = mean_bce(model, val_x, val_y);
            stats.has_val = true;
        }
        model.history.push_back(stats);

        if (has_val) {
            if (stats.val_loss < best_val) {
                best_val = stats.val_loss;
                best.weights = model.weights;
                best.biases = model.biases;
                best.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }
    }

    if (has_val && best.best_epoch >= 0) {
        best.history = std::move(model.history);
        best.validation_used = true;
        return best;
    }
    model.best_epoch = static_cast<int>(model.history.size()) - 1;
    return model;
}

std::vector<double> predict_proba(const MlpModel& model, const Matrix& x) {
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(forward(model, x.row(i)));
    return out;
}

std::vector<int> predict_label(const MlpModel& model, const Matrix& x, double threshold) {
    std::vector<int> out;
    out.reserve(x.rows());
    for (const double p : predict_proba(model, x)) out.push_back(p >= threshold ? 1 : 0);
    return out;
}

} // namespace hadr
