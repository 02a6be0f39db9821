#pragma once

#include <cstdint>
#include <vector>

#include "hadr/matrix.hpp"
#include "hadr/rng.hpp"

namespace hadr {

enum class Activation { relu, sigmoid };

struct MlpTrainConfig {
    int epochs = 1000;
    int batch_size = 10;
    double validation_fraction = 0.2;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int patience = 50; // epochs without validation improvement before stopping
    std::vector<int> hidden_layers = {10, 10};
    Activation hidden_activation = Activation::relu;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    bool has_val = false;
};

// Feed-forward net with sigmoid output head; dims = {input, hidden..., 1}.
// weights[k] is dims[k+1] x dims[k].
struct MlpModel {
    std::vector<int> dims;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    Activation hidden_activation = Activation::relu;
    std::vector<EpochStats> history;
    bool validation_used = false;
    int best_epoch = -1; // epoch whose checkpoint the returned weights carry

    std::size_t input_dim() const { return dims.empty() ? 0 : static_cast<std::size_t>(dims.front()); }
};

// Output probability, clamped to (0,1) so downstream logs stay finite.
double forward(const MlpModel& model, std::span<const double> x);

// Binary cross-entropy with probability clamping to [1e-7, 1-1e-7].
double bce_loss(double p, int y);

// Mean BCE of the model over a labelled matrix.
double mean_bce(const MlpModel& model, const Matrix& x, const std::vector<int>& y);

// Mini-batch SGD with momentum on BCE. An inner stratified 80/20 split
// drives early stopping and best-checkpoint selection; when a class is too
// small to stratify, validation is skipped and the final-epoch model is
// returned (validation_used = false).
MlpModel train_mlp(const Matrix& x, const std::vector<int>& y, const MlpTrainConfig& cfg,
                   Rng& rng);

std::vector<double> predict_proba(const MlpModel& model, const Matrix& x);
// label = 1 iff probability >= threshold
std::vector<int> predict_label(const MlpModel& model, const Matrix& x, double threshold = 0.5);

// Parameter gradients of mean BCE over a batch, laid out like the model.
struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};
MlpGradients bce_gradients(const MlpModel& model, const Matrix& x, const std::vector<int>& y);

} // namespace hadr
