#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hadr/dataset.hpp"
#include "hadr/dbc.hpp"
#include "hadr/metrics.hpp"
#include "hadr/mlkr.hpp"
#include "hadr/mlp.hpp"

namespace hadr {

enum class TieRule { positive, negative };
enum class PipelineMode { full, dr_mlp, dbc_mlp };

struct PipelineConfig {
    Rounding rounding = Rounding::nearest;
    MlkrConfig mlkr;
    MlpTrainConfig mlp;
    double vote_threshold = 0.5;
    TieRule tie_rule = TieRule::positive;
    PipelineMode mode = PipelineMode::full;
    bool shared_transform = false; // one transform trained on the whole set
    bool whiten = false;           // PCA whitening after z-scoring
    std::uint64_t master_seed = 0;
};

// One ensemble member: the data block's own transform (absent in dbc_mlp
// mode) plus its classifier. Embedded features are re-standardized before
// the MLP; the learned metric stretches its discriminative axes to
// arbitrary scales that SGD cannot digest raw.
struct Member {
    int block_id = 0;
    std::optional<MlkrTransform> transform;
    std::optional<Standardizer> embed_standardizer;
    MlpModel mlp;
};

struct HadrModel {
    Standardizer standardizer;
    std::optional<Matrix> whitening; // m x m, applied after standardizing
    ImbalanceStats stats;
    std::vector<Member> members;
    std::optional<MlkrTransform> shared; // used by every member when set
    PipelineConfig config;
};

struct Prediction {
    std::vector<double> member_probs;
    int vote_label = 0;
    double mean_score = 0.0;
    int vote_margin = 0; // positive votes minus negative votes
};

// Standardize -> data block construction -> per-block transform -> per-block
// MLP, all seeded from config.master_seed. Members are ordered by block
// index; results are identical for a fixed seed regardless of scheduling.
HadrModel train_hadr(const Dataset& train, const PipelineConfig& cfg);

// Each member embeds the rows with its own transform and scores them with
// its own classifier; the ensemble label is the majority vote at the member
// threshold and the ensemble score is the mean member probability.
std::vector<Prediction> predict(const HadrModel& model, const Matrix& raw_rows);

// Vote labels feed the confusion counts; mean scores feed the AUC.
EvalReport evaluate(const HadrModel& model, const Dataset& test);

// Runs one of the three pipeline variants end to end:
//   full    - the complete pipeline
//   dr_mlp  - no block construction: one transform + one MLP on all rows
//   dbc_mlp - blocks without dimensionality reduction
EvalReport ablate(const Dataset& train, const Dataset& test, PipelineMode mode,
                  PipelineConfig cfg);

// Member votes for one probability vector, exposed for the voting tests.
int vote_label(const std::vector<double>& member_probs, double threshold, TieRule rule);

} // namespace hadr
