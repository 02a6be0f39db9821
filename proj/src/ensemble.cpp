#include "hadr/ensemble.hpp"

#include <cmath>
#include <string>

#include "hadr/eig.hpp"
#include "hadr/errors.hpp"

namespace hadr {

namespace {

// PCA whitening matrix for already-standardized data: W = L^{-1/2} V^T from
// the normalized covariance, with a floor against near-singular directions.
Matrix whitening_matrix(const Matrix& x) {
    const EigenDecomposition eig = sym_eig(covariance(x, /*centered=*/true, /*normalize=*/true));
    const std::size_t m = x.cols();
    Matrix w(m, m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const double lambda = std::max(eig.eigenvalues[r], 1e-12);
        const double inv_sqrt = 1.0 / std::sqrt(lambda);
        for (std::size_t c = 0; c < m; ++c) w(r, c) = inv_sqrt * eig.eigenvectors(c, r);
    }
    return w;
}

Matrix preprocess(const HadrModel& model, const Matrix& raw) {
    Matrix x = apply_standardizer(model.standardizer, raw);
    if (model.whitening) x = x * model.whitening->transpose();
    return x;
}

Member train_member(int block_id, const Matrix& x, const std::vector<int>& y,
                    const PipelineConfig& cfg, const MlkrTransform* shared) {
    Member member;
    member.block_id = block_id;

    const Matrix* mlp_input = &x;
    Matrix embedded;
    if (cfg.mode != PipelineMode::dbc_mlp) {
        if (shared) {
            embedded = embed(*shared, x);
        } else {
            MlkrConfig mc = cfg.mlkr;
            mc.seed = derive_seed(cfg.master_seed, "mlkr", static_cast<std::uint64_t>(block_id));
            member.transform = train_mlkr(x, y, mc);
            embedded = embed(*member.transform, x);
        }
        // Center the embedding and divide by one shared RMS scale. Per-axis
        // standardization would re-amplify the directions the metric
        // deliberately compressed; a global scale keeps the learned
        // weighting while giving SGD inputs of digestible magnitude.
        Standardizer es = fit_standardizer(embedded);
        double mean_var = 0.0;
        for (double sd : es.std_devs) mean_var += sd * sd;
        const double rms = std::sqrt(std::max(mean_var / es.std_devs.size(), 1e-24));
        for (double& sd : es.std_devs) sd = rms;
        member.embed_standardizer = std::move(es);
        embedded = apply_standardizer(*member.embed_standardizer, embedded);
        mlp_input = &embedded;
    }

    Rng mlp_rng(derive_seed(cfg.master_seed, "mlp", static_cast<std::uint64_t>(block_id)));
    try {
        member.mlp = train_mlp(*mlp_input, y, cfg.mlp, mlp_rng);
    } catch (const TrainError& e) {
        throw TrainError("block " + std::to_string(block_id) + ": " + e.what());
    }
    return member;
}

} // namespace

int vote_label(const std::vector<double>& member_probs, double threshold, TieRule rule) {
    const int n = static_cast<int>(member_probs.size());
    int pos = 0;
    for (double p : member_probs) {
        if (p >= threshold) ++pos;
    }
    const int needed = rule == TieRule::positive ? (n + 1) / 2 : n / 2 + 1;
    return pos >= needed ? 1 : 0;
}

HadrModel train_hadr(const Dataset& train, const PipelineConfig& cfg) {
    train.validate_for_pipeline();

    HadrModel model;
    model.config = cfg;
    model.standardizer = fit_standardizer(train);
    Dataset prepared = apply_standardizer(model.standardizer, train);
    if (cfg.whiten) {
        model.whitening = whitening_matrix(prepared.features);
        prepared.features = prepared.features * model.whitening->transpose();
    }
    model.stats = compute_stats(prepared, cfg.rounding);

    if (cfg.shared_transform && cfg.mode != PipelineMode::dbc_mlp) {
        MlkrConfig mc = cfg.mlkr;
        mc.seed = derive_seed(cfg.master_seed, "mlkr-shared", 0);
        model.shared = train_mlkr(prepared.features, prepared.labels, mc);
    }
    const MlkrTransform* shared = model.shared ? &*model.shared : nullptr;

    if (cfg.mode == PipelineMode::dr_mlp) {
        // No block construction: the single member sees the full,
        // imbalanced training set.
        model.members.push_back(
            train_member(0, prepared.features, prepared.labels, cfg, shared));
        return model;
    }

    Rng block_rng(derive_seed(cfg.master_seed, "dbc", 0));
    const std::vector<DataBlock> blocks = construct_blocks(prepared, model.stats, block_rng);
    model.members.reserve(blocks.size());
    for (const DataBlock& block : blocks) {
        model.members.push_back(train_member(block.majority_chunk_index, block.data.features,
                                             block.data.labels, cfg, shared));
    }
    return model;
}

std::vector<Prediction> predict(const HadrModel& model, const Matrix& raw_rows) {
    if (raw_rows.cols() != model.standardizer.means.size()) {
        throw DataError("predict: feature count differs from the training data");
    }
    const Matrix x = preprocess(model, raw_rows);

    // Score all rows member by member; each member applies its own
    // transform (or the shared one) before its classifier.
    const std::size_t n = raw_rows.rows();
    std::vector<Prediction> out(n);
    for (Prediction& p : out) p.member_probs.reserve(model.members.size());

    Matrix shared_embedded;
    if (model.shared) shared_embedded = embed(*model.shared, x);

    for (const Member& member : model.members) {
        const Matrix* input = &x;
        Matrix own;
        if (model.shared) {
            input = &shared_embedded;
        } else if (member.transform) {
            own = embed(*member.transform, x);
            input = &own;
        }
        if (member.embed_standardizer) {
            own = apply_standardizer(*member.embed_standardizer, *input);
            input = &own;
        }
        const std::vector<double> probs = predict_proba(member.mlp, *input);
        for (std::size_t i = 0; i < n; ++i) out[i].member_probs.push_back(probs[i]);
    }

    for (Prediction& p : out) {
        p.vote_label = vote_label(p.member_probs, model.config.vote_threshold,
                                  model.config.tie_rule);
        double sum = 0.0;
        int pos = 0;
        for (double q : p.member_probs) {
            sum += q;
            if (q >= model.config.vote_threshold) ++pos;
        }
        p.mean_score = sum / static_cast<double>(p.member_probs.size());
        p.vote_margin = 2 * pos - static_cast<int>(p.member_probs.size());
    }
    return out;
}

EvalReport evaluate(const HadrModel& model, const Dataset& test) {
    test.validate();
    if (test.count(0) == 0 || test.count(1) == 0) {
        throw DataError("evaluate: AUC undefined on a single-class test set");
    }
    const std::vector<Prediction> preds = predict(model, test.features);

    std::vector<int> y_pred;
    std::vector<double> scores;
    y_pred.reserve(preds.size());
    scores.reserve(preds.size());
    for (const Prediction& p : preds) {
        y_pred.push_back(p.vote_label);
        scores.push_back(p.mean_score);
    }

    EvalReport report;
    report.dataset = test.name;
    report.counts = confusion(test.labels, y_pred);
    report.recall = recall(report.counts).value();
    report.tnr = tnr(report.counts).value();
    report.g_mean = g_mean(report.counts).value();
    const RocResult roc = roc_auc(test.labels, scores);
    report.auc = roc.auc;
    report.roc = roc.points;
    const ThresholdSweep sweep = best_g_mean_threshold(roc);
    report.g_mean_at_best_threshold = sweep.best_g_mean;
    report.best_threshold = sweep.best_threshold;
    return report;
}

EvalReport ablate(const Dataset& train, const Dataset& test, PipelineMode mode,
                  PipelineConfig cfg) {
    cfg.mode = mode;
    const HadrModel model = train_hadr(train, cfg);
    return evaluate(model, test);
}

} // namespace hadr
