#include "hadr/serialize.hpp"

#include <fstream>

#include "hadr/errors.hpp"

namespace hadr {

using nlohmann::json;

namespace {

std::string activation_name(Activation a) {
    return a == Activation::relu ? "relu" : "sigmoid";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    throw DataError("unknown activation: " + s);
}

std::string rounding_name(Rounding r) {
    switch (r) {
        case Rounding::floor: return "floor";
        case Rounding::ceil: return "ceil";
        default: return "nearest";
    }
}

Rounding rounding_from_name(const std::string& s) {
    if (s == "floor") return Rounding::floor;
    if (s == "ceil") return Rounding::ceil;
    if (s == "nearest") return Rounding::nearest;
    throw DataError("unknown rounding rule: " + s);
}

std::string mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::dr_mlp: return "dr-mlp";
        case PipelineMode::dbc_mlp: return "dbc-mlp";
        default: return "full";
    }
}

PipelineMode mode_from_name(const std::string& s) {
    if (s == "full") return PipelineMode::full;
    if (s == "dr-mlp" || s == "dr_mlp") return PipelineMode::dr_mlp;
    if (s == "dbc-mlp" || s == "dbc_mlp") return PipelineMode::dbc_mlp;
    throw DataError("unknown pipeline mode: " + s);
}

} // namespace

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

json dataset_to_json(const Dataset& d) {
    json rows = json::array();
    for (std::size_t i = 0; i < d.n(); ++i) {
        json row = json::array();
        for (std::size_t jj = 0; jj < d.m(); ++jj) row.push_back(d.features(i, jj));
        rows.push_back(std::move(row));
    }
    return json{{"name", d.name},
                {"feature_names", d.feature_names},
                {"features", std::move(rows)},
                {"labels", d.labels}};
}

Dataset dataset_from_json(const json& j) {
    Dataset d;
    d.name = j.at("name").get<std::string>();
    d.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    d.labels = j.at("labels").get<std::vector<int>>();
    const auto& rows = j.at("features");
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? d.feature_names.size() : rows[0].size();
    d.features = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m) {
            throw DataError("dataset JSON: ragged feature rows");
        }
        for (std::size_t c = 0; c < m; ++c) d.features(i, c) = rows[i][c].get<double>();
    }
    d.validate();
    return d;
}

json standardizer_to_json(const Standardizer& s) {
    return json{{"means", s.means}, {"std_devs", s.std_devs}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.means = j.at("means").get<std::vector<double>>();
    s.std_devs = j.at("std_devs").get<std::vector<double>>();
    return s;
}

json mlkr_to_json(const MlkrTransform& t) {
    return json{{"l", t.a.rows()},
                {"m", t.a.cols()},
                {"A", t.a.data()},
                {"sigma", t.sigma},
                {"trace", t.training_trace},
                {"loo_fallbacks", t.loo_fallbacks}};
}

MlkrTransform mlkr_from_json(const json& j) {
    MlkrTransform t;
    t.a = Matrix(j.at("l").get<std::size_t>(), j.at("m").get<std::size_t>(),
                 j.at("A").get<std::vector<double>>());
    t.sigma = j.at("sigma").get<double>();
    t.training_trace = j.at("trace").get<std::vector<double>>();
    t.loo_fallbacks = j.value("loo_fallbacks", 0);
    return t;
}

json mlp_to_json(const MlpModel& m) {
    json weights = json::array();
    for (const Matrix& w : m.weights) weights.push_back(matrix_to_json(w));
    json history = json::array();
    for (const EpochStats& e : m.history) {
        history.push_back(json{{"train_loss", e.train_loss},
                               {"val_loss", e.val_loss},
                               {"has_val", e.has_val}});
    }
    return json{{"dims", m.dims},
                {"weights", std::move(weights)},
                {"biases", m.biases},
                {"activation", activation_name(m.hidden_activation)},
                {"history", std::move(history)},
                {"validation_used", m.validation_used},
                {"best_epoch", m.best_epoch}};
}

MlpModel mlp_from_json(const json& j) {
    MlpModel m;
    m.dims = j.at("dims").get<std::vector<int>>();
    for (const auto& w : j.at("weights")) m.weights.push_back(matrix_from_json(w));
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    m.hidden_activation = activation_from_name(j.at("activation").get<std::string>());
    for (const auto& e : j.at("history")) {
        m.history.push_back(EpochStats{e.at("train_loss").get<double>(),
                                       e.at("val_loss").get<double>(),
                                       e.at("has_val").get<bool>()});
    }
    m.validation_used = j.at("validation_used").get<bool>();
    m.best_epoch = j.at("best_epoch").get<int>();
    return m;
}

json pipeline_config_to_json(const PipelineConfig& c) {
    return json{{"rounding", rounding_name(c.rounding)},
                {"mlkr",
                 json{{"out_dim", c.mlkr.out_dim},
                      {"sigma", c.mlkr.sigma},
                      {"max_iters", c.mlkr.max_iters},
                      {"tol", c.mlkr.tol},
                      {"init", c.mlkr.init == MlkrConfig::Init::pca ? "pca" : "identity-noise"},
                      {"init_noise", c.mlkr.init_noise}}},
                {"mlp",
                 json{{"epochs", c.mlp.epochs},
                      {"batch_size", c.mlp.batch_size},
                      {"validation_fraction", c.mlp.validation_fraction},
                      {"learning_rate", c.mlp.learning_rate},
                      {"momentum", c.mlp.momentum},
                      {"patience", c.mlp.patience},
                      {"hidden_layers", c.mlp.hidden_layers},
                      {"hidden_activation", activation_name(c.mlp.hidden_activation)}}},
                {"vote_threshold", c.vote_threshold},
                {"tie_rule", c.tie_rule == TieRule::positive ? "positive" : "negative"},
                {"mode", mode_name(c.mode)},
                {"shared_transform", c.shared_transform},
                {"whiten", c.whiten},
                {"master_seed", c.master_seed}};
}

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig c;
    c.rounding = rounding_from_name(j.at("rounding").get<std::string>());
    const auto& mk = j.at("mlkr");
    c.mlkr.out_dim = mk.at("out_dim").get<std::size_t>();
    c.mlkr.sigma = mk.at("sigma").get<double>();
    c.mlkr.max_iters = mk.at("max_iters").get<int>();
    c.mlkr.tol = mk.at("tol").get<double>();
    c.mlkr.init = mk.at("init").get<std::string>() == "pca" ? MlkrConfig::Init::pca
                                                            : MlkrConfig::Init::identity_noise;
    c.mlkr.init_noise = mk.at("init_noise").get<double>();
    const auto& mp = j.at("mlp");
    c.mlp.epochs = mp.at("epochs").get<int>();
    c.mlp.batch_size = mp.at("batch_size").get<int>();
    c.mlp.validation_fraction = mp.at("validation_fraction").get<double>();
    c.mlp.learning_rate = mp.at("learning_rate").get<double>();
    c.mlp.momentum = mp.at("momentum").get<double>();
    c.mlp.patience = mp.at("patience").get<int>();
    c.mlp.hidden_layers = mp.at("hidden_layers").get<std::vector<int>>();
    c.mlp.hidden_activation = activation_from_name(mp.at("hidden_activation").get<std::string>());
    c.vote_threshold = j.at("vote_threshold").get<double>();
    c.tie_rule = j.at("tie_rule").get<std::string>() == "negative" ? TieRule::negative
                                                                   : TieRule::positive;
    c.mode = mode_from_name(j.at("mode").get<std::string>());
    c.shared_transform = j.at("shared_transform").get<bool>();
    c.whiten = j.at("whiten").get<bool>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

json model_to_json(const HadrModel& m) {
    json members = json::array();
    for (const Member& member : m.members) {
        json entry{{"block_id", member.block_id}, {"mlp", mlp_to_json(member.mlp)}};
        if (member.transform) entry["mlkr"] = mlkr_to_json(*member.transform);
        if (member.embed_standardizer) {
            entry["embed_standardizer"] = standardizer_to_json(*member.embed_standardizer);
        }
        members.push_back(std::move(entry));
    }
    json j{{"format", "hadr-model/1"},
           {"config", pipeline_config_to_json(m.config)},
           {"standardizer", standardizer_to_json(m.standardizer)},
           {"stats",
            json{{"n_min", m.stats.n_min},
                 {"n_maj", m.stats.n_maj},
                 {"ir", m.stats.ir},
                 {"ir_star", m.stats.ir_star}}},
           {"members", std::move(members)}};
    if (m.whitening) j["whitening"] = matrix_to_json(*m.whitening);
    if (m.shared) j["shared_mlkr"] = mlkr_to_json(*m.shared);
    return j;
}

HadrModel model_from_json(const json& j) {
    if (j.value("format", "") != "hadr-model/1") {
        throw DataError("model JSON: unknown or missing format tag");
    }
    HadrModel m;
    m.config = pipeline_config_from_json(j.at("config"));
    m.standardizer = standardizer_from_json(j.at("standardizer"));
    const auto& st = j.at("stats");
    m.stats.n_min = st.at("n_min").get<long>();
    m.stats.n_maj = st.at("n_maj").get<long>();
    m.stats.ir = st.at("ir").get<double>();
    m.stats.ir_star = st.at("ir_star").get<int>();
    if (j.contains("whitening")) m.whitening = matrix_from_json(j.at("whitening"));
    if (j.contains("shared_mlkr")) m.shared = mlkr_from_json(j.at("shared_mlkr"));
    for (const auto& entry : j.at("members")) {
        Member member;
        member.block_id = entry.at("block_id").get<int>();
        member.mlp = mlp_from_json(entry.at("mlp"));
        if (entry.contains("mlkr")) member.transform = mlkr_from_json(entry.at("mlkr"));
        if (entry.contains("embed_standardizer")) {
            member.embed_standardizer = standardizer_from_json(entry.at("embed_standardizer"));
        }
        m.members.push_back(std::move(member));
    }
    return m;
}

json report_to_json(const EvalReport& r) {
    json roc = json::array();
    for (const RocPoint& p : r.roc) {
        roc.push_back(json{{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", p.threshold}});
    }
    return json{{"dataset", r.dataset},
                {"seed", r.seed},
                {"counts",
                 json{{"tp", r.counts.tp}, {"fn", r.counts.fn}, {"fp", r.counts.fp}, {"tn", r.counts.tn}}},
                {"recall", r.recall},
                {"tnr", r.tnr},
                {"g_mean", r.g_mean},
                {"auc", r.auc},
                {"g_mean_at_best_threshold", r.g_mean_at_best_threshold},
                {"best_threshold", r.best_threshold},
                {"roc", std::move(roc)}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("counts");
    r.counts = {c.at("tp").get<long>(), c.at("fn").get<long>(), c.at("fp").get<long>(),
                c.at("tn").get<long>()};
    r.recall = j.at("recall").get<double>();
    r.tnr = j.at("tnr").get<double>();
    r.g_mean = j.at("g_mean").get<double>();
    r.auc = j.at("auc").get<double>();
    r.g_mean_at_best_threshold = j.at("g_mean_at_best_threshold").get<double>();
    r.best_threshold = j.at("best_threshold").get<double>();
    for (const auto& p : j.at("roc")) {
        r.roc.push_back(RocPoint{p.at("fpr").get<double>(), p.at("tpr").get<double>(),
                                 p.at("threshold").get<double>()});
    }
    return r;
}

json blocks_membership_json(const std::vector<DataBlock>& blocks) {
    json out = json::array();
    for (const DataBlock& b : blocks) {
        out.push_back(json{{"block", b.majority_chunk_index},
                           {"rows", b.source_row_ids},
                           {"size", b.source_row_ids.size()}});
    }
    return out;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write file: " + path);
    }
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

void save_model(const HadrModel& m, const std::string& path) {
    write_json_file(model_to_json(m), path);
}

HadrModel load_model(const std::string& path) {
    try {
        return model_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw DataError(path + ": bad model file: " + e.what());
    }
}

} // namespace hadr
