// Command-line front end: train, eval, bench, ablate, inspect, gen.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 training failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hadr/bench.hpp"
#include "hadr/dbc.hpp"
#include "hadr/ensemble.hpp"
#include "hadr/errors.hpp"
#include "hadr/io.hpp"
#include "hadr/serialize.hpp"
#include "hadr/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSurrogateDataSeed = 7;

struct CommonArgs {
    std::string data_path;
    std::string format = "auto"; // csv | keel | json | auto (by extension)
    std::string label_col = "label";
    std::string positive = "1";
    std::string out_dir = "hadr_out";
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

std::uint64_t env_seed_fallback() {
    if (const char* env = std::getenv("HADR_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

std::string detect_format(const std::string& path, const std::string& requested) {
    if (requested != "auto") return requested;
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".dat" || ext == ".arff") return "keel";
    if (ext == ".json") return "json";
    return "csv";
}

hadr::Dataset load_any(const CommonArgs& args) {
    const std::string format = detect_format(args.data_path, args.format);
    if (format == "keel") return hadr::load_keel_dat(args.data_path);
    if (format == "json") return hadr::load_dataset_json(args.data_path);
    if (format == "csv") return hadr::load_csv(args.data_path, args.label_col, args.positive);
    throw hadr::DataError("unknown format: " + format);
}

hadr::Rounding rounding_from(const std::string& s) {
    if (s == "floor") return hadr::Rounding::floor;
    if (s == "ceil") return hadr::Rounding::ceil;
    if (s == "nearest") return hadr::Rounding::nearest;
    throw hadr::DataError("unknown rounding rule: " + s);
}

hadr::PipelineMode mode_from(const std::string& s) {
    if (s == "full") return hadr::PipelineMode::full;
    if (s == "dr-mlp") return hadr::PipelineMode::dr_mlp;
    if (s == "dbc-mlp") return hadr::PipelineMode::dbc_mlp;
    throw hadr::DataError("unknown mode: " + s);
}

std::vector<int> layers_from(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw hadr::DataError("--layers needs at least one hidden size");
    return out;
}

// Flag settings shared by the training-style commands, merged with
// precedence: command line > config file > defaults.
struct PipelineArgs {
    std::string rounding = "nearest";
    std::size_t mlkr_dim = 0;
    int mlkr_iters = 200;
    std::string mode = "full";
    std::string hidden_activation = "relu";
    std::string layers = "10,10";
    int epochs = 1000;
    int batch_size = 10;
    double learning_rate = 0.01;
    int patience = 50;
    bool shared_transform = false;
    bool whiten = false;

    CLI::Option* rounding_opt = nullptr;
    CLI::Option* mlkr_dim_opt = nullptr;
    CLI::Option* mlkr_iters_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* act_opt = nullptr;
    CLI::Option* layers_opt = nullptr;
    CLI::Option* epochs_opt = nullptr;
    CLI::Option* batch_opt = nullptr;
    CLI::Option* lr_opt = nullptr;
    CLI::Option* patience_opt = nullptr;
    CLI::Option* shared_opt = nullptr;
    CLI::Option* whiten_opt = nullptr;

    void attach(CLI::App* cmd) {
        rounding_opt = cmd->add_option("--rounding", rounding,
                                       "ir* rounding rule: floor|ceil|nearest");
        mlkr_dim_opt = cmd->add_option("--mlkr-dim", mlkr_dim,
                                       "embedding dimension (0 = half the features)");
        mlkr_iters_opt = cmd->add_option("--mlkr-iters", mlkr_iters, "max optimizer iterations");
        mode_opt = cmd->add_option("--mode", mode, "pipeline mode: full|dr-mlp|dbc-mlp");
        act_opt = cmd->add_option("--hidden-activation", hidden_activation,
                                  "hidden activation: relu|sigmoid");
        layers_opt = cmd->add_option("--layers", layers, "hidden layer sizes, e.g. 10,10");
        epochs_opt = cmd->add_option("--epochs", epochs, "training epochs");
        batch_opt = cmd->add_option("--batch-size", batch_size, "mini-batch size");
        lr_opt = cmd->add_option("--learning-rate", learning_rate, "SGD learning rate");
        patience_opt = cmd->add_option("--patience", patience, "early-stopping patience");
        shared_opt = cmd->add_flag("--shared-transform", shared_transform,
                                   "train one transform on the whole set");
        whiten_opt = cmd->add_flag("--whiten", whiten, "PCA-whiten after z-scoring");
    }

    // Config-file values fill in anything the command line left untouched.
    void merge_config(const json& cfg) {
        const auto take = [&](const char* key, auto& slot, const CLI::Option* opt) {
            if (opt && opt->count() == 0 && cfg.contains(key)) {
                cfg.at(key).get_to(slot);
            }
        };
        take("rounding", rounding, rounding_opt);
        take("mlkr_dim", mlkr_dim, mlkr_dim_opt);
        take("mlkr_iters", mlkr_iters, mlkr_iters_opt);
        take("mode", mode, mode_opt);
        take("hidden_activation", hidden_activation, act_opt);
        take("layers", layers, layers_opt);
        take("epochs", epochs, epochs_opt);
        take("batch_size", batch_size, batch_opt);
        take("learning_rate", learning_rate, lr_opt);
        take("patience", patience, patience_opt);
        take("shared_transform", shared_transform, shared_opt);
        take("whiten", whiten, whiten_opt);
    }

    hadr::PipelineConfig build(std::uint64_t master_seed) const {
        hadr::PipelineConfig cfg;
        cfg.rounding = rounding_from(rounding);
        cfg.mlkr.out_dim = mlkr_dim;
        cfg.mlkr.max_iters = mlkr_iters;
        cfg.mode = mode_from(mode);
        cfg.mlp.hidden_activation =
            hidden_activation == "sigmoid" ? hadr::Activation::sigmoid : hadr::Activation::relu;
        if (hidden_activation != "relu" && hidden_activation != "sigmoid") {
            throw hadr::DataError("unknown activation: " + hidden_activation);
        }
        cfg.mlp.hidden_layers = layers_from(layers);
        cfg.mlp.epochs = epochs;
        cfg.mlp.batch_size = batch_size;
        cfg.mlp.learning_rate = learning_rate;
        cfg.mlp.patience = patience;
        cfg.shared_transform = shared_transform;
        cfg.whiten = whiten;
        cfg.master_seed = master_seed;
        return cfg;
    }
};

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw hadr::DataError("cannot create output directory: " + dir);
}

void echo_config(const std::string& out_dir, const json& effective) {
    hadr::write_json_file(effective, (fs::path(out_dir) / "effective_config.json").string());
}

json effective_pipeline_json(const hadr::PipelineConfig& cfg, const CommonArgs& common,
                             const char* command) {
    json j = hadr::pipeline_config_to_json(cfg);
    j["command"] = command;
    j["data"] = common.data_path;
    j["format"] = detect_format(common.data_path, common.format);
    j["out"] = common.out_dir;
    return j;
}

std::string format3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

json member_log(const hadr::HadrModel& model) {
    json members = json::array();
    for (const auto& member : model.members) {
        json entry{{"block_id", member.block_id},
                   {"mlp_epochs_run", member.mlp.history.size()},
                   {"mlp_best_epoch", member.mlp.best_epoch},
                   {"mlp_validation_used", member.mlp.validation_used}};
        if (member.transform) {
            entry["mlkr_iterations"] = member.transform->training_trace.size() - 1;
            entry["mlkr_initial_loss"] = member.transform->training_trace.front();
            entry["mlkr_final_loss"] = member.transform->training_trace.back();
            entry["mlkr_loo_fallbacks"] = member.transform->loo_fallbacks;
        }
        members.push_back(std::move(entry));
    }
    return members;
}

int cmd_train(const CommonArgs& common, const PipelineArgs& pipe) {
    const hadr::Dataset data = load_any(common);
    const hadr::PipelineConfig cfg = pipe.build(common.seed);
    ensure_out_dir(common.out_dir);
    echo_config(common.out_dir, effective_pipeline_json(cfg, common, "train"));

    const hadr::HadrModel model = hadr::train_hadr(data, cfg);
    const std::string model_path = (fs::path(common.out_dir) / "model.json").string();
    hadr::save_model(model, model_path);

    json log{{"dataset", data.name},
             {"n", data.n()},
             {"m", data.m()},
             {"stats",
              {{"n_min", model.stats.n_min},
               {"n_maj", model.stats.n_maj},
               {"ir", model.stats.ir},
               {"ir_star", model.stats.ir_star}}},
             {"members", member_log(model)}};
    hadr::write_json_file(log, (fs::path(common.out_dir) / "train_log.json").string());

    std::cout << "trained " << model.members.size()
              << (model.members.size() == 1 ? " member" : " members")
              << " (ir=" << format3(model.stats.ir) << ", ir*=" << model.stats.ir_star << ")\n"
              << "model: " << model_path << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& model_path) {
    const hadr::HadrModel model = hadr::load_model(model_path);
    const hadr::Dataset data = load_any(common);
    ensure_out_dir(common.out_dir);
    echo_config(common.out_dir,
                json{{"command", "eval"},
                     {"model", model_path},
                     {"data", common.data_path},
                     {"format", detect_format(common.data_path, common.format)},
                     {"out", common.out_dir}});

    hadr::EvalReport report = hadr::evaluate(model, data);
    report.seed = model.config.master_seed;
    const std::string report_path = (fs::path(common.out_dir) / "report.json").string();
    hadr::write_json_file(hadr::report_to_json(report), report_path);
    std::ofstream(fs::path(common.out_dir) / "roc.csv") << hadr::roc_csv(report.roc);

    std::cout << "recall " << format3(report.recall) << "\n"
              << "g_mean " << format3(report.g_mean) << "\n"
              << "auc " << format3(report.auc) << "\n";
    return 0;
}

std::vector<hadr::BenchInput> surrogate_inputs(const std::vector<std::string>& names) {
    std::vector<hadr::BenchInput> inputs;
    for (const auto& spec : hadr::benchmark_specs()) {
        if (!names.empty() &&
            std::find(names.begin(), names.end(), spec.name) == names.end()) {
            continue;
        }
        inputs.push_back({spec.name, hadr::make_surrogate(spec, kSurrogateDataSeed)});
    }
    if (inputs.empty()) throw hadr::DataError("no benchmark datasets matched");
    return inputs;
}

// A dataset that fails to load still yields a table row carrying the error,
// so one bad file cannot take down the rest of the benchmark.
struct NamedLoad {
    std::string name;
    std::optional<hadr::Dataset> data;
    std::string error;
};

std::vector<NamedLoad> config_loads(const std::string& config_path) {
    const json cfg = hadr::read_json_file(config_path);
    std::vector<NamedLoad> loads;
    for (const auto& entry : cfg.at("datasets")) {
        CommonArgs args;
        args.data_path = entry.at("path").get<std::string>();
        args.format = entry.value("format", "auto");
        args.label_col = entry.value("label_col", "label");
        args.positive = entry.value("positive", "1");
        NamedLoad load;
        load.name = entry.value("name", fs::path(args.data_path).stem().string());
        try {
            load.data = load_any(args);
        } catch (const std::exception& e) {
            load.error = e.what();
        }
        loads.push_back(std::move(load));
    }
    if (loads.empty()) throw hadr::DataError("bench config lists no datasets");
    return loads;
}

int cmd_bench(const CommonArgs& common, const PipelineArgs& pipe, bool surrogate,
              const std::vector<std::string>& names, int seeds, double train_frac, int jobs) {
    std::vector<NamedLoad> loads;
    if (surrogate) {
        for (auto& input : surrogate_inputs(names)) {
            loads.push_back({input.name, std::move(input.data), ""});
        }
    } else if (!common.config_path.empty()) {
        loads = config_loads(common.config_path);
    } else {
        throw hadr::DataError("bench needs --surrogate or --config <file>");
    }

    const hadr::PipelineConfig cfg = pipe.build(common.seed);
    ensure_out_dir(common.out_dir);
    json effective = hadr::pipeline_config_to_json(cfg);
    effective["command"] = "bench";
    effective["seeds"] = seeds;
    effective["train_fraction"] = train_frac;
    effective["surrogate"] = surrogate;
    echo_config(common.out_dir, effective);

    hadr::BenchTable table;
    table.seeds = seeds;
    table.master_seed = common.seed;
    table.train_fraction = train_frac;
    for (NamedLoad& load : loads) {
        if (!load.data) {
            hadr::BenchRow row;
            row.dataset = load.name;
            row.error = load.error;
            table.rows.push_back(std::move(row));
            continue;
        }
        table.rows.push_back(hadr::bench_dataset({load.name, std::move(*load.data)}, cfg,
                                                 seeds, common.seed, train_frac, jobs));
    }
    hadr::write_json_file(hadr::bench_json(table),
                          (fs::path(common.out_dir) / "bench.json").string());
    const std::string md = hadr::bench_markdown(table);
    std::ofstream md_out(fs::path(common.out_dir) / "bench.md");
    md_out << md;
    std::cout << md;

    for (const auto& row : table.rows) {
        if (!row.error.empty()) {
            std::cerr << "warning: " << row.dataset << ": " << row.error << "\n";
        }
    }
    return 0;
}

int cmd_ablate(const CommonArgs& common, const PipelineArgs& pipe, bool surrogate,
               const std::string& name, int seeds, double train_frac, int jobs) {
    hadr::BenchInput input;
    if (surrogate) {
        const auto spec = hadr::find_benchmark_spec(name);
        if (!spec) throw hadr::DataError("unknown benchmark dataset: " + name);
        input = {spec->name, hadr::make_surrogate(*spec, kSurrogateDataSeed)};
    } else {
        input.data = load_any(common);
        input.name = input.data.name;
    }

    const hadr::PipelineConfig cfg = pipe.build(common.seed);
    ensure_out_dir(common.out_dir);
    json effective = hadr::pipeline_config_to_json(cfg);
    effective["command"] = "ablate";
    effective["seeds"] = seeds;
    effective["train_fraction"] = train_frac;
    echo_config(common.out_dir, effective);

    const auto rows = hadr::run_ablation(input, cfg, seeds, common.seed, train_frac, jobs);
    const std::string md = hadr::ablation_markdown(rows);
    std::ofstream(fs::path(common.out_dir) / "ablation.md") << md;
    std::ofstream(fs::path(common.out_dir) / "ablation.csv") << hadr::ablation_csv(rows);
    std::ofstream(fs::path(common.out_dir) / "ablation.svg") << hadr::ablation_svg(rows);
    hadr::write_json_file(hadr::ablation_json(rows),
                          (fs::path(common.out_dir) / "ablation.json").string());
    std::cout << md;
    return 0;
}

int cmd_inspect(const CommonArgs& common, bool dump_blocks) {
    const hadr::Dataset data = load_any(common);
    std::cout << "dataset " << data.name << "\n"
              << "samples " << data.n() << "\n"
              << "features " << data.m() << "\n"
              << "minority " << data.count(1) << "\n"
              << "majority " << data.count(0) << "\n";
    const auto st = hadr::compute_stats(data, hadr::Rounding::nearest);
    std::cout << "ir " << format3(st.ir) << "\n"
              << "ir_star nearest=" << st.ir_star
              << " floor=" << hadr::compute_stats(data, hadr::Rounding::floor).ir_star
              << " ceil=" << hadr::compute_stats(data, hadr::Rounding::ceil).ir_star << "\n";

    hadr::Rng rng(hadr::derive_seed(common.seed, "dbc", 0));
    const auto blocks = hadr::construct_blocks(data, st, rng);
    std::size_t lo = data.n(), hi = 0;
    for (const auto& b : blocks) {
        lo = std::min(lo, b.data.n());
        hi = std::max(hi, b.data.n());
    }
    std::cout << "blocks " << blocks.size() << " (sizes " << lo << ".." << hi << ")\n";

    if (dump_blocks) {
        ensure_out_dir(common.out_dir);
        const std::string path = (fs::path(common.out_dir) / "blocks.json").string();
        hadr::write_json_file(hadr::blocks_membership_json(blocks), path);
        std::cout << "blocks dumped to " << path << "\n";
    }
    return 0;
}

int cmd_gen(const std::string& name, const std::string& out_dir, const std::string& format) {
    ensure_out_dir(out_dir);
    std::vector<hadr::BenchmarkSpec> specs;
    if (name == "all") {
        specs = hadr::benchmark_specs();
    } else {
        const auto spec = hadr::find_benchmark_spec(name);
        if (!spec) throw hadr::DataError("unknown benchmark dataset: " + name);
        specs.push_back(*spec);
    }
    for (const auto& spec : specs) {
        const hadr::Dataset d = hadr::make_surrogate(spec, kSurrogateDataSeed);
        fs::path path = fs::path(out_dir) / (spec.name + (format == "json" ? ".json" : ".csv"));
        if (format == "json") {
            hadr::save_dataset_json(d, path.string());
        } else {
            hadr::save_csv(d, path.string());
        }
        std::cout << "wrote " << path.string() << " (n=" << d.n() << ", m=" << d.m() << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HADR: imbalanced binary classification via data blocks, "
                 "metric-learning dimensionality reduction, and MLP voting"};
    app.require_subcommand(1);

    CommonArgs common;
    PipelineArgs pipe;
    std::string model_path;
    bool surrogate = false;
    bool dump_blocks = false;
    std::vector<std::string> bench_names;
    std::string ablate_name;
    std::string gen_name = "all";
    std::string gen_format = "csv";
    int seeds = 10;
    double train_frac = 0.7;
    int jobs = 1;

    const auto add_common = [&](CLI::App* cmd, bool needs_data) {
        auto* data = cmd->add_option("--data", common.data_path, "dataset file");
        if (needs_data) data->required();
        cmd->add_option("--format", common.format, "csv|keel|json|auto");
        cmd->add_option("--label-col", common.label_col, "CSV label column (name or index)");
        cmd->add_option("--positive", common.positive, "raw value of the positive class");
        cmd->add_option("--out", common.out_dir, "output directory");
        cmd->add_option("--config", common.config_path, "JSON config file");
        auto* seed_opt = cmd->add_option("--seed", common.seed, "master seed");
        cmd->parse_complete_callback([&common, seed_opt] {
            common.seed_given = seed_opt->count() > 0;
            if (!common.seed_given) common.seed = env_seed_fallback();
        });
    };

    CLI::App* train = app.add_subcommand("train", "train a model on a dataset file");
    add_common(train, true);
    pipe.attach(train);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset file");
    add_common(eval, true);
    eval->add_option("--model", model_path, "model JSON produced by train")->required();

    CLI::App* bench = app.add_subcommand("bench", "multi-seed benchmark table");
    add_common(bench, false);
    pipe.attach(bench);
    bench->add_flag("--surrogate", surrogate, "use built-in surrogate datasets");
    bench->add_option("--datasets", bench_names, "subset of benchmark names");
    bench->add_option("--seeds", seeds, "number of seeds");
    bench->add_option("--train-frac", train_frac, "train fraction");
    bench->add_option("--jobs", jobs, "parallel workers");

    CLI::App* ablate = app.add_subcommand("ablate", "compare full / dr-mlp / dbc-mlp");
    add_common(ablate, false);
    pipe.attach(ablate);
    ablate->add_flag("--surrogate", surrogate, "use a built-in surrogate dataset");
    ablate->add_option("--name", ablate_name, "benchmark name for --surrogate");
    ablate->add_option("--seeds", seeds, "number of seeds");
    ablate->add_option("--train-frac", train_frac, "train fraction");
    ablate->add_option("--jobs", jobs, "parallel workers");

    CLI::App* inspect = app.add_subcommand("inspect", "imbalance and block statistics");
    add_common(inspect, true);
    inspect->add_flag("--dump-blocks", dump_blocks, "write block membership JSON");

    CLI::App* gen = app.add_subcommand("gen", "write surrogate dataset files");
    gen->add_option("--name", gen_name, "benchmark name or 'all'");
    gen->add_option("--out", common.out_dir, "output directory");
    gen->add_option("--gen-format", gen_format, "csv|json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors are exit code 1
    }

    try {
        // Config-file defaults for pipeline flags the command line left alone.
        if (!common.config_path.empty() && !app.got_subcommand(bench)) {
            pipe.merge_config(hadr::read_json_file(common.config_path));
        } else if (!common.config_path.empty() && app.got_subcommand(bench) &&
                   hadr::read_json_file(common.config_path).contains("pipeline")) {
            pipe.merge_config(hadr::read_json_file(common.config_path).at("pipeline"));
        }

        if (app.got_subcommand(train)) return cmd_train(common, pipe);
        if (app.got_subcommand(eval)) return cmd_eval(common, model_path);
        if (app.got_subcommand(bench)) {
            return cmd_bench(common, pipe, surrogate, bench_names, seeds, train_frac, jobs);
        }
        if (app.got_subcommand(ablate)) {
            return cmd_ablate(common, pipe, surrogate, ablate_name, seeds, train_frac, jobs);
        }
        if (app.got_subcommand(inspect)) return cmd_inspect(common, dump_blocks);
        if (app.got_subcommand(gen)) return cmd_gen(gen_name, common.out_dir, gen_format);
    } catch (const hadr::TrainError& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return 3;
    } catch (const hadr::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
