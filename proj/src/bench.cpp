#include "hadr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "hadr/errors.hpp"

namespace hadr {

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work items are
// independent; results land in caller-owned slots, so order cannot matter.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<std::size_t>(jobs, count);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

MetricStats stats_of(const std::vector<double>& xs) {
    MetricStats s;
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return s;
}

EvalReport run_cell(const BenchInput& input, PipelineConfig cfg, std::uint64_t cell_seed,
                    double train_fraction, PipelineMode mode) {
    const SplitPair split = stratified_split(input.data, train_fraction, cell_seed);
    cfg.master_seed = derive_seed(cell_seed, "train", 0);
    cfg.mode = mode;
    const HadrModel model = train_hadr(split.train, cfg);
    EvalReport report = evaluate(model, split.test);
    report.dataset = input.name;
    report.seed = cell_seed;
    return report;
}

std::string format3(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << v;
    return os.str();
}

} // namespace

const char* mode_label(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::dr_mlp: return "dr-mlp";
        case PipelineMode::dbc_mlp: return "dbc-mlp";
        default: return "full";
    }
}

BenchRow bench_dataset(const BenchInput& input, const PipelineConfig& base, int n_seeds,
                       std::uint64_t master_seed, double train_fraction, int jobs) {
    BenchRow row;
    row.dataset = input.name;
    row.reference = find_benchmark_spec(input.name);
    row.reports.resize(n_seeds);

    std::vector<std::string> errors(n_seeds);
    parallel_for(static_cast<std::size_t>(n_seeds), jobs, [&](std::size_t s) {
        const std::uint64_t cell_seed = derive_seed(master_seed, "bench:" + input.name, s);
        try {
            row.reports[s] = run_cell(input, base, cell_seed, train_fraction, base.mode);
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    });

    std::vector<double> aucs, recalls, gmeans;
    for (int s = 0; s < n_seeds; ++s) {
        if (!errors[s].empty()) {
            row.error = "seed " + std::to_string(s) + ": " + errors[s];
            continue;
        }
        aucs.push_back(row.reports[s].auc);
        recalls.push_back(row.reports[s].recall);
        gmeans.push_back(row.reports[s].g_mean);
        ++row.seeds_run;
    }
    row.auc = stats_of(aucs);
    row.recall = stats_of(recalls);
    row.g_mean = stats_of(gmeans);
    return row;
}

BenchTable run_bench(const std::vector<BenchInput>& inputs, const PipelineConfig& base,
                     int n_seeds, std::uint64_t master_seed, double train_fraction, int jobs) {
    BenchTable table;
    table.seeds = n_seeds;
    table.master_seed = master_seed;
    table.train_fraction = train_fraction;
    for (const BenchInput& input : inputs) {
        table.rows.push_back(
            bench_dataset(input, base, n_seeds, master_seed, train_fraction, jobs));
    }
    return table;
}

std::vector<AblationRow> run_ablation(const BenchInput& input, const PipelineConfig& base,
                                      int n_seeds, std::uint64_t master_seed,
                                      double train_fraction, int jobs) {
    const PipelineMode modes[] = {PipelineMode::full, PipelineMode::dr_mlp,
                                  PipelineMode::dbc_mlp};
    struct Cell {
        EvalReport report;
        std::string error;
    };
    std::vector<Cell> cells(3 * static_cast<std::size_t>(n_seeds));

    // Same cell seed for every mode: identical splits, mode is the only
    // thing that differs.
    parallel_for(cells.size(), jobs, [&](std::size_t idx) {
        const std::size_t mode_idx = idx / n_seeds;
        const std::size_t s = idx % n_seeds;
        const std::uint64_t cell_seed = derive_seed(master_seed, "bench:" + input.name, s);
        try {
            cells[idx].report =
                run_cell(input, base, cell_seed, train_fraction, modes[mode_idx]);
        } catch (const std::exception& e) {
            cells[idx].error = e.what();
        }
    });

    std::vector<AblationRow> rows;
    for (std::size_t mode_idx = 0; mode_idx < 3; ++mode_idx) {
        AblationRow row;
        row.dataset = input.name;
        row.mode = modes[mode_idx];
        std::vector<double> aucs, recalls, gmeans;
        for (int s = 0; s < n_seeds; ++s) {
            const Cell& cell = cells[mode_idx * n_seeds + s];
            if (!cell.error.empty()) {
                row.error = "seed " + std::to_string(s) + ": " + cell.error;
                continue;
            }
            aucs.push_back(cell.report.auc);
            recalls.push_back(cell.report.recall);
            gmeans.push_back(cell.report.g_mean);
        }
        row.auc = stats_of(aucs);
        row.recall = stats_of(recalls);
        row.g_mean = stats_of(gmeans);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string bench_markdown(const BenchTable& table) {
    std::ostringstream os;
    os << "| dataset | seeds | AUC (mean±std) | ref AUC | recall (mean±std) | ref recall "
          "| G-mean (mean±std) | ref G-mean |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const BenchRow& row : table.rows) {
        os << "| " << row.dataset << " | ";
        if (!row.error.empty() && row.seeds_run == 0) {
            os << "error: " << row.error << " |\n";
            continue;
        }
        os << row.seeds_run << " | " << format3(row.auc.mean) << "±" << format3(row.auc.stddev)
           << " | " << (row.reference ? format3(row.reference->ref_auc) : std::string("-"))
           << " | " << format3(row.recall.mean) << "±" << format3(row.recall.stddev) << " | "
           << (row.reference ? format3(row.reference->ref_recall) : std::string("-")) << " | "
           << format3(row.g_mean.mean) << "±" << format3(row.g_mean.stddev) << " | "
           << (row.reference ? format3(row.reference->ref_g_mean) : std::string("-")) << " |\n";
    }
    os << "\nReference columns are the published results for this method; source: "
          "published benchmark tables (AUC / recall / G-mean).\n";
    return os.str();
}

nlohmann::json bench_json(const BenchTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRow& row : table.rows) {
        nlohmann::json entry{
            {"dataset", row.dataset},
            {"seeds_run", row.seeds_run},
            {"auc", {{"mean", row.auc.mean}, {"std", row.auc.stddev}}},
            {"recall", {{"mean", row.recall.mean}, {"std", row.recall.stddev}}},
            {"g_mean", {{"mean", row.g_mean.mean}, {"std", row.g_mean.stddev}}},
        };
        if (row.reference) {
            entry["reference"] = {{"auc", row.reference->ref_auc},
                                  {"recall", row.reference->ref_recall},
                                  {"g_mean", row.reference->ref_g_mean},
                                  {"source", "published results"}};
        }
        if (!row.error.empty()) entry["error"] = row.error;
        nlohmann::json seeds = nlohmann::json::array();
        for (const EvalReport& r : row.reports) {
            seeds.push_back({{"seed", r.seed},
                             {"auc", r.auc},
                             {"recall", r.recall},
                             {"g_mean", r.g_mean}});
        }
        entry["cells"] = std::move(seeds);
        rows.push_back(std::move(entry));
    }
    return nlohmann::json{{"seeds", table.seeds},
                          {"master_seed", table.master_seed},
                          {"train_fraction", table.train_fraction},
                          {"rows", std::move(rows)}};
}

std::string ablation_markdown(const std::vector<AblationRow>& rows) {
    std::ostringstream os;
    os << "| dataset | mode | recall | G-mean | AUC |\n|---|---|---|---|---|\n";
    for (const AblationRow& row : rows) {
        os << "| " << row.dataset << " | " << mode_label(row.mode) << " | ";
        if (!row.error.empty()) {
            os << "error: " << row.error << " |\n";
            continue;
        }
        os << format3(row.recall.mean) << "±" << format3(row.recall.stddev) << " | "
           << format3(row.g_mean.mean) << "±" << format3(row.g_mean.stddev) << " | "
           << format3(row.auc.mean) << "±" << format3(row.auc.stddev) << " |\n";
    }
    return os.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream os;
    os << "dataset,mode,metric,mean,std\n";
    for (const AblationRow& row : rows) {
        os << row.dataset << ',' << mode_label(row.mode) << ",recall," << row.recall.mean << ','
           << row.recall.stddev << '\n';
        os << row.dataset << ',' << mode_label(row.mode) << ",g_mean," << row.g_mean.mean << ','
           << row.g_mean.stddev << '\n';
        os << row.dataset << ',' << mode_label(row.mode) << ",auc," << row.auc.mean << ','
           << row.auc.stddev << '\n';
    }
    return os.str();
}

std::string ablation_svg(const std::vector<AblationRow>& rows) {
    // Grouped bars: one group per metric, one bar per mode.
    const char* metric_names[] = {"recall", "g_mean", "auc"};
    const char* colors[] = {"#4878d0", "#ee854a", "#6acc64"};
    const int width = 560, height = 280, base_y = 230, group_w = 150, bar_w = 36;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "<line x1=\"40\" y1=\"" << base_y << "\" x2=\"" << width - 20 << "\" y2=\"" << base_y
       << "\" stroke=\"black\"/>\n";
    for (int g = 0; g <= 4; ++g) {
        const int y = base_y - g * 50;
        os << "<text x=\"8\" y=\"" << y + 4 << "\" font-size=\"11\">" << format3(g * 0.25)
           << "</text>\n";
        os << "<line x1=\"36\" y1=\"" << y << "\" x2=\"40\" y2=\"" << y
           << "\" stroke=\"black\"/>\n";
    }
    for (int metric = 0; metric < 3; ++metric) {
        const int gx = 60 + metric * group_w;
        os << "<text x=\"" << gx + 20 << "\" y=\"" << base_y + 20 << "\" font-size=\"12\">"
           << metric_names[metric] << "</text>\n";
        for (std::size_t r = 0; r < rows.size() && r < 3; ++r) {
            double v = metric == 0   ? rows[r].recall.mean
                       : metric == 1 ? rows[r].g_mean.mean
                                     : rows[r].auc.mean;
            v = std::clamp(v, 0.0, 1.0);
            const int h = static_cast<int>(v * 200.0);
            const int x = gx + static_cast<int>(r) * (bar_w + 4);
            os << "<rect x=\"" << x << "\" y=\"" << base_y - h << "\" width=\"" << bar_w
               << "\" height=\"" << h << "\" fill=\"" << colors[r % 3] << "\"/>\n";
        }
    }
    for (std::size_t r = 0; r < rows.size() && r < 3; ++r) {
        const int x = 60 + static_cast<int>(r) * 120;
        os << "<rect x=\"" << x << "\" y=\"" << 14 << "\" width=\"12\" height=\"12\" fill=\""
           << colors[r % 3] << "\"/>\n";
        os << "<text x=\"" << x + 16 << "\" y=\"" << 24 << "\" font-size=\"12\">"
           << mode_label(rows[r].mode) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

nlohmann::json ablation_json(const std::vector<AblationRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const AblationRow& row : rows) {
        nlohmann::json entry{
            {"dataset", row.dataset},
            {"mode", mode_label(row.mode)},
            {"recall", {{"mean", row.recall.mean}, {"std", row.recall.stddev}}},
            {"g_mean", {{"mean", row.g_mean.mean}, {"std", row.g_mean.stddev}}},
            {"auc", {{"mean", row.auc.mean}, {"std", row.auc.stddev}}},
        };
        if (!row.error.empty()) entry["error"] = row.error;
        out.push_back(std::move(entry));
    }
    return out;
}

} // namespace hadr
