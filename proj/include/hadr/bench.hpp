#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hadr/dataset.hpp"
#include "hadr/ensemble.hpp"
#include "hadr/synth.hpp"

namespace hadr {

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation over seeds
};

struct BenchRow {
    std::string dataset;
    int seeds_run = 0;
    MetricStats auc;
    MetricStats recall;
    MetricStats g_mean;
    std::optional<BenchmarkSpec> reference; // published values for display
    std::vector<EvalReport> reports;        // one per seed
    std::string error;                      // non-empty when the row failed
};

struct BenchTable {
    std::vector<BenchRow> rows;
    int seeds = 0;
    std::uint64_t master_seed = 0;
    double train_fraction = 0.7;
};

struct BenchInput {
    std::string name;
    Dataset data;
};

// The full protocol for one dataset: for each seed, a stratified
// train/test split, a training run, and an evaluation. Per-seed seeds are
// derived from (master, dataset name, seed index), so rows and cells can
// run in any order or in parallel without changing a single number.
// Failures are captured in the row, never thrown.
BenchRow bench_dataset(const BenchInput& input, const PipelineConfig& base, int n_seeds,
                       std::uint64_t master_seed, double train_fraction, int jobs = 1);

BenchTable run_bench(const std::vector<BenchInput>& inputs, const PipelineConfig& base,
                     int n_seeds, std::uint64_t master_seed, double train_fraction,
                     int jobs = 1);

// Ablation: the same splits and seeds across the three pipeline modes, so
// differences are attributable to the mode alone.
struct AblationRow {
    std::string dataset;
    PipelineMode mode;
    MetricStats auc;
    MetricStats recall;
    MetricStats g_mean;
    std::string error;
};

std::vector<AblationRow> run_ablation(const BenchInput& input, const PipelineConfig& base,
                                      int n_seeds, std::uint64_t master_seed,
                                      double train_fraction, int jobs = 1);

std::string bench_markdown(const BenchTable& table);
nlohmann::json bench_json(const BenchTable& table);
std::string ablation_markdown(const std::vector<AblationRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_svg(const std::vector<AblationRow>& rows);
nlohmann::json ablation_json(const std::vector<AblationRow>& rows);

const char* mode_label(PipelineMode mode);

} // namespace hadr
