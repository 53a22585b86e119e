#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rial/dataio.hpp"
#include "rial/stats.hpp"

namespace rial {

enum class Strategy { proposed, random, margin };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);
std::vector<Strategy> parse_strategy_list(const std::string& text);

struct ExperimentConfig {
    std::string data_path;
    DataFormat format = DataFormat::sparse;
    int label_column = -1;

    std::vector<Strategy> strategies{Strategy::proposed, Strategy::random, Strategy::margin};
    std::size_t runs = 10;
    double train_fraction = 0.6;
    std::size_t max_queries = 100;

    // Fixed trade-off; when empty, each run picks one from beta_candidates
    // with a pilot search on its own training partition.
    std::optional<double> beta;
    std::vector<double> beta_candidates{1.0, 2.0, 10.0, 100.0, 1000.0};
    std::size_t pilot_queries = 5;
    std::size_t pilot_folds = 5;

    double gamma = 1.0;                 // probability-kernel width
    std::optional<double> svm_gamma;    // defaults to 1 / n_features
    double svm_c = 100.0;
    bool negated_position_exponent = false;

    std::uint64_t seed = 0;
    bool normalize = false;
    std::size_t threads = 0;  // 0: hardware concurrency
    std::size_t checkpoint_start = 5;
    std::string out_dir = "results";

    void validate() const;
};

struct RunResult {
    std::string strategy;
    std::size_t run = 0;
    double beta = 0.0;  // trade-off used by the proposed strategy, else 0
    std::vector<double> accuracy;  // accuracy[t] after t queries
    std::vector<std::size_t> queried;
    std::vector<int> oracle_labels;
    std::vector<double> seconds;  // wall time of each query step; never persisted
    // Proposed strategy only: how often greedy rounding picked the best vertex.
    std::size_t rounding_agreements = 0;
    std::size_t rounding_total = 0;
};

// Runs every strategy over `runs` random 60/40-style splits. Within a run all
// strategies share the split and the initial one-per-class pool.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, const Dataset& data);
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

// Trade-off picked for one run by the pilot search (exposed for tests).
double select_beta_by_pilot(const ExperimentConfig& config, const Dataset& data,
                            const std::vector<std::size_t>& train, std::uint64_t run_seed);

struct WtlRow {
    std::string competitor;
    std::size_t win = 0;
    std::size_t tie = 0;
    std::size_t loss = 0;
};

struct WtlSummary {
    std::string reference;
    std::vector<std::size_t> checkpoints;
    std::vector<WtlRow> rows;
};

// Iterations checkpoint_start..last available iteration of the shortest curve.
std::vector<std::size_t> default_checkpoints(const std::vector<RunResult>& results, std::size_t start);

// Paired t-test across runs of `reference` against every other strategy at
// each checkpoint.
WtlSummary summarize_wtl(const std::vector<RunResult>& results, const std::vector<std::size_t>& checkpoints,
                         const std::string& reference = "proposed", double significance = 0.05);

struct BetaCurve {
    double beta = 0.0;
    std::vector<double> mean_accuracy;
};

// Proposed strategy once per beta with identical seeds.
std::vector<BetaCurve> beta_sweep(const ExperimentConfig& config, const Dataset& data,
                                  const std::vector<double>& betas);

// Mean accuracy curve of one strategy over its runs.
std::vector<double> mean_curve(const std::vector<RunResult>& results, const std::string& strategy);

// curves.csv, summary.txt and wtl.tsv under `directory` (created if needed).
void emit_results(const std::vector<RunResult>& results, const WtlSummary& summary,
                  const std::string& dataset_name, const std::string& directory);

void write_curves_csv(std::ostream& out, const std::vector<RunResult>& results);
void write_wtl_tsv(std::ostream& out, const std::vector<std::pair<std::string, WtlSummary>>& table);
void write_sweep_csv(std::ostream& out, const std::vector<BetaCurve>& curves);

// Reads curves written by write_curves_csv (strategy,run,iteration,accuracy).
std::vector<RunResult> read_curves_csv(std::istream& in);
std::vector<RunResult> read_curves_csv(const std::string& path);

}  // namespace rial
