#include "rial/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rial/errors.hpp"
#include "rial/optimizer.hpp"
#include "rial/random.hpp"
#include "rial/svm.hpp"

namespace rial {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::proposed: return "proposed";
        case Strategy::random: return "random";
        case Strategy::margin: return "margin";
    }
    return "?";
}

Strategy parse_strategy(const std::string& text) {
    if (text == "proposed")
        return Strategy::proposed;
    if (text == "random")
        return Strategy::random;
    if (text == "margin")
        return Strategy::margin;
    throw UsageError("unknown strategy '" + text + "' (expected proposed, random or margin)");
}

std::vector<Strategy> parse_strategy_list(const std::string& text) {
    std::vector<Strategy> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_strategy(item));
    if (out.empty())
        throw UsageError("no strategies given");
    return out;
}

void ExperimentConfig::validate() const {
    if (runs < 1)
        throw UsageError("runs must be at least 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw UsageError("train fraction must lie strictly between 0 and 1");
    if (strategies.empty())
        throw UsageError("no strategies given");
    if (beta && !(*beta >= 0.0))
        throw UsageError("beta must be nonnegative");
    if (!beta && beta_candidates.empty())
        throw UsageError("beta candidate list is empty");
    if (!(gamma >= 0.0))
        throw UsageError("gamma must be nonnegative");
    if (!(svm_c > 0.0) || (svm_gamma && !(*svm_gamma > 0.0)))
        throw UsageError("svm parameters must be positive");
}

namespace {

struct Partition {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

constexpr int kSplitRetries = 100;

Partition split_with_all_classes(const Dataset& data, double fraction, std::uint64_t seed) {
    for (int attempt = 0; attempt < kSplitRetries; ++attempt) {
        const auto s = split_train_test(data.size(), fraction, attempt == 0 ? seed : mix_seed(seed, attempt));
        std::vector<bool> seen(static_cast<std::size_t>(data.class_count), false);
        for (std::size_t i : s.train)
            seen[static_cast<std::size_t>(data.labels[i])] = true;
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
            return {s.train, s.test};
    }
    throw DataError("could not draw a training split containing every class");
}

KernelParams svm_params(const ExperimentConfig& config, const Dataset& data) {
    KernelParams p;
    p.kernel_gamma = config.svm_gamma.value_or(1.0 / static_cast<double>(std::max<std::size_t>(1, data.feature_count())));
    p.c_reg = config.svm_c;
    return p;
}

TrainedModel train_on_pool(const Dataset& data, const PoolState& pool, const KernelParams& params) {
    return train(data.features.select_rows(pool.labeled), pool.labeled_labels, params);
}

double accuracy(const TrainedModel& model, const Matrix& features, const std::vector<int>& labels) {
    const auto predicted = predict(model, features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        correct += predicted[i] == labels[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

ProposedParams proposed_params(const ExperimentConfig& config, double beta) {
    ProposedParams p;
    p.gamma = config.gamma;
    p.beta = beta;
    p.negated_position_exponent = config.negated_position_exponent;
    return p;
}

// Next query of one strategy; fills the rounding statistics for `proposed`.
std::size_t next_query(Strategy strategy, const Dataset& data, const PoolState& pool, const TrainedModel& model,
                       const ExperimentConfig& config, double beta, std::uint64_t stream_seed, RunResult* record) {
    switch (strategy) {
        case Strategy::random:
            return select_random(pool, stream_seed);
        case Strategy::margin:
            return pool.unlabeled[select_margin(model, data.features.select_rows(pool.unlabeled))];
        case Strategy::proposed: {
            PoolProbabilities probs{predict_proba(model, data.features.select_rows(pool.labeled)),
                                    predict_proba(model, data.features.select_rows(pool.unlabeled))};
            const auto sel = select_proposed_detailed(model, pool, probs, proposed_params(config, beta));
            if (record) {
                ++record->rounding_total;
                if (sel.best_vertex == sel.position)
                    ++record->rounding_agreements;
            }
            return sel.index;
        }
    }
    throw UsageError("unknown strategy");
}

// Mean k-fold accuracy of the classifier over the labeled pilot pool.
double labeled_cv_accuracy(const Dataset& data, const PoolState& pool, const KernelParams& params,
                           std::size_t folds, std::uint64_t seed) {
    const std::size_t n = pool.labeled.size();
    folds = std::min(folds, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[uniform_index(rng, i + 1)]);

    std::size_t correct = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        std::vector<int> train_labels;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t pos = order[k];
            if (k % folds == f) {
                test_rows.push_back(pos);
            } else {
                train_rows.push_back(pool.labeled[pos]);
                train_labels.push_back(pool.labeled_labels[pos]);
            }
        }
        const bool single_class =
            std::adjacent_find(train_labels.begin(), train_labels.end(), std::not_equal_to<>()) == train_labels.end();
        if (single_class) {
            for (std::size_t pos : test_rows)
                correct += pool.labeled_labels[pos] == train_labels.front() ? 1 : 0;
            continue;
        }
        const auto model = train(data.features.select_rows(train_rows), train_labels, params);
        std::vector<std::size_t> test_idx;
        for (std::size_t pos : test_rows)
            test_idx.push_back(pool.labeled[pos]);
        const auto predicted = predict(model, data.features.select_rows(test_idx));
        for (std::size_t k = 0; k < test_rows.size(); ++k)
            correct += predicted[k] == pool.labeled_labels[test_rows[k]] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

RunResult run_strategy(Strategy strategy, std::size_t run, const Dataset& data, const PoolState& initial,
                       const Matrix& test_features, const std::vector<int>& test_labels,
                       const ExperimentConfig& config, double beta, std::uint64_t run_seed) {
    const auto params = svm_params(config, data);
    const std::uint64_t stream_seed = mix_seed(run_seed, stable_hash(to_string(strategy)));

    RunResult result;
    result.strategy = to_string(strategy);
    result.run = run;
    result.beta = strategy == Strategy::proposed ? beta : 0.0;

    PoolState pool = initial;
    for (std::size_t t = 0;; ++t) {
        const auto model = train_on_pool(data, pool, params);
        result.accuracy.push_back(accuracy(model, test_features, test_labels));
        if (t == config.max_queries || pool.unlabeled.empty())
            break;

        const auto start = std::chrono::steady_clock::now();
        const std::size_t index = next_query(strategy, data, pool, model, config, beta, stream_seed, &result);
        result.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());

        const int oracle = data.labels[index];
        pool = commit_query(pool, index, oracle);
        result.queried.push_back(index);
        result.oracle_labels.push_back(oracle);
    }
    return result;
}

std::vector<RunResult> run_single(const ExperimentConfig& config, const Dataset& data, std::size_t run) {
    const std::uint64_t run_seed = mix_seed(config.seed, run);
    const auto part = split_with_all_classes(data, config.train_fraction, config.seed + run);
    const auto initial = init_pool(data, part.train, mix_seed(run_seed, stable_hash("initial-pool")));
    const Matrix test_features = data.features.select_rows(part.test);
    std::vector<int> test_labels;
    for (std::size_t i : part.test)
        test_labels.push_back(data.labels[i]);

    const bool needs_beta =
        std::find(config.strategies.begin(), config.strategies.end(), Strategy::proposed) != config.strategies.end();
    const double beta = config.beta ? *config.beta
                        : needs_beta ? select_beta_by_pilot(config, data, part.train, run_seed)
                                     : 0.0;

    std::vector<RunResult> out;
    for (Strategy s : config.strategies)
        out.push_back(run_strategy(s, run, data, initial, test_features, test_labels, config, beta, run_seed));
    return out;
}

}  // namespace

double select_beta_by_pilot(const ExperimentConfig& config, const Dataset& data,
                            const std::vector<std::size_t>& train_indices, std::uint64_t run_seed) {
    const std::uint64_t pilot_seed = mix_seed(run_seed, stable_hash("pilot"));
    const auto params = svm_params(config, data);
    const PoolState start = init_pool(data, train_indices, pilot_seed);

    double best_beta = config.beta_candidates.front();
    double best_score = -1.0;
    for (double beta : config.beta_candidates) {
        PoolState pool = start;
        for (std::size_t q = 0; q < config.pilot_queries && !pool.unlabeled.empty(); ++q) {
            const auto model = train_on_pool(data, pool, params);
            const std::size_t index = next_query(Strategy::proposed, data, pool, model, config, beta, 0, nullptr);
            pool = commit_query(pool, index, data.labels[index]);
        }
        const double score = labeled_cv_accuracy(data, pool, params, config.pilot_folds, pilot_seed);
        if (score > best_score) {
            best_score = score;
            best_beta = beta;
        }
    }
    return best_beta;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, const Dataset& input) {
    config.validate();
    input.validate(true);
    const Dataset data = config.normalize ? min_max_normalize(input) : input;

    std::vector<std::vector<RunResult>> per_run(config.runs);
    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.runs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < config.runs; r = next++) {
                    try {
                        per_run[r] = run_single(config, data, r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = config.runs;
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<RunResult> results;
    for (Strategy s : config.strategies)
        for (auto& run : per_run)
            for (auto& r : run)
                if (r.strategy == to_string(s))
                    results.push_back(std::move(r));
    return results;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, load_dataset(config.data_path, config.format, config.label_column));
}

std::vector<std::size_t> default_checkpoints(const std::vector<RunResult>& results, std::size_t start) {
    if (results.empty())
        return {};
    std::size_t len = results.front().accuracy.size();
    for (const auto& r : results)
        len = std::min(len, r.accuracy.size());
    std::vector<std::size_t> out;
    for (std::size_t t = start; t < len; ++t)
        out.push_back(t);
    return out;
}

WtlSummary summarize_wtl(const std::vector<RunResult>& results, const std::vector<std::size_t>& checkpoints,
                         const std::string& reference, double significance) {
    std::map<std::string, std::map<std::size_t, const RunResult*>> by_strategy;
    std::vector<std::string> order;
    for (const auto& r : results) {
        if (!by_strategy.contains(r.strategy))
            order.push_back(r.strategy);
        if (!by_strategy[r.strategy].emplace(r.run, &r).second)
            throw DataError("duplicate run " + std::to_string(r.run) + " for strategy " + r.strategy);
    }
    if (order.size() < 2)
        throw DataError("win/tie/loss needs at least two strategies");
    if (!by_strategy.contains(reference))
        throw DataError("reference strategy '" + reference + "' not present");

    const auto& ref_runs = by_strategy.at(reference);
    WtlSummary summary;
    summary.reference = reference;
    summary.checkpoints = checkpoints;
    for (const auto& name : order) {
        if (name == reference)
            continue;
        const auto& other = by_strategy.at(name);
        if (other.size() != ref_runs.size())
            throw DataError("strategy " + name + " has a different number of runs than " + reference);
        WtlRow row{name};
        for (std::size_t t : checkpoints) {
            std::vector<double> a, b;
            for (const auto& [run, ref] : ref_runs) {
                const auto it = other.find(run);
                if (it == other.end())
                    throw DataError("run " + std::to_string(run) + " missing for strategy " + name);
                if (t >= ref->accuracy.size() || t >= it->second->accuracy.size())
                    throw DataError("checkpoint " + std::to_string(t) + " beyond the recorded curves");
                a.push_back(ref->accuracy[t]);
                b.push_back(it->second->accuracy[t]);
            }
            switch (paired_t_test(a, b, significance)) {
                case Outcome::win: ++row.win; break;
                case Outcome::tie: ++row.tie; break;
                case Outcome::loss: ++row.loss; break;
            }
        }
        summary.rows.push_back(row);
    }
    return summary;
}

std::vector<double> mean_curve(const std::vector<RunResult>& results, const std::string& strategy) {
    std::vector<double> sum;
    std::vector<std::size_t> count;
    for (const auto& r : results) {
        if (r.strategy != strategy)
            continue;
        if (sum.size() < r.accuracy.size()) {
            sum.resize(r.accuracy.size(), 0.0);
            count.resize(r.accuracy.size(), 0);
        }
        for (std::size_t t = 0; t < r.accuracy.size(); ++t) {
            sum[t] += r.accuracy[t];
            ++count[t];
        }
    }
    for (std::size_t t = 0; t < sum.size(); ++t)
        sum[t] /= static_cast<double>(count[t]);
    return sum;
}

std::vector<BetaCurve> beta_sweep(const ExperimentConfig& config, const Dataset& data,
                                  const std::vector<double>& betas) {
    if (betas.empty())
        throw UsageError("beta sweep needs at least one value");
    std::vector<BetaCurve> out;
    for (double beta : betas) {
        ExperimentConfig c = config;
        c.strategies = {Strategy::proposed};
        c.beta = beta;
        out.push_back({beta, mean_curve(run_experiment(c, data), "proposed")});
    }
    return out;
}

}  // namespace rial
