// Command-line front end: run, bench, sweep, ttest, convert.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rial/dataio.hpp"
#include "rial/errors.hpp"
#include "rial/harness.hpp"

namespace fs = std::filesystem;
using namespace rial;

namespace {

struct Options {
    std::vector<std::string> data;
    std::string format = "sparse";
    int label_column = -1;
    std::vector<std::string> strategies{"proposed", "random", "margin"};
    std::size_t runs = 10;
    double train_fraction = 0.6;
    std::size_t max_queries = 100;
    std::vector<std::string> beta{"auto"};
    double gamma = 1.0;
    double svm_c = 100.0;
    double svm_gamma = 0.0;
    std::uint64_t seed = 0;
    bool normalize = false;
    bool negated_exponent = false;
    std::size_t threads = 0;
    std::size_t checkpoint_start = 5;
    std::string out = "results";

    // ttest / convert
    std::vector<std::string> curves;
    std::string reference = "proposed";
    std::string name = "curves";
    std::string to;
    std::string output;
};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items)
        out += (out.empty() ? "" : ",") + item;
    return out;
}

bool is_auto(const Options& o) { return o.beta.size() == 1 && o.beta.front() == "auto"; }

std::vector<double> parse_number_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& item : items) {
        double v;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size())
            throw UsageError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw UsageError("empty number list");
    return out;
}

ExperimentConfig make_config(const Options& o, const std::string& data_path) {
    ExperimentConfig c;
    c.data_path = data_path;
    c.format = parse_format(o.format);
    c.label_column = o.label_column;
    c.strategies = parse_strategy_list(join(o.strategies));
    c.runs = o.runs;
    c.train_fraction = o.train_fraction;
    c.max_queries = o.max_queries;
    if (!is_auto(o)) {
        const auto values = parse_number_list(o.beta);
        if (values.size() == 1)
            c.beta = values.front();
        else
            c.beta_candidates = values;
    }
    c.gamma = o.gamma;
    c.svm_c = o.svm_c;
    if (o.svm_gamma > 0.0)
        c.svm_gamma = o.svm_gamma;
    c.seed = o.seed;
    c.normalize = o.normalize;
    c.negated_position_exponent = o.negated_exponent;
    c.threads = o.threads;
    c.checkpoint_start = o.checkpoint_start;
    c.out_dir = o.out;
    c.validate();
    return c;
}

const std::string& single_data(const Options& o) {
    if (o.data.size() != 1)
        throw UsageError("exactly one --data path is required");
    return o.data.front();
}

bool has_reference(const std::vector<RunResult>& results, const std::string& reference) {
    bool ref = false, other = false;
    for (const auto& r : results)
        (r.strategy == reference ? ref : other) = true;
    return ref && other;
}

WtlSummary wtl_or_empty(const std::vector<RunResult>& results, std::size_t start, const std::string& reference) {
    if (!has_reference(results, reference))
        return WtlSummary{reference, {}, {}};
    return summarize_wtl(results, default_checkpoints(results, start), reference);
}

void print_wtl(const std::string& name, const WtlSummary& summary) {
    write_wtl_tsv(std::cout, {{name, summary}});
}

int cmd_run(const Options& o) {
    const auto config = make_config(o, single_data(o));
    const auto data = load_dataset(config.data_path, config.format, config.label_column);
    const auto results = run_experiment(config, data);
    const auto summary = wtl_or_empty(results, config.checkpoint_start, "proposed");
    emit_results(results, summary, data.name, config.out_dir);
    print_wtl(data.name, summary);
    std::cout << "results written to " << config.out_dir << '\n';
    return 0;
}

int cmd_bench(const Options& o) {
    if (o.data.empty())
        throw UsageError("bench needs at least one --data path");
    std::vector<std::pair<std::string, WtlSummary>> table;
    for (const auto& path : o.data) {
        auto config = make_config(o, path);
        const auto data = load_dataset(path, config.format, config.label_column);
        config.out_dir = (fs::path(o.out) / data.name).string();
        const auto results = run_experiment(config, data);
        const auto summary = wtl_or_empty(results, config.checkpoint_start, "proposed");
        emit_results(results, summary, data.name, config.out_dir);
        table.emplace_back(data.name, summary);
    }
    const auto path = fs::path(o.out) / "wtl.tsv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    write_wtl_tsv(out, table);
    write_wtl_tsv(std::cout, table);
    return 0;
}

int cmd_sweep(const Options& o) {
    const auto config = make_config(o, single_data(o));
    const auto betas = is_auto(o) ? config.beta_candidates
                                        : config.beta ? std::vector<double>{*config.beta} : config.beta_candidates;
    const auto data = load_dataset(config.data_path, config.format, config.label_column);
    const auto curves = beta_sweep(config, data, betas);
    fs::create_directories(o.out);
    const auto path = fs::path(o.out) / "sweep.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    write_sweep_csv(out, curves);
    for (const auto& c : curves)
        std::cout << "beta=" << c.beta << " final_mean_accuracy=" << c.mean_accuracy.back() << '\n';
    return 0;
}

int cmd_ttest(const Options& o) {
    if (o.curves.empty())
        throw UsageError("ttest needs at least one --curves file");
    std::vector<RunResult> results;
    for (const auto& path : o.curves) {
        auto part = read_curves_csv(path);
        results.insert(results.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    const auto summary = summarize_wtl(results, default_checkpoints(results, o.checkpoint_start), o.reference);
    print_wtl(o.name, summary);
    if (!o.output.empty()) {
        std::ofstream out(o.output, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write '" + o.output + "'");
        write_wtl_tsv(out, {{o.name, summary}});
    }
    return 0;
}

int cmd_convert(const Options& o) {
    const auto data = load_dataset(single_data(o), parse_format(o.format), o.label_column);
    if (o.output.empty())
        throw UsageError("convert needs --output");
    const auto target = parse_format(o.to);
    std::ofstream out(o.output, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + o.output + "'");
    if (target == DataFormat::csv)
        write_csv(out, data);
    else
        write_sparse(out, data);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pool-based active learning with representativeness and informativeness"};
    app.set_config("--config", "", "Flat key=value file mirroring the flags; flags override it");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Options o;
    app.add_option("--data", o.data, "Dataset path (repeat for bench)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--format", o.format, "Dataset format: sparse or csv")->capture_default_str();
    app.add_option("--label-column", o.label_column, "CSV label column; negative counts from the right")
        ->capture_default_str();
    // Comma lists may also arrive split into several values from the config file.
    app.add_option("--strategies", o.strategies, "Comma list of proposed, random, margin")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->capture_default_str();
    app.add_option("--runs", o.runs, "Number of random splits")->capture_default_str();
    app.add_option("--train-fraction", o.train_fraction, "Share of samples used as the training pool")
        ->capture_default_str();
    app.add_option("--max-queries", o.max_queries, "Queries per run")->capture_default_str();
    app.add_option("--beta", o.beta, "Trade-off: a value, a comma list of candidates, or auto")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->capture_default_str();
    app.add_option("--gamma", o.gamma, "Probability-kernel width")->capture_default_str();
    app.add_option("--svm-c", o.svm_c, "SVM soft-margin penalty")->capture_default_str();
    app.add_option("--svm-gamma", o.svm_gamma, "SVM RBF width (0: 1/n_features)")->capture_default_str();
    app.add_option("--seed", o.seed, "Base random seed")->capture_default_str();
    app.add_flag("--normalize", o.normalize, "Min-max rescale features to [0,1]");
    app.add_flag("--negated-position-exponent", o.negated_exponent, "Use exp(-d^2) for the position measure");
    app.add_option("--threads", o.threads, "Worker threads for runs (0: all cores)")->capture_default_str();
    app.add_option("--checkpoint-start", o.checkpoint_start, "First iteration compared in win/tie/loss")
        ->capture_default_str();
    app.add_option("--out", o.out, "Output directory")->capture_default_str();

    auto* run = app.add_subcommand("run", "Run one experiment configuration")->fallthrough();
    auto* bench = app.add_subcommand("bench", "Run every --data set and tabulate win/tie/loss")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "Beta sensitivity of the proposed strategy")->fallthrough();
    auto* ttest = app.add_subcommand("ttest", "Recompute win/tie/loss from stored curves")->fallthrough();
    ttest->add_option("--curves", o.curves, "curves.csv file (repeatable)")->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ttest->add_option("--reference", o.reference, "Strategy compared against the others")->capture_default_str();
    ttest->add_option("--name", o.name, "Row label of the table")->capture_default_str();
    ttest->add_option("--output", o.output, "Write the table to this TSV file");
    auto* convert = app.add_subcommand("convert", "Convert between sparse and CSV formats")->fallthrough();
    convert->add_option("--to", o.to, "Target format: sparse or csv")->required();
    convert->add_option("--output", o.output, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run)
            return cmd_run(o);
        if (*bench)
            return cmd_bench(o);
        if (*sweep)
            return cmd_sweep(o);
        if (*ttest)
            return cmd_ttest(o);
        if (*convert)
            return cmd_convert(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
