#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rial/errors.hpp"
#include "rial/harness.hpp"

namespace rial {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out)
        throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_curves_csv(std::ostream& out, const std::vector<RunResult>& results) {
    out << "strategy,run,iteration,accuracy\n";
    for (const auto& r : results)
        for (std::size_t t = 0; t < r.accuracy.size(); ++t)
            out << r.strategy << ',' << r.run << ',' << t << ',' << fmt(r.accuracy[t]) << '\n';
}

void write_wtl_tsv(std::ostream& out, const std::vector<std::pair<std::string, WtlSummary>>& table) {
    std::vector<std::string> competitors;
    for (const auto& [name, summary] : table)
        for (const auto& row : summary.rows)
            if (std::find(competitors.begin(), competitors.end(), row.competitor) == competitors.end())
                competitors.push_back(row.competitor);

    out << "Dataset";
    for (const auto& c : competitors) {
        std::string upper = c;
        for (auto& ch : upper)
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        out << "\tVs " << upper;
    }
    out << '\n';
    for (const auto& [name, summary] : table) {
        out << name;
        for (const auto& c : competitors) {
            out << '\t';
            const auto it = std::find_if(summary.rows.begin(), summary.rows.end(),
                                         [&](const WtlRow& r) { return r.competitor == c; });
            if (it == summary.rows.end())
                out << '-';
            else
                out << it->win << '/' << it->tie << '/' << it->loss;
        }
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<BetaCurve>& curves) {
    out << "beta,iteration,mean_accuracy\n";
    for (const auto& c : curves)
        for (std::size_t t = 0; t < c.mean_accuracy.size(); ++t)
            out << fmt(c.beta) << ',' << t << ',' << fmt(c.mean_accuracy[t]) << '\n';
}

void emit_results(const std::vector<RunResult>& results, const WtlSummary& summary,
                  const std::string& dataset_name, const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create '" + directory + "': " + ec.message());

    {
        const auto path = dir / "curves.csv";
        auto out = open_output(path);
        write_curves_csv(out, results);
        check_written(out, path);
    }
    {
        const auto path = dir / "wtl.tsv";
        auto out = open_output(path);
        write_wtl_tsv(out, {{dataset_name, summary}});
        check_written(out, path);
    }
    {
        const auto path = dir / "summary.txt";
        auto out = open_output(path);
        out << "dataset=" << dataset_name << '\n';
        std::vector<std::string> strategies;
        std::size_t runs = 0;
        for (const auto& r : results) {
            if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end())
                strategies.push_back(r.strategy);
            runs = std::max(runs, r.run + 1);
        }
        out << "runs=" << runs << '\n';
        out << "strategies=";
        for (std::size_t i = 0; i < strategies.size(); ++i)
            out << (i ? "," : "") << strategies[i];
        out << '\n';
        out << "reference=" << summary.reference << '\n';
        out << "checkpoints=" << summary.checkpoints.size() << '\n';
        if (!summary.checkpoints.empty())
            out << "checkpoint_range=" << summary.checkpoints.front() << ':' << summary.checkpoints.back() << '\n';

        for (const auto& s : strategies) {
            const auto curve = mean_curve(results, s);
            double area = 0.0;
            for (double a : curve)
                area += a;
            out << s << ".curve_length=" << curve.size() << '\n';
            if (!curve.empty()) {
                out << s << ".initial_accuracy=" << fmt(curve.front()) << '\n';
                out << s << ".final_accuracy=" << fmt(curve.back()) << '\n';
                out << s << ".mean_accuracy=" << fmt(area / static_cast<double>(curve.size())) << '\n';
            }
        }
        std::size_t agree = 0, total = 0;
        for (const auto& r : results) {
            if (r.strategy != "proposed")
                continue;
            out << "proposed.beta.run" << r.run << '=' << fmt(r.beta) << '\n';
            agree += r.rounding_agreements;
            total += r.rounding_total;
        }
        if (total > 0) {
            out << "proposed.rounding_agreements=" << agree << '\n';
            out << "proposed.rounding_total=" << total << '\n';
        }
        for (const auto& row : summary.rows)
            out << "wtl." << row.competitor << '=' << row.win << '/' << row.tie << '/' << row.loss << '\n';
        check_written(out, path);
    }
}

std::vector<RunResult> read_curves_csv(std::istream& in) {
    std::map<std::pair<std::string, std::size_t>, RunResult> by_key;
    std::vector<std::pair<std::string, std::size_t>> order;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("strategy,", 0) == 0))
            continue;
        std::stringstream ss(line);
        std::string strategy, run_s, iter_s, acc_s;
        if (!std::getline(ss, strategy, ',') || !std::getline(ss, run_s, ',') || !std::getline(ss, iter_s, ',') ||
            !std::getline(ss, acc_s))
            throw ParseError(line_no, "expected strategy,run,iteration,accuracy");
        std::size_t run = 0, iter = 0;
        double acc = 0.0;
        auto parse_uint = [&](const std::string& s, std::size_t& v) {
            const auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (e != std::errc() || p != s.data() + s.size())
                throw ParseError(line_no, "bad integer '" + s + "'");
        };
        parse_uint(run_s, run);
        parse_uint(iter_s, iter);
        const auto [p, e] = std::from_chars(acc_s.data(), acc_s.data() + acc_s.size(), acc);
        if (e != std::errc() || p != acc_s.data() + acc_s.size())
            throw ParseError(line_no, "bad accuracy '" + acc_s + "'");

        const auto key = std::make_pair(strategy, run);
        auto [it, inserted] = by_key.try_emplace(key);
        if (inserted) {
            order.push_back(key);
            it->second.strategy = strategy;
            it->second.run = run;
        }
        if (iter != it->second.accuracy.size())
            throw ParseError(line_no, "iterations must be consecutive from 0");
        it->second.accuracy.push_back(acc);
    }
    std::vector<RunResult> out;
    for (const auto& k : order)
        out.push_back(std::move(by_key.at(k)));
    return out;
}

std::vector<RunResult> read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    try {
        return read_curves_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace rial
