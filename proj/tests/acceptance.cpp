// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "rial/criteria_repr.hpp"
#include "rial/criteria_uncert.hpp"
#include "rial/harness.hpp"
#include "rial/optimizer.hpp"
#include "rial/stats.hpp"
#include "rial/svm.hpp"
#include "ttest_reference.hpp"

using namespace rial;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass)
            detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

int failures = 0;

void report(int id, const std::string& name, Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << "  " << v.detail.str() << std::endl;
    if (!v.pass)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void criterion_qp() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> q(-2.0, 2.0), g(0.1, 10.0);
    double worst_vertex = -INFINITY, worst_random = -INFINITY, worst_gap = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t u = 1 + rng() % 8;
        QueryObjective obj;
        obj.quadratic = oracle::m1(oracle::simplex_rows(rng, u, 1 + rng() % 4), g(rng));
        for (std::size_t i = 0; i < u; ++i)
            obj.linear.push_back(q(rng));
        const auto sol = solve_simplex_qp(obj);
        worst_gap = std::max(worst_gap, sol.duality_gap);
        for (std::size_t i = 0; i < u; ++i)
            worst_vertex = std::max(worst_vertex, sol.objective_value - (obj.quadratic(i, i) + obj.linear[i]));
        for (int k = 0; k < 1000; ++k) {
            const auto a = oracle::simplex_point(rng, u);
            worst_random =
                std::max(worst_random, sol.objective_value - oracle::quadratic_value(obj.quadratic, obj.linear, a));
        }
    }
    const double elapsed = seconds_since(start);
    v.require(worst_vertex <= 1e-8, "objective above a vertex");
    v.require(worst_random <= 1e-8, "objective above a random feasible point");
    v.require(worst_gap < 1e-8, "final gap not below 1e-8");
    v.require(elapsed < 10.0, "runtime over 10 s");
    v.detail << "max(obj-vertex)=" << worst_vertex << " max(obj-random)=" << worst_random
             << " max gap=" << worst_gap << " time=" << elapsed << "s";
    report(1, "simplex QP correctness (500 instances)", v);
}

void criterion_criteria_oracles() {
    Verdict v;
    std::mt19937_64 rng(7);
    double worst = 0.0, min_eig = INFINITY;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng() % 4;
        const auto u = oracle::simplex_rows(rng, 1 + rng() % 20, k);
        const auto l = oracle::simplex_rows(rng, 1 + rng() % 10, k);
        const auto sv = oracle::simplex_rows(rng, 1 + rng() % 6, k);
        const double gamma = std::array{0.1, 1.0, 10.0}[trial % 3];

        const auto bundle = build_repr(u, l, gamma);
        const auto m1 = oracle::m1(u, gamma);
        const auto m2 = oracle::m2(u, l, gamma);
        const auto m3 = oracle::m3(u, l, gamma);
        const auto c = combined_uncertainty(u, sv);
        const auto c_ref = oracle::uncertainty(u, sv);
        for (std::size_t i = 0; i < u.rows(); ++i) {
            worst = std::max({worst, std::abs(bundle.m2[i] - m2[i]), std::abs(bundle.m3[i] - m3[i]),
                              std::abs(c.values[i] - c_ref[i])});
            for (std::size_t j = 0; j < u.rows(); ++j)
                worst = std::max(worst, std::abs(bundle.m1(i, j) - m1(i, j)));
        }
        Matrix twice = bundle.m1;
        for (std::size_t i = 0; i < u.rows(); ++i)
            for (std::size_t j = 0; j < u.rows(); ++j)
                twice(i, j) *= 2.0;
        min_eig = std::min(min_eig, oracle::min_eigenvalue(twice));
    }
    v.require(worst <= 1e-12, "oracle mismatch above 1e-12");
    v.require(min_eig >= -1e-8, "2*M1 not PSD");
    v.detail << "max abs diff=" << worst << " min eig(2*M1)=" << min_eig;
    report(2, "criteria oracles (200 instances)", v);
}

void criterion_discrepancy() {
    Verdict v;
    // Fixed 1-d instances: {set a}, {set b}, sigma.
    const std::vector<std::tuple<std::vector<double>, std::vector<double>, double>> cases{
        {{0.0}, {1.0}, 1.0},
        {{0.0}, {2.0}, 0.5},
        {{0.0, 1.0}, {0.5}, 1.0},
        {{-1.0, 1.0}, {0.0, 0.0}, 0.7},
        {{0.0, 0.1, 0.2}, {3.0}, 1.5},
        {{-2.0, 2.0}, {-2.0, 2.0, 0.0}, 0.8},
        {{0.3}, {0.3, 0.4}, 0.2},
        {{1.0, 2.0, 3.0}, {1.5, 2.5}, 0.6},
        {{-0.5}, {0.5}, 0.25},
        {{0.0, 5.0}, {2.5}, 2.0},
        {{-1.2, -0.4, 0.9}, {0.1, 1.7}, 1.1},
        {{4.0}, {-4.0}, 3.0},
        {{0.0, 0.0, 1.0}, {1.0, 1.0, 0.0}, 0.9},
        {{-3.0, -2.5}, {2.5, 3.0}, 1.2},
        {{0.05}, {0.0}, 0.1},
        {{1.0, 1.1, 1.2, 1.3}, {0.9, 1.4}, 0.3},
        {{-0.7, 0.7}, {-0.6, 0.6}, 0.5},
        {{2.0}, {2.0, 2.2, 2.4}, 0.4},
        {{-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0, 2.0}, 1.0},
        {{0.0}, {10.0}, 5.0},
    };
    double worst = 0.0;
    for (const auto& [a, b, sigma] : cases) {
        Matrix ma(0, 1), mb(0, 1);
        for (double x : a)
            ma.append_row(std::vector<double>{x});
        for (double x : b)
            mb.append_row(std::vector<double>{x});
        double lo = INFINITY, hi = -INFINITY;
        for (double x : a) { lo = std::min(lo, x); hi = std::max(hi, x); }
        for (double x : b) { lo = std::min(lo, x); hi = std::max(hi, x); }
        // The {0},{1}, sigma=1 case gives exactly [-10, 11].
        const double ref = oracle::discrepancy_quadrature(a, b, sigma, lo - 10 * sigma, hi + 10 * sigma);
        worst = std::max(worst, std::abs(discrepancy_estimate(ma, mb, sigma) - ref));
    }
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 1);
    double identical = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x(0, 2);
        for (int i = 0; i < 12; ++i)
            x.append_row(std::vector<double>{n(rng), n(rng)});
        identical = std::max(identical, discrepancy_estimate(x, x, 0.5 + 0.1 * trial));
    }
    v.require(worst <= 1e-6, "closed form differs from quadrature");
    v.require(identical <= 1e-12, "identical sets not zero");
    v.detail << "max |closed-quadrature|=" << worst << " max identical=" << identical;
    report(3, "discrepancy estimator vs quadrature (20 instances)", v);
}

std::vector<double> softmax(const std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k)
        s += (p[k] = std::exp(z[k] - m));
    for (double& x : p)
        x /= s;
    return p;
}

Matrix without_row(const Matrix& m, std::size_t skip) {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < m.rows(); ++r)
        if (r != skip)
            keep.push_back(r);
    return m.select_rows(keep);
}

void criterion_representativeness() {
    Verdict v;
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::vector<std::vector<double>> centers{{2.0, 0.0, -1.0}, {-1.0, 1.5, 0.5}};
    auto draw = [&](std::size_t component) {
        std::vector<double> z(3);
        for (std::size_t k = 0; k < 3; ++k)
            z[k] = centers[component][k] + 0.8 * n(rng);
        return softmax(z);
    };

    std::vector<double> proposed, random;
    for (int trial = 0; trial < 200; ++trial) {
        // Unlabeled cloud from both components; labeled seed mostly from one.
        Matrix u(0, 3), l(0, 3);
        for (int i = 0; i < 40; ++i)
            u.append_row(draw(rng() % 2));
        for (int i = 0; i < 4; ++i)
            l.append_row(draw(i == 0 ? 1 : 0));
        const double sigma = median_bandwidth(l, u);

        const auto repr = build_repr(u, l, 1.0);
        std::size_t best = 0;
        for (std::size_t i = 1; i < u.rows(); ++i)
            if (repr.m2[i] - repr.m3[i] < repr.m2[best] - repr.m3[best])
                best = i;
        const std::size_t pick = rng() % u.rows();

        auto after = [&](std::size_t i) {
            Matrix l2 = l;
            l2.append_row(u.row(i));
            return discrepancy_estimate(l2, without_row(u, i), sigma);
        };
        proposed.push_back(after(best));
        random.push_back(after(pick));
    }
    const auto st = paired_t_stats(proposed, random);
    double mp = 0, mr = 0;
    for (std::size_t i = 0; i < proposed.size(); ++i) {
        mp += proposed[i] / 200;
        mr += random[i] / 200;
    }
    v.require(mp <= mr, "argmin query has larger mean discrepancy");
    v.require(st.p_less() < 0.05, "one-sided p-value not below 0.05");
    v.detail << "mean proposed=" << mp << " mean random=" << mr << " one-sided p=" << st.p_less();
    report(4, "representativeness vs random transfer (200 trials)", v);
}

void criterion_svm(const std::string& data_dir) {
    Verdict v;
    const std::vector<Matrix> sets{
        {{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3, 4}},
        {{0, 0}, {1, 1}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}},
        {{-1, 0}, {-0.5, 0.3}, {0.2, 0.1}, {0.1, -0.2}, {0.6, 0.4}, {1, 0}},
        {{0, 0}, {0.2, 0.1}, {0.1, 0.3}, {0.3, 0.2}, {0.05, 0.25}, {0.25, 0.05}},
    };
    const std::vector<std::vector<int>> ys{
        {1, 1, 1, -1, -1, -1}, {1, -1, 1, -1, 1, -1}, {1, 1, -1, 1, -1, -1}, {1, -1, 1, -1, -1, 1}};
    double worst_dual = 0.0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (double c : {0.5, 2.0, 10.0}) {
            Matrix k(6, 6);
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j)
                    k(i, j) = std::exp(-0.5 * squared_distance(sets[s].row(i), sets[s].row(j)));
            const auto sol = solve_binary_dual(k, ys[s], c);
            worst_dual = std::max(worst_dual, std::abs(-sol.objective - oracle::grid_dual_max(k, ys[s], c)));
        }
    }

    double worst_sum = 0.0;
    for (const std::string file : {"iris.csv", "wine.csv"}) {
        const auto d = min_max_normalize(load_dataset(data_dir + "/" + file, DataFormat::csv));
        const auto m = train(d.features, d.labels, {1.0 / static_cast<double>(d.feature_count()), 100.0});
        const auto p = predict_proba(m, d.features);
        for (std::size_t r = 0; r < p.rows(); ++r) {
            double s = 0;
            for (double x : p.row(r))
                s += x;
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
    }

    const std::vector<double> dec{-2, -1, 1, 2};
    const std::vector<bool> pos{false, false, true, true};
    const auto fit = fit_platt(dec, pos);
    const auto ref = oracle::platt(dec, pos);
    const double platt_err = std::max(std::abs(fit.a - ref.a), std::abs(fit.b - ref.b));

    v.require(worst_dual <= 1e-4, "SMO dual differs from grid oracle");
    v.require(worst_sum <= 1e-9, "probability row does not sum to 1");
    v.require(platt_err <= 1e-6, "Platt fit differs from oracle");
    v.detail << "max dual diff=" << worst_dual << " max |rowsum-1|=" << worst_sum << " platt diff=" << platt_err;
    report(5, "SVM stack (SMO, probabilities, Platt)", v);
}

void criterion_ttest() {
    Verdict v;
    double worst_ref = 0.0, worst_boost = 0.0;
    for (const auto& c : reference::ttest_cases()) {
        const auto st = paired_t_stats(c.a, c.b);
        worst_ref = std::max(worst_ref, std::abs(st.p_two_sided - c.p));
        const boost::math::students_t dist(st.df);
        const double p_boost = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(st.t)));
        worst_boost = std::max(worst_boost, std::abs(st.p_two_sided - p_boost));
    }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    std::size_t asymmetric = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 2 + rng() % 15;
        const double shift = 0.5 * n(rng);
        std::vector<double> a(len), b(len);
        for (std::size_t i = 0; i < len; ++i) {
            a[i] = n(rng);
            b[i] = a[i] + shift + 0.4 * n(rng);
        }
        const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
        if ((ab == Outcome::win) != (ba == Outcome::loss) || (ab == Outcome::tie) != (ba == Outcome::tie))
            ++asymmetric;
    }
    v.require(worst_ref <= 1e-6, "p-value differs from reference");
    v.require(worst_boost <= 1e-6, "p-value differs from Boost t-CDF");
    v.require(asymmetric == 0, "symmetry violated");
    v.detail << "max |p-ref|=" << worst_ref << " max |p-boost|=" << worst_boost << " asymmetric=" << asymmetric;
    report(6, "t-test machinery (10 reference vectors, 1000 symmetry pairs)", v);
}

void criterion_reproduction(const std::string& data_dir) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    struct Set {
        std::string file;
        DataFormat format;
    };
    for (const auto& [file, format] : {Set{"iris.csv", DataFormat::csv}, Set{"heart_scale", DataFormat::sparse},
                                       Set{"wine.csv", DataFormat::csv}}) {
        ExperimentConfig c;
        c.data_path = data_dir + "/" + file;
        c.format = format;
        c.runs = 10;
        c.max_queries = 40;
        c.normalize = true;
        const auto results = run_experiment(c);
        const auto summary = summarize_wtl(results, default_checkpoints(results, c.checkpoint_start));
        for (const auto& row : summary.rows) {
            v.detail << file << " vs " << row.competitor << " " << row.win << '/' << row.tie << '/' << row.loss
                     << "; ";
            if (row.competitor != "random")
                continue;
            const auto n = summary.checkpoints.size();
            v.require(row.win >= row.loss, file + ": losses exceed wins vs random");
            v.require(static_cast<double>(row.loss) <= 0.1 * static_cast<double>(n),
                      file + ": losses above 10% of checkpoints vs random");
        }
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed < 300.0, "runtime over 5 min");
    v.detail << "time=" << elapsed << "s";
    report(7, "desk-scale reproduction vs RANDOM (iris, heart, wine)", v);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion_determinism(const std::string& data_dir, const std::string& cli, const fs::path& work) {
    Verdict v;
    fs::remove_all(work);
    fs::create_directories(work);
    std::vector<fs::path> outs{work / "first", work / "second"};
    for (const auto& out : outs) {
        const std::string cmd = "\"" + cli + "\" run --data \"" + data_dir +
                                "/heart_scale\" --runs 4 --max-queries 15 --normalize --seed 42 --out \"" +
                                out.string() + "\" > \"" + (work / "log.txt").string() + "\" 2>&1";
        const int code = std::system(cmd.c_str());
        v.require(code == 0, "cli exited with failure");
    }
    std::size_t compared = 0;
    for (const std::string name : {"curves.csv", "summary.txt", "wtl.tsv"}) {
        const auto a = outs[0] / name, b = outs[1] / name;
        v.require(fs::exists(a) && fs::exists(b), name + " missing");
        v.require(slurp(a) == slurp(b), name + " differs");
        ++compared;
    }
    v.detail << "compared " << compared << " files byte for byte";
    report(8, "determinism of `run` output files", v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string data_dir, cli, work = "acceptance_work";
    app.add_option("--data-dir", data_dir, "Directory holding iris.csv, wine.csv and heart_scale")->required();
    app.add_option("--cli", cli, "Path of the rial executable")->required();
    app.add_option("--work-dir", work, "Scratch directory");
    CLI11_PARSE(app, argc, argv);

    std::cout.precision(6);
    const auto guarded = [](int id, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            std::cout << "FAIL  [" << id << "] threw: " << e.what() << std::endl;
            ++failures;
        }
    };
    guarded(1, criterion_qp);
    guarded(2, criterion_criteria_oracles);
    guarded(3, criterion_discrepancy);
    guarded(4, criterion_representativeness);
    guarded(5, [&] { criterion_svm(data_dir); });
    guarded(6, criterion_ttest);
    guarded(7, [&] { criterion_reproduction(data_dir); });
    guarded(8, [&] { criterion_determinism(data_dir, cli, work); });

    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
