#include "rial/criteria_repr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rial/errors.hpp"

namespace rial {

double prob_similarity(std::span<const double> p_i, std::span<const double> p_j, double gamma) {
    if (p_i.size() != p_j.size())
        throw DataError("prob_similarity: probability vectors differ in length");
    return std::exp(-gamma * squared_distance(p_i, p_j));
}

Matrix build_m1(const Matrix& probs_unlabeled, double gamma) {
    const std::size_t u = probs_unlabeled.rows();
    if (u == 0)
        throw DataError("build_m1: empty unlabeled set");
    Matrix m1(u, u);
    for (std::size_t i = 0; i < u; ++i) {
        m1(i, i) = 0.5;
        for (std::size_t j = i + 1; j < u; ++j)
            m1(i, j) = m1(j, i) = 0.5 * prob_similarity(probs_unlabeled.row(i), probs_unlabeled.row(j), gamma);
    }
    return m1;
}

std::vector<double> build_m2(const Matrix& probs_unlabeled, const Matrix& probs_labeled, double gamma,
                             std::size_t n) {
    if (probs_labeled.rows() == 0)
        throw DataError("build_m2: empty labeled set");
    if (n == 0)
        throw DataError("build_m2: pool size must be positive");
    const double weight = (static_cast<double>(probs_labeled.rows()) + 1.0) / static_cast<double>(n);

    std::vector<double> m2(probs_unlabeled.rows());
    for (std::size_t i = 0; i < m2.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < probs_labeled.rows(); ++j)
            sum += prob_similarity(probs_unlabeled.row(i), probs_labeled.row(j), gamma);
        m2[i] = weight * sum;
    }
    return m2;
}

std::vector<double> build_m3(const Matrix& probs_unlabeled, double gamma, std::size_t n) {
    const std::size_t u = probs_unlabeled.rows();
    if (u == 0)
        throw DataError("build_m3: empty unlabeled set");
    if (n == 0)
        throw DataError("build_m3: pool size must be positive");
    const double weight = (static_cast<double>(u) - 1.0) / static_cast<double>(n);

    std::vector<double> m3(u);
    for (std::size_t i = 0; i < u; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < u; ++j)
            sum += prob_similarity(probs_unlabeled.row(i), probs_unlabeled.row(j), gamma);
        m3[i] = weight * sum;
    }
    return m3;
}

ReprBundle build_repr(const Matrix& probs_unlabeled, const Matrix& probs_labeled, double gamma) {
    const std::size_t n = probs_unlabeled.rows() + probs_labeled.rows();
    return {build_m1(probs_unlabeled, gamma), build_m2(probs_unlabeled, probs_labeled, gamma, n),
            build_m3(probs_unlabeled, gamma, n)};
}

namespace {

double mean_cross_kernel(const Matrix& a, const Matrix& b, double sigma) {
    const double var2 = 2.0 * sigma * sigma;
    const double dim = static_cast<double>(a.cols());
    const double norm = std::pow(2.0 * std::numbers::pi * var2, -dim / 2.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            sum += std::exp(-squared_distance(a.row(i), b.row(j)) / (2.0 * var2));
    return norm * sum / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace

double discrepancy_estimate(const Matrix& set_a, const Matrix& set_b, double sigma) {
    if (set_a.rows() == 0 || set_b.rows() == 0)
        throw DataError("discrepancy_estimate: both sets must be nonempty");
    if (set_a.cols() != set_b.cols())
        throw DataError("discrepancy_estimate: dimension mismatch");
    if (!(sigma > 0.0))
        throw DataError("discrepancy_estimate: bandwidth must be positive");
    const double value = mean_cross_kernel(set_a, set_a, sigma) + mean_cross_kernel(set_b, set_b, sigma) -
                         2.0 * mean_cross_kernel(set_a, set_b, sigma);
    return std::max(value, 0.0);
}

double median_bandwidth(const Matrix& set_a, const Matrix& set_b) {
    Matrix pooled = set_a;
    for (std::size_t r = 0; r < set_b.rows(); ++r)
        pooled.append_row(set_b.row(r));
    std::vector<double> dist;
    for (std::size_t i = 0; i < pooled.rows(); ++i)
        for (std::size_t j = i + 1; j < pooled.rows(); ++j)
            dist.push_back(std::sqrt(squared_distance(pooled.row(i), pooled.row(j))));
    if (dist.empty())
        return 1.0;
    const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace rial
