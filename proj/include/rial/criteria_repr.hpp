#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rial/matrix.hpp"

namespace rial {

// Representativeness terms of the query objective for the current pool.
//   m1(i, j) = S(i, j) / 2 over unlabeled pairs
//   m2(i)    = (n_t + 1) / n * sum_{j in L} S(i, j)
//   m3(i)    = (u_t - 1) / n * sum_{j in U} S(i, j)   (j = i included)
// with S the RBF similarity of posterior probability rows.
struct ReprBundle {
    Matrix m1;
    std::vector<double> m2;
    std::vector<double> m3;
};

// exp(-gamma * |p_i - p_j|^2).
double prob_similarity(std::span<const double> p_i, std::span<const double> p_j, double gamma);

Matrix build_m1(const Matrix& probs_unlabeled, double gamma);

// n is the pool size n_t + u_t; n_t and u_t are the row counts.
std::vector<double> build_m2(const Matrix& probs_unlabeled, const Matrix& probs_labeled, double gamma,
                             std::size_t n);

std::vector<double> build_m3(const Matrix& probs_unlabeled, double gamma, std::size_t n);

// All three terms at once, with n = n_t + u_t.
ReprBundle build_repr(const Matrix& probs_unlabeled, const Matrix& probs_labeled, double gamma);

// Integrated squared difference of two Gaussian kernel density estimates with
// a shared bandwidth sigma, in closed form:
//   int (f_a - f_b)^2 = mean K2(a, a') + mean K2(b, b') - 2 mean K2(a, b)
// where K2 is the density of N(0, 2 sigma^2 I) at the pair difference.
double discrepancy_estimate(const Matrix& set_a, const Matrix& set_b, double sigma);

// Median pairwise Euclidean distance over the pooled rows of a and b
// (1.0 if every distance is zero).
double median_bandwidth(const Matrix& set_a, const Matrix& set_b);

}  // namespace rial
