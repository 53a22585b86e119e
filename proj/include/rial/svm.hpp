#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rial/matrix.hpp"

namespace rial {

// RBF width of the classifier kernel and the soft-margin penalty.
struct KernelParams {
    double kernel_gamma = 1.0;
    double c_reg = 100.0;

    void validate() const;
};

// Probability-calibrated 1/(1 + exp(a*f + b)) for the positive class.
struct PlattSigmoid {
    double a = 0.0;
    double b = 0.0;

    double operator()(double decision_value) const;
};

// Fits a Platt sigmoid to decision values of a binary problem (positive[i] is
// true for the +1 class). Uses the regularized targets (N+ + 1)/(N+ + 2) and
// 1/(N- + 2) and a Newton method with backtracking on the negative
// log-likelihood.
PlattSigmoid fit_platt(std::span<const double> decision_values, const std::vector<bool>& positive);

// Result of solving one binary soft-margin dual
//   min 1/2 a'Qa - 1'a,  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j K_ij
struct BinaryDualSolution {
    std::vector<double> alpha;
    double bias = 0.0;  // decision f(x) = sum alpha_i y_i K(x_i, x) + bias
    double objective = 0.0;
    double kkt_violation = 0.0;  // max violating-pair gap m(a) - M(a) at exit
    std::size_t iterations = 0;
};

// SMO with second-order working-set selection. `kernel` is the full n x n
// Gram matrix and y holds +1/-1.
BinaryDualSolution solve_binary_dual(const Matrix& kernel, std::span<const int> y, double c_reg,
                                     double tolerance = 1e-3, std::size_t max_iterations = 0);

// Dual objective 1/2 a'Qa - 1'a for the given alpha.
double binary_dual_objective(const Matrix& kernel, std::span<const int> y,
                             std::span<const double> alpha);

// One one-vs-one machine. Support indices point into the training rows of the
// owning model; coefficients are alpha_i * y_i.
struct BinaryMachine {
    int positive_class = 0;
    int negative_class = 0;
    std::vector<std::size_t> support;
    std::vector<double> coef;
    double bias = 0.0;
    double kkt_violation = 0.0;
    double dual_objective = 0.0;
    PlattSigmoid platt;
};

// Rows sum to one; columns follow TrainedModel::classes.
using ProbabilityMatrix = Matrix;

class TrainedModel {
public:
    const std::vector<int>& classes() const noexcept { return classes_; }
    const std::vector<BinaryMachine>& machines() const noexcept { return machines_; }

    // Union of support vectors over all machines, ascending, as row indices
    // into the training data.
    const std::vector<std::size_t>& sv_indices() const noexcept { return sv_indices_; }

    const KernelParams& params() const noexcept { return params_; }
    std::size_t feature_count() const noexcept { return train_features_.cols(); }

    // Raw decision value of every machine for one sample.
    std::vector<double> decision_values(std::span<const double> x) const;

    double kernel(std::span<const double> a, std::span<const double> b) const;

private:
    friend TrainedModel train(const Matrix&, std::span<const int>, const KernelParams&);

    KernelParams params_;
    std::vector<int> classes_;
    std::vector<BinaryMachine> machines_;
    std::vector<std::size_t> sv_indices_;
    Matrix train_features_;
};

// One-vs-one RBF SVM with per-machine Platt calibration fitted on the training
// decision values. Deterministic given its inputs.
TrainedModel train(const Matrix& features, std::span<const int> labels, const KernelParams& params);

ProbabilityMatrix predict_proba(const TrainedModel& model, const Matrix& features);

// Class id with the largest probability; lowest class id on ties.
std::vector<int> predict(const TrainedModel& model, const Matrix& features);

// Minimum over machines of |decision value|, per sample.
std::vector<double> decision_margin(const TrainedModel& model, const Matrix& features);

// Rows of the labeled-pool probability matrix at model.sv_indices().
ProbabilityMatrix support_vector_probs(const TrainedModel& model,
                                       const ProbabilityMatrix& probs_labeled);

// Couples pairwise probabilities r(i,j) = P(y=i | y in {i,j}) into a class
// distribution. Iterates the fixed-point update until the largest change of a
// probability is below `tolerance` or `max_sweeps` sweeps have run.
std::vector<double> couple_pairwise(const Matrix& pairwise, double tolerance = 1e-10,
                                    std::size_t max_sweeps = 200);

// One full sweep of the coupling update starting from p (exposed for tests).
std::vector<double> coupling_sweep(const Matrix& pairwise, std::vector<double> p);

}  // namespace rial
