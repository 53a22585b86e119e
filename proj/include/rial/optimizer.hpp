#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rial/criteria_repr.hpp"
#include "rial/criteria_uncert.hpp"
#include "rial/dataio.hpp"
#include "rial/matrix.hpp"
#include "rial/svm.hpp"

namespace rial {

// min a'Qa + a'linear over the probability simplex.
//
// The uncertainty enters as beta * a'C: a constant beta*C added to the
// objective could not change the minimizer, so the trade-off is applied per
// sample through the linear term.
struct QueryObjective {
    Matrix quadratic;            // M1
    std::vector<double> linear;  // (M2 - M3) + beta * C
    double beta = 0.0;

    double value(const std::vector<double>& alpha) const;
};

QueryObjective assemble(const ReprBundle& repr, const UncertaintyVector& uncertainty, double beta);

struct QpOptions {
    double gap_tolerance = 1e-8;
    std::size_t max_iterations = 10000;
    bool record_history = false;
};

struct QpSolution {
    std::vector<double> alpha;
    double objective_value = 0.0;
    double duality_gap = 0.0;  // Frank-Wolfe gap at the returned point
    std::size_t iterations = 0;
    std::vector<double> history;  // objective after every iteration, if requested
};

// Frank-Wolfe with away steps and exact line search, started from the
// uniform point. Stops when the Frank-Wolfe gap falls below the tolerance.
QpSolution solve_simplex_qp(const QueryObjective& objective, const QpOptions& options = {});

// Index of the largest coordinate; lowest index on ties.
std::size_t round_to_query(const QpSolution& solution);

// Uniformly random unlabeled index, a pure function of (pool, seed).
std::size_t select_random(const PoolState& pool, std::uint64_t seed);

// Position (row) of the sample closest to a decision boundary.
std::size_t select_margin(const TrainedModel& model, const Matrix& features_unlabeled);

struct ProposedParams {
    double gamma = 1.0;  // width of the probability-space kernel
    double beta = 1.0;
    bool negated_position_exponent = false;
    QpOptions qp;
};

// Posterior rows aligned with pool.labeled and pool.unlabeled.
struct PoolProbabilities {
    ProbabilityMatrix labeled;
    ProbabilityMatrix unlabeled;
};

struct ProposedSelection {
    std::size_t index = 0;     // dataset row to query
    std::size_t position = 0;  // its position within pool.unlabeled
    QpSolution qp;
    // Position of the vertex e_i with the smallest objective; differs from
    // `position` when greedy rounding disagrees with exact vertex search.
    std::size_t best_vertex = 0;
};

ProposedSelection select_proposed_detailed(const TrainedModel& model, const PoolState& pool,
                                           const PoolProbabilities& probs, const ProposedParams& params);

// Dataset row chosen by the combined representativeness/informativeness query.
std::size_t select_proposed(const TrainedModel& model, const PoolState& pool,
                            const PoolProbabilities& probs, const ProposedParams& params);

}  // namespace rial
