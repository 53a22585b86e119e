#include "rial/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rial/errors.hpp"
#include "rial/random.hpp"

namespace rial {

double QueryObjective::value(const std::vector<double>& alpha) const {
    double v = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0.0)
            continue;
        double row = 0.0;
        for (std::size_t j = 0; j < alpha.size(); ++j)
            row += quadratic(i, j) * alpha[j];
        v += alpha[i] * (row + linear[i]);
    }
    return v;
}

QueryObjective assemble(const ReprBundle& repr, const UncertaintyVector& uncertainty, double beta) {
    const std::size_t u = repr.m2.size();
    if (repr.m3.size() != u || uncertainty.values.size() != u || repr.m1.rows() != u || repr.m1.cols() != u)
        throw DataError("assemble: inconsistent objective dimensions");
    if (!(beta >= 0.0))
        throw UsageError("assemble: beta must be nonnegative");
    QueryObjective obj;
    obj.quadratic = repr.m1;
    obj.beta = beta;
    obj.linear.resize(u);
    for (std::size_t i = 0; i < u; ++i)
        obj.linear[i] = (repr.m2[i] - repr.m3[i]) + beta * uncertainty.values[i];
    return obj;
}

namespace {

void recompute_product(const Matrix& m, const std::vector<double>& alpha, std::vector<double>& out) {
    const std::size_t u = alpha.size();
    for (std::size_t i = 0; i < u; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < u; ++j)
            if (alpha[j] != 0.0)
                s += m(i, j) * alpha[j];
        out[i] = s;
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

}  // namespace

QpSolution solve_simplex_qp(const QueryObjective& objective, const QpOptions& options) {
    const Matrix& m = objective.quadratic;
    const std::vector<double>& q = objective.linear;
    const std::size_t u = q.size();
    if (u == 0)
        throw DataError("solve_simplex_qp: empty objective");
    if (m.rows() != u || m.cols() != u)
        throw DataError("solve_simplex_qp: quadratic term has the wrong shape");
    if (!all_finite(m.data()) || !all_finite(q))
        throw NumericError("solve_simplex_qp: non-finite objective data");

    QpSolution sol;
    std::vector<double> alpha(u, 1.0 / static_cast<double>(u));
    std::vector<double> ma(u);  // M * alpha, updated incrementally
    recompute_product(m, alpha, ma);
    std::vector<double> grad(u);

    double value = dot(alpha, ma) + dot(alpha, q);
    double gap = 0.0;
    std::size_t iter = 0;
    for (;; ++iter) {
        for (std::size_t k = 0; k < u; ++k)
            grad[k] = 2.0 * ma[k] + q[k];
        const double g_alpha = dot(grad, alpha);

        std::size_t s = 0;
        for (std::size_t k = 1; k < u; ++k)
            if (grad[k] < grad[s])
                s = k;
        gap = g_alpha - grad[s];
        if (gap < options.gap_tolerance || iter >= options.max_iterations)
            break;

        std::size_t v = u;
        for (std::size_t k = 0; k < u; ++k)
            if (alpha[k] > 0.0 && (v == u || grad[k] > grad[v]))
                v = k;
        const double away_gap = grad[v] - g_alpha;

        // Direction d and its curvature d'Md; slope g'd < 0.
        const bool toward = gap >= away_gap;
        double slope, curvature, max_step;
        const double ama = dot(alpha, ma);
        if (toward) {
            slope = grad[s] - g_alpha;
            curvature = m(s, s) - 2.0 * ma[s] + ama;
            max_step = 1.0;
        } else {
            slope = g_alpha - grad[v];
            curvature = ama - 2.0 * ma[v] + m(v, v);
            max_step = alpha[v] / (1.0 - alpha[v]);
        }
        double step = curvature > 0.0 ? -slope / (2.0 * curvature) : max_step;
        step = std::clamp(step, 0.0, max_step);
        if (step <= 0.0)
            break;

        if (toward) {
            for (std::size_t k = 0; k < u; ++k) {
                alpha[k] *= (1.0 - step);
                ma[k] = (1.0 - step) * ma[k] + step * m(k, s);
            }
            alpha[s] += step;
        } else {
            for (std::size_t k = 0; k < u; ++k) {
                alpha[k] *= (1.0 + step);
                ma[k] = (1.0 + step) * ma[k] - step * m(k, v);
            }
            alpha[v] = step == max_step ? 0.0 : alpha[v] - step;
        }
        for (double& a : alpha)
            a = std::clamp(a, 0.0, 1.0);

        if ((iter + 1) % 64 == 0)
            recompute_product(m, alpha, ma);
        const double next = dot(alpha, ma) + dot(alpha, q);
        if (!std::isfinite(next))
            throw NumericError("solve_simplex_qp: objective became non-finite");
        value = next;
        if (options.record_history)
            sol.history.push_back(value);
    }

    double total = 0.0;
    for (double a : alpha)
        total += a;
    for (double& a : alpha)
        a /= total;

    sol.alpha = std::move(alpha);
    sol.objective_value = objective.value(sol.alpha);
    sol.duality_gap = std::max(gap, 0.0);
    sol.iterations = iter;
    return sol;
}

std::size_t round_to_query(const QpSolution& solution) {
    const auto& a = solution.alpha;
    return static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
}

std::size_t select_random(const PoolState& pool, std::uint64_t seed) {
    if (pool.unlabeled.empty())
        throw DataError("select_random: unlabeled pool is empty");
    Rng rng(mix_seed(seed, pool.iteration));
    return pool.unlabeled[uniform_index(rng, pool.unlabeled.size())];
}

std::size_t select_margin(const TrainedModel& model, const Matrix& features_unlabeled) {
    if (features_unlabeled.rows() == 0)
        throw DataError("select_margin: unlabeled pool is empty");
    const auto margin = decision_margin(model, features_unlabeled);
    return static_cast<std::size_t>(std::min_element(margin.begin(), margin.end()) - margin.begin());
}

ProposedSelection select_proposed_detailed(const TrainedModel& model, const PoolState& pool,
                                           const PoolProbabilities& probs, const ProposedParams& params) {
    if (pool.unlabeled.empty())
        throw DataError("select_proposed: unlabeled pool is empty");
    if (probs.unlabeled.rows() != pool.unlabeled.size() || probs.labeled.rows() != pool.labeled.size())
        throw DataError("select_proposed: probability rows do not match the pool");

    const auto repr = build_repr(probs.unlabeled, probs.labeled, params.gamma);
    const auto sv_probs = support_vector_probs(model, probs.labeled);
    const auto uncertainty = combined_uncertainty(probs.unlabeled, sv_probs, params.negated_position_exponent);
    const auto objective = assemble(repr, uncertainty, params.beta);

    ProposedSelection sel;
    sel.qp = solve_simplex_qp(objective, params.qp);
    sel.position = round_to_query(sel.qp);
    sel.index = pool.unlabeled[sel.position];

    double best = INFINITY;
    for (std::size_t i = 0; i < objective.linear.size(); ++i) {
        const double vertex = objective.quadratic(i, i) + objective.linear[i];
        if (vertex < best) {
            best = vertex;
            sel.best_vertex = i;
        }
    }
    return sel;
}

std::size_t select_proposed(const TrainedModel& model, const PoolState& pool, const PoolProbabilities& probs,
                            const ProposedParams& params) {
    return select_proposed_detailed(model, pool, probs, params).index;
}

}  // namespace rial
