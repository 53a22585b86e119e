#include "rial/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rial/errors.hpp"

namespace rial {

namespace {

constexpr double kTau = 1e-12;
// Pairwise probabilities are kept away from 0 and 1 before coupling.
constexpr double kMinPairProb = 1e-7;

}  // namespace

void KernelParams::validate() const {
    if (!(kernel_gamma > 0.0) || !std::isfinite(kernel_gamma))
        throw UsageError("svm kernel gamma must be positive");
    if (!(c_reg > 0.0) || !std::isfinite(c_reg))
        throw UsageError("svm C must be positive");
}

double PlattSigmoid::operator()(double f) const {
    const double z = a * f + b;
    return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PlattSigmoid fit_platt(std::span<const double> dec, const std::vector<bool>& positive) {
    const std::size_t n = dec.size();
    double prior1 = 0.0, prior0 = 0.0;
    for (bool p : positive)
        (p ? prior1 : prior0) += 1.0;

    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = positive[i] ? hi_target : lo_target;

    auto nll = [&](double a, double b) {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = dec[i] * a + b;
            f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    constexpr int kMaxIter = 200;
    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;
    constexpr double kGradTol = 1e-11;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = nll(a, b);

    for (int iter = 0; iter < kMaxIter; ++iter) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = dec[i] * a + b;
            double p, q;
            if (z >= 0.0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            } else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            const double d2 = p * q;
            h11 += dec[i] * dec[i] * d2;
            h22 += d2;
            h21 += dec[i] * d2;
            const double d1 = t[i] - p;
            g1 += dec[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < kGradTol && std::abs(g2) < kGradTol)
            break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= kMinStep) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = nll(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                moved = true;
                break;
            }
            step /= 2.0;
        }
        if (!moved)
            break;  // line search failed; current point is as good as we can do
    }
    if (!std::isfinite(a) || !std::isfinite(b))
        throw NumericError("Platt calibration produced a non-finite sigmoid");
    return {a, b};
}

double binary_dual_objective(const Matrix& kernel, std::span<const int> y,
                             std::span<const double> alpha) {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < alpha.size(); ++j)
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel(i, j);
    }
    return 0.5 * quad - lin;
}

BinaryDualSolution solve_binary_dual(const Matrix& kernel, std::span<const int> y, double c_reg,
                                     double tolerance, std::size_t max_iterations) {
    const std::size_t n = y.size();
    if (max_iterations == 0)
        max_iterations = std::max<std::size_t>(10 * n, 10000);

    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kernel(i, j); };

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    const double c = c_reg;

    BinaryDualSolution sol;
    std::size_t iter = 0;
    double violation = 0.0;
    while (true) {
        // Second-order working set selection.
        double gmax = -INFINITY, gmax2 = -INFINITY;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] == 1) {
                if (alpha[t] < c && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (alpha[t] > 0.0 && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        std::size_t j = n;
        double obj_min = INFINITY;
        if (i != n) {
            for (std::size_t t = 0; t < n; ++t) {
                if (y[t] == 1) {
                    if (alpha[t] > 0.0) {
                        const double grad_diff = gmax + grad[t];
                        gmax2 = std::max(gmax2, grad[t]);
                        if (grad_diff > 0.0) {
                            const double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
                            const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                            if (obj <= obj_min) {
                                j = t;
                                obj_min = obj;
                            }
                        }
                    }
                } else if (alpha[t] < c) {
                    const double grad_diff = gmax - grad[t];
                    gmax2 = std::max(gmax2, -grad[t]);
                    if (grad_diff > 0.0) {
                        const double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
                        const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                        if (obj <= obj_min) {
                            j = t;
                            obj_min = obj;
                        }
                    }
                }
            }
        }
        violation = gmax + gmax2;
        if (i == n || j == n || violation < tolerance || iter >= max_iterations)
            break;
        ++iter;

        const double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0)
                quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += q(k, i) * dai + q(k, j) * daj;
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = INFINITY, lb = -INFINITY, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double yg = y[k] * grad[k];
        if (alpha[k] >= c) {
            if (y[k] == -1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[k] <= 0.0) {
            if (y[k] == 1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    double obj = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        obj += alpha[k] * (grad[k] - 1.0);

    sol.alpha = std::move(alpha);
    sol.bias = -rho;
    sol.objective = obj / 2.0;
    sol.kkt_violation = std::max(violation, 0.0);
    sol.iterations = iter;
    return sol;
}

double TrainedModel::kernel(std::span<const double> a, std::span<const double> b) const {
    return std::exp(-params_.kernel_gamma * squared_distance(a, b));
}

std::vector<double> TrainedModel::decision_values(std::span<const double> x) const {
    if (x.size() != feature_count())
        throw DataError("feature dimension " + std::to_string(x.size()) + " does not match model (" +
                        std::to_string(feature_count()) + ")");
    std::vector<double> k(train_features_.rows(), 0.0);
    for (std::size_t s : sv_indices_)
        k[s] = kernel(train_features_.row(s), x);

    std::vector<double> out;
    out.reserve(machines_.size());
    for (const auto& m : machines_) {
        double f = m.bias;
        for (std::size_t s = 0; s < m.support.size(); ++s)
            f += m.coef[s] * k[m.support[s]];
        out.push_back(f);
    }
    return out;
}

TrainedModel train(const Matrix& features, std::span<const int> labels, const KernelParams& params) {
    params.validate();
    if (labels.size() != features.rows())
        throw DataError("svm train: label count does not match feature rows");
    if (!all_finite(features.data()))
        throw DataError("svm train: non-finite feature value");

    TrainedModel model;
    model.params_ = params;
    model.train_features_ = features;
    model.classes_.assign(labels.begin(), labels.end());
    std::sort(model.classes_.begin(), model.classes_.end());
    model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()), model.classes_.end());
    if (model.classes_.size() < 2)
        throw DataError("svm train: labeled data holds a single class");

    std::vector<bool> is_sv(features.rows(), false);
    const std::size_t k = model.classes_.size();
    for (std::size_t ci = 0; ci < k; ++ci) {
        for (std::size_t cj = ci + 1; cj < k; ++cj) {
            std::vector<std::size_t> rows;
            std::vector<int> y;
            for (std::size_t r = 0; r < labels.size(); ++r) {
                if (labels[r] == model.classes_[ci]) {
                    rows.push_back(r);
                    y.push_back(1);
                } else if (labels[r] == model.classes_[cj]) {
                    rows.push_back(r);
                    y.push_back(-1);
                }
            }
            const std::size_t n = rows.size();
            Matrix gram(n, n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a; b < n; ++b)
                    gram(a, b) = gram(b, a) = model.kernel(features.row(rows[a]), features.row(rows[b]));

            const auto dual = solve_binary_dual(gram, y, params.c_reg);

            BinaryMachine m;
            m.positive_class = model.classes_[ci];
            m.negative_class = model.classes_[cj];
            m.bias = dual.bias;
            m.kkt_violation = dual.kkt_violation;
            m.dual_objective = dual.objective;
            for (std::size_t a = 0; a < n; ++a) {
                if (dual.alpha[a] > 0.0) {
                    m.support.push_back(rows[a]);
                    m.coef.push_back(dual.alpha[a] * y[a]);
                    is_sv[rows[a]] = true;
                }
            }

            std::vector<double> dec(n);
            std::vector<bool> positive(n);
            for (std::size_t a = 0; a < n; ++a) {
                double f = dual.bias;
                for (std::size_t b = 0; b < n; ++b)
                    f += dual.alpha[b] * y[b] * gram(a, b);
                dec[a] = f;
                positive[a] = y[a] == 1;
            }
            m.platt = fit_platt(dec, positive);
            model.machines_.push_back(std::move(m));
        }
    }
    for (std::size_t r = 0; r < is_sv.size(); ++r)
        if (is_sv[r])
            model.sv_indices_.push_back(r);
    if (model.sv_indices_.empty())
        throw NumericError("svm train: no support vectors");
    return model;
}

std::vector<double> coupling_sweep(const Matrix& r, std::vector<double> p) {
    const std::size_t k = p.size();
    Matrix q(k, k);
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
            if (j == t)
                continue;
            q(t, t) += r(j, t) * r(j, t);
            q(t, j) = -r(j, t) * r(t, j);
        }
    }
    std::vector<double> qp(k, 0.0);
    double pqp = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < k; ++j)
            qp[t] += q(t, j) * p[j];
        pqp += p[t] * qp[t];
    }
    for (std::size_t t = 0; t < k; ++t) {
        const double diff = (-qp[t] + pqp) / q(t, t);
        p[t] += diff;
        pqp = (pqp + diff * (diff * q(t, t) + 2.0 * qp[t])) / (1.0 + diff) / (1.0 + diff);
        for (std::size_t j = 0; j < k; ++j) {
            qp[j] = (qp[j] + diff * q(t, j)) / (1.0 + diff);
            p[j] /= (1.0 + diff);
        }
    }
    return p;
}

std::vector<double> couple_pairwise(const Matrix& r, double tolerance, std::size_t max_sweeps) {
    const std::size_t k = r.rows();
    std::vector<double> p(k, 1.0 / static_cast<double>(k));
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        auto next = coupling_sweep(r, p);
        double change = 0.0;
        for (std::size_t t = 0; t < k; ++t)
            change = std::max(change, std::abs(next[t] - p[t]));
        p = std::move(next);
        if (change < tolerance)
            break;
    }
    return p;
}

ProbabilityMatrix predict_proba(const TrainedModel& model, const Matrix& features) {
    const std::size_t k = model.classes().size();
    ProbabilityMatrix out(features.rows(), k);
    for (std::size_t s = 0; s < features.rows(); ++s) {
        const auto dec = model.decision_values(features.row(s));
        std::vector<double> p;
        if (k == 2) {
            const double pa = std::clamp(model.machines()[0].platt(dec[0]), kMinPairProb, 1.0 - kMinPairProb);
            p = {pa, 1.0 - pa};
        } else {
            Matrix r(k, k);
            std::size_t m = 0;
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = i + 1; j < k; ++j, ++m) {
                    const double rij =
                        std::clamp(model.machines()[m].platt(dec[m]), kMinPairProb, 1.0 - kMinPairProb);
                    r(i, j) = rij;
                    r(j, i) = 1.0 - rij;
                }
            }
            p = couple_pairwise(r);
        }
        double sum = 0.0;
        for (double v : p)
            sum += v;
        for (std::size_t c = 0; c < k; ++c)
            out(s, c) = std::clamp(p[c] / sum, 0.0, 1.0);
    }
    return out;
}

std::vector<int> predict(const TrainedModel& model, const Matrix& features) {
    const auto probs = predict_proba(model, features);
    std::vector<int> out(features.rows());
    for (std::size_t s = 0; s < features.rows(); ++s) {
        const auto row = probs.row(s);
        const auto best = std::max_element(row.begin(), row.end()) - row.begin();
        out[s] = model.classes()[static_cast<std::size_t>(best)];
    }
    return out;
}

std::vector<double> decision_margin(const TrainedModel& model, const Matrix& features) {
    std::vector<double> out(features.rows());
    for (std::size_t s = 0; s < features.rows(); ++s) {
        double best = INFINITY;
        for (double f : model.decision_values(features.row(s)))
            best = std::min(best, std::abs(f));
        out[s] = best;
    }
    return out;
}

ProbabilityMatrix support_vector_probs(const TrainedModel& model, const ProbabilityMatrix& probs_labeled) {
    if (model.sv_indices().empty())
        throw DataError("support_vector_probs: empty support-vector set");
    if (model.sv_indices().back() >= probs_labeled.rows())
        throw DataError("support_vector_probs: probability matrix does not cover the labeled pool");
    return probs_labeled.select_rows(model.sv_indices());
}

}  // namespace rial
