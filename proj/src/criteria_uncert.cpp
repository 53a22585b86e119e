#include "rial/criteria_uncert.hpp"

#include <cmath>

#include "rial/errors.hpp"

namespace rial {

double bvsb(std::span<const double> p) {
    if (p.size() < 2)
        throw DataError("bvsb: need at least two classes");
    // Stable top-2: descending value, ascending class id.
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best])
            best = k;
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (k != best && p[k] > p[second])
            second = k;
    return p[best] - p[second];
}

PositionMeasure position_measure(std::span<const double> p, const Matrix& sv_probs, bool negated_exponent) {
    if (sv_probs.rows() == 0)
        throw DataError("position_measure: empty support-vector set");
    if (sv_probs.cols() != p.size())
        throw DataError("position_measure: probability vectors differ in length");

    // Closest SV = smallest squared distance in either reading.
    std::size_t best = 0;
    double best_d2 = squared_distance(p, sv_probs.row(0));
    for (std::size_t j = 1; j < sv_probs.rows(); ++j) {
        const double d2 = squared_distance(p, sv_probs.row(j));
        if (d2 < best_d2) {
            best_d2 = d2;
            best = j;
        }
    }
    return {negated_exponent ? std::exp(-best_d2) : std::exp(best_d2), best};
}

UncertaintyVector combined_uncertainty(const Matrix& probs_unlabeled, const Matrix& sv_probs,
                                       bool negated_exponent) {
    UncertaintyVector out;
    out.values.reserve(probs_unlabeled.rows());
    out.closest_sv.reserve(probs_unlabeled.rows());
    for (std::size_t i = 0; i < probs_unlabeled.rows(); ++i) {
        const auto row = probs_unlabeled.row(i);
        const auto pos = position_measure(row, sv_probs, negated_exponent);
        out.values.push_back(bvsb(row) * pos.value);
        out.closest_sv.push_back(pos.sv_index);
    }
    return out;
}

}  // namespace rial
