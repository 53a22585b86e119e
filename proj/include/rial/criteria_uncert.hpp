#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rial/matrix.hpp"

namespace rial {

// Largest minus second-largest entry of a probability vector. Small values
// mean the classifier is torn between two classes.
double bvsb(std::span<const double> p);

struct PositionMeasure {
    double value = 1.0;        // exp(+|p - P_sv|^2) of the closest SV, >= 1
    std::size_t sv_index = 0;  // row of the closest SV in sv_probs
};

// Distance of a sample to the closest support vector in probability space,
// exp(|p - P_j|^2) minimized over SV rows j. With `negated_exponent` the
// similarity exp(-|p - P_j|^2) is used instead and the closest SV is the one
// maximizing it; the reported value is then that similarity. Ties go to the
// lowest SV row.
PositionMeasure position_measure(std::span<const double> p, const Matrix& sv_probs,
                                 bool negated_exponent = false);

struct UncertaintyVector {
    std::vector<double> values;  // C(i) = bvsb(P^i) * position value
    std::vector<std::size_t> closest_sv;
};

UncertaintyVector combined_uncertainty(const Matrix& probs_unlabeled, const Matrix& sv_probs,
                                       bool negated_exponent = false);

}  // namespace rial
