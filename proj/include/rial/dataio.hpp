#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rial/matrix.hpp"

namespace rial {

// Dense features with contiguous integer class ids 0..class_count-1.
//
// label_names keeps the original label text of every class id so a dataset
// can be written back in its input vocabulary.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> label_names;
    std::string name;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t feature_count() const noexcept { return features.cols(); }

    // Throws DataError when the structural invariants do not hold.
    // Experiments additionally need at least two classes.
    void validate(bool require_two_classes = false) const;
};

// Parses `label idx:val idx:val ...` lines (1-based, strictly increasing
// indices). Missing indices become 0.0; labels are numbered in first-seen order.
Dataset parse_sparse(std::istream& in);

// Parses a rectangular numeric CSV. A first row that does not parse as numbers
// is treated as a header. A negative label_column counts from the right
// (-1 is the last column).
Dataset parse_csv(std::istream& in, int label_column);

void write_sparse(std::ostream& out, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

enum class DataFormat { sparse, csv };

DataFormat parse_format(const std::string& text);

// Loads a file; the dataset name is the file stem.
Dataset load_dataset(const std::string& path, DataFormat format, int label_column = -1);

// Rescales every feature column to [0, 1]. Constant columns become 0.
Dataset min_max_normalize(const Dataset& data);

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded random partition of 0..n-1 with |train| = round(fraction * n).
// Both index lists are returned in ascending order.
TrainTestSplit split_train_test(std::size_t n, double fraction, std::uint64_t seed);

// Labeled / unlabeled partition of a training subset. Indices refer to rows of
// the dataset. labeled_labels[k] is the oracle answer recorded for labeled[k].
struct PoolState {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::vector<int> labeled_labels;
    std::size_t iteration = 0;

    std::size_t total() const noexcept { return labeled.size() + unlabeled.size(); }

    friend bool operator==(const PoolState&, const PoolState&) = default;
};

// Picks one uniformly random training index per class as the initial labeled
// set, ordered by class id. The remaining training indices stay unlabeled in
// their given order.
PoolState init_pool(const Dataset& data, const std::vector<std::size_t>& train_indices,
                    std::uint64_t seed);

// Moves `index` from unlabeled to labeled and records the oracle's label.
PoolState commit_query(const PoolState& pool, std::size_t index, int oracle_label);

}  // namespace rial
