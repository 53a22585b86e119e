#include "rial/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rial/errors.hpp"
#include "rial/random.hpp"

namespace rial {

namespace {

bool parse_double(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (text.empty())
        return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Maps label text to contiguous ids in first-seen order. Numeric labels are
// compared by value so "+1", "1" and "1.0" name the same class.
class LabelRegistry {
public:
    int id_for(std::string_view raw) {
        std::string key(raw);
        double numeric;
        if (parse_double(raw, numeric))
            key = format_double(numeric);
        auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(names_.size()));
        if (inserted)
            names_.emplace_back(key);
        return it->second;
    }

    std::vector<std::string> take_names() { return std::move(names_); }

private:
    std::map<std::string, int> ids_;
    std::vector<std::string> names_;
};

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

void Dataset::validate(bool require_two_classes) const {
    if (labels.size() != features.rows())
        throw DataError("dataset '" + name + "': label count does not match feature rows");
    if (class_count < 1)
        throw DataError("dataset '" + name + "': no classes");
    if (require_two_classes && class_count < 2)
        throw DataError("dataset '" + name + "': need at least two classes");
    for (int y : labels)
        if (y < 0 || y >= class_count)
            throw DataError("dataset '" + name + "': class id out of range");
    if (!all_finite(features.data()))
        throw DataError("dataset '" + name + "': non-finite feature value");
}

Dataset parse_sparse(std::istream& in) {
    struct Row {
        int label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<Row> rows;
    LabelRegistry registry;
    std::size_t width = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty())
            continue;

        std::istringstream tokens{std::string(body)};
        std::string token;
        tokens >> token;
        Row row{registry.id_for(token), {}};

        std::size_t previous = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos)
                throw ParseError(line_no, "expected index:value, got '" + token + "'");
            std::size_t index = 0;
            const auto idx_text = std::string_view(token).substr(0, colon);
            const auto [ptr, ec] =
                std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
            if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || index == 0)
                throw ParseError(line_no, "bad feature index in '" + token + "'");
            double value;
            if (!parse_double(std::string_view(token).substr(colon + 1), value))
                throw ParseError(line_no, "bad feature value in '" + token + "'");
            if (index == previous)
                throw ParseError(line_no, "duplicate feature index " + std::to_string(index));
            if (index < previous)
                throw ParseError(line_no, "feature indices must increase");
            previous = index;
            width = std::max(width, index);
            row.entries.emplace_back(index - 1, value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DataError("empty input: no samples");

    Dataset data;
    data.features = Matrix(rows.size(), width, 0.0);
    data.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& [col, value] : rows[r].entries)
            data.features(r, col) = value;
        data.labels.push_back(rows[r].label);
    }
    data.label_names = registry.take_names();
    data.class_count = static_cast<int>(data.label_names.size());
    return data;
}

Dataset parse_csv(std::istream& in, int label_column) {
    LabelRegistry registry;
    Dataset data;
    std::size_t columns = 0;
    std::size_t label_pos = 0;
    bool first_row = true;

    auto resolve_label = [label_column](std::size_t width) -> std::size_t {
        const long pos = label_column < 0 ? static_cast<long>(width) + label_column : label_column;
        if (pos < 0 || pos >= static_cast<long>(width))
            throw DataError("label column " + std::to_string(label_column) + " out of range for " +
                            std::to_string(width) + " columns");
        return static_cast<std::size_t>(pos);
    };

    std::string line;
    std::size_t line_no = 0;
    std::vector<double> features;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split_commas(line);
        const bool header_candidate = first_row;
        first_row = false;

        if (data.labels.empty()) {
            // The first data row fixes the width; a header row may differ.
            columns = cells.size();
            label_pos = resolve_label(columns);
        } else if (cells.size() != columns) {
            throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, got " +
                                          std::to_string(cells.size()));
        }

        features.clear();
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size() && numeric; ++c) {
            if (c == label_pos)
                continue;
            double value;
            numeric = parse_double(cells[c], value);
            features.push_back(value);
        }
        if (!numeric) {
            if (header_candidate)
                continue;
            throw ParseError(line_no, "non-numeric feature cell");
        }
        data.features.append_row(features);
        data.labels.push_back(registry.id_for(cells[label_pos]));
    }
    if (data.labels.empty())
        throw DataError("empty input: no samples");

    data.label_names = registry.take_names();
    data.class_count = static_cast<int>(data.label_names.size());
    return data;
}

void write_sparse(std::ostream& out, const Dataset& data) {
    const std::size_t width = data.feature_count();
    for (std::size_t r = 0; r < data.size(); ++r) {
        out << data.label_names.at(static_cast<std::size_t>(data.labels[r]));
        for (std::size_t c = 0; c < width; ++c) {
            const double v = data.features(r, c);
            // The last column is always written so the width survives a round trip.
            if (v != 0.0 || c + 1 == width)
                out << ' ' << (c + 1) << ':' << format_double(v);
        }
        out << '\n';
    }
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t r = 0; r < data.size(); ++r) {
        out << data.label_names.at(static_cast<std::size_t>(data.labels[r]));
        for (double v : data.features.row(r))
            out << ',' << format_double(v);
        out << '\n';
    }
}

DataFormat parse_format(const std::string& text) {
    if (text == "sparse" || text == "libsvm")
        return DataFormat::sparse;
    if (text == "csv")
        return DataFormat::csv;
    throw UsageError("unknown data format '" + text + "' (expected sparse or csv)");
}

Dataset load_dataset(const std::string& path, DataFormat format, int label_column) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    Dataset data;
    try {
        data = format == DataFormat::sparse ? parse_sparse(in) : parse_csv(in, label_column);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
    data.name = std::filesystem::path(path).stem().string();
    data.validate();
    return data;
}

Dataset min_max_normalize(const Dataset& data) {
    Dataset out = data;
    for (std::size_t c = 0; c < data.feature_count(); ++c) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t r = 0; r < data.size(); ++r) {
            lo = std::min(lo, data.features(r, c));
            hi = std::max(hi, data.features(r, c));
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < data.size(); ++r)
            out.features(r, c) = span > 0.0 ? (data.features(r, c) - lo) / span : 0.0;
    }
    return out;
}

TrainTestSplit split_train_test(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw UsageError("train fraction must lie strictly between 0 and 1");
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
        throw DataError("train fraction " + format_double(fraction) + " leaves an empty side for " +
                        std::to_string(n) + " samples");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[uniform_index(rng, i + 1)]);

    TrainTestSplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

PoolState init_pool(const Dataset& data, const std::vector<std::size_t>& train_indices,
                    std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.class_count));
    for (std::size_t idx : train_indices) {
        if (idx >= data.size())
            throw DataError("train index out of range");
        by_class[static_cast<std::size_t>(data.labels[idx])].push_back(idx);
    }

    Rng rng(seed);
    PoolState pool;
    for (std::size_t y = 0; y < by_class.size(); ++y) {
        if (by_class[y].empty())
            throw DataError("class " + std::to_string(y) + " has no sample in the training subset");
        pool.labeled.push_back(by_class[y][uniform_index(rng, by_class[y].size())]);
        pool.labeled_labels.push_back(static_cast<int>(y));
    }
    for (std::size_t idx : train_indices)
        if (std::find(pool.labeled.begin(), pool.labeled.end(), idx) == pool.labeled.end())
            pool.unlabeled.push_back(idx);
    return pool;
}

PoolState commit_query(const PoolState& pool, std::size_t index, int oracle_label) {
    const auto it = std::find(pool.unlabeled.begin(), pool.unlabeled.end(), index);
    if (it == pool.unlabeled.end())
        throw DataError("index " + std::to_string(index) + " is not in the unlabeled pool");
    PoolState next = pool;
    next.unlabeled.erase(next.unlabeled.begin() + (it - pool.unlabeled.begin()));
    next.labeled.push_back(index);
    next.labeled_labels.push_back(oracle_label);
    ++next.iteration;
    return next;
}

}  // namespace rial
