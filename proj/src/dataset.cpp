#include "graphrl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

TimeSeries load_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open series file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("series file is empty: " + path);
    }
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "timestamp") {
        throw ValidationError("series header must be 'timestamp,<node columns...>' in " + path);
    }
    TimeSeries series;
    series.node_names.assign(header.begin() + 1, header.end());
    const std::size_t n = series.node_names.size();

    std::vector<double> flat;
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string context = path + " data row " + std::to_string(row_index);
        if (fields.size() != n + 1) {
            throw ValidationError(context + " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(n + 1) +
                                  " (rows with gaps are rejected)");
        }
        series.timestamps.push_back(parse_timestamp(fields[0]));
        for (std::size_t j = 0; j < n; ++j) {
            const double v = parse_double_field(fields[j + 1], context);
            if (!std::isfinite(v)) {
                throw ValidationError(context + ": non-finite value");
            }
            flat.push_back(v);
        }
        ++row_index;
    }
    if (row_index < 2) {
        throw ValidationError("series needs at least 2 rows to establish spacing: " + path);
    }
    series.values = Matrix(row_index, n, std::move(flat));

    const std::int64_t spacing = series.timestamps[1] - series.timestamps[0];
    if (spacing <= 0) {
        throw ValidationError("timestamps must be strictly increasing in " + path);
    }
    for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
        const std::int64_t d = series.timestamps[i] - series.timestamps[i - 1];
        if (d != spacing) {
            throw ValidationError("timestamp spacing must be constant in " + path + ": row " +
                                  std::to_string(i) + " has spacing " + std::to_string(d) +
                                  ", expected " + std::to_string(spacing));
        }
    }
    series.step_seconds = spacing;
    return series;
}

void save_series_csv(const std::string& path, const TimeSeries& series) {
    std::ostringstream out;
    out << "timestamp";
    for (const auto& name : series.node_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < series.length(); ++i) {
        out << series.timestamps[i];
        for (std::size_t j = 0; j < series.node_count(); ++j) {
            out << ',' << format_double(series.values(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

MinMaxScaler MinMaxScaler::fit(const Matrix& train_rows) {
    if (train_rows.rows() == 0) {
        throw ValidationError("scaler fit needs at least one row");
    }
    MinMaxScaler s;
    const std::size_t n = train_rows.cols();
    s.mins_.assign(n, 0.0);
    s.maxs_.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = train_rows(0, j);
        double hi = train_rows(0, j);
        for (std::size_t i = 1; i < train_rows.rows(); ++i) {
            lo = std::min(lo, train_rows(i, j));
            hi = std::max(hi, train_rows(i, j));
        }
        s.mins_[j] = lo;
        s.maxs_[j] = hi;
        if (hi == lo) s.degenerate_.push_back(j);
    }
    return s;
}

MinMaxScaler MinMaxScaler::from_bounds(std::vector<double> mins, std::vector<double> maxs) {
    if (mins.size() != maxs.size()) {
        throw DimensionError("scaler bounds length mismatch");
    }
    MinMaxScaler s;
    s.mins_ = std::move(mins);
    s.maxs_ = std::move(maxs);
    for (std::size_t j = 0; j < s.mins_.size(); ++j) {
        if (s.maxs_[j] < s.mins_[j]) {
            throw ValidationError("scaler max < min for node " + std::to_string(j));
        }
        if (s.maxs_[j] == s.mins_[j]) s.degenerate_.push_back(j);
    }
    return s;
}

double MinMaxScaler::apply_value(std::size_t node, double v) const {
    const double lo = mins_[node];
    const double hi = maxs_[node];
    if (hi == lo) return 0.5;
    return (v - lo) / (hi - lo);
}

double MinMaxScaler::invert_value(std::size_t node, double v) const {
    const double lo = mins_[node];
    const double hi = maxs_[node];
    if (hi == lo) return lo;
    return lo + v * (hi - lo);
}

Matrix MinMaxScaler::apply(const Matrix& original) const {
    if (original.cols() != node_count()) {
        throw DimensionError("scaler fitted on " + std::to_string(node_count()) +
                             " nodes, got " + original.shape_str());
    }
    Matrix out = original;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = apply_value(j, out(i, j));
    }
    return out;
}

Matrix MinMaxScaler::invert(const Matrix& scaled) const {
    if (scaled.cols() != node_count()) {
        throw DimensionError("scaler fitted on " + std::to_string(node_count()) +
                             " nodes, got " + scaled.shape_str());
    }
    Matrix out = scaled;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = invert_value(j, out(i, j));
    }
    return out;
}

WindowedDataset build_windows(const Matrix& series, std::size_t window_length,
                              const std::vector<int>& horizons, std::int64_t step_seconds) {
    if (window_length < 1) {
        throw ValidationError("window length must be >= 1");
    }
    if (horizons.empty()) {
        throw ValidationError("at least one horizon is required");
    }
    int previous = 0;
    for (const int h : horizons) {
        if (h < 1 || h <= previous) {
            throw ValidationError("horizons must be strictly increasing and >= 1");
        }
        previous = h;
    }
    const std::size_t max_horizon = static_cast<std::size_t>(horizons.back());
    const std::size_t required = window_length + max_horizon;
    if (series.rows() < required) {
        throw SizingError("series too short for windowing: have " +
                          std::to_string(series.rows()) + " rows, need at least " +
                          std::to_string(required) + " (window " +
                          std::to_string(window_length) + " + max horizon " +
                          std::to_string(max_horizon) + ")");
    }

    WindowedDataset ds;
    ds.horizons = horizons;
    ds.window_length = window_length;
    ds.node_count = series.cols();
    ds.step_seconds = step_seconds;
    const std::size_t count = series.rows() - required + 1;
    ds.windows.reserve(count);
    ds.targets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ds.windows.push_back(matrix_rows(series, i, i + window_length));
        Matrix target(horizons.size(), series.cols());
        for (std::size_t k = 0; k < horizons.size(); ++k) {
            const std::size_t row = i + window_length - 1 + static_cast<std::size_t>(horizons[k]);
            for (std::size_t j = 0; j < series.cols(); ++j) target(k, j) = series(row, j);
        }
        ds.targets.push_back(std::move(target));
    }
    return ds;
}

std::size_t chronological_split_point(std::size_t total_rows, double train_fraction) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ConfigError("train fraction must be in (0,1), got " + format_double(train_fraction));
    }
    const auto point = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(total_rows)));
    return std::min(point, total_rows);
}

Matrix matrix_rows(const Matrix& m, std::size_t begin, std::size_t end) {
    if (begin > end || end > m.rows()) {
        throw DimensionError("row slice [" + std::to_string(begin) + "," + std::to_string(end) +
                             ") out of range for " + m.shape_str());
    }
    Matrix out(end - begin, m.cols());
    for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(i - begin, j) = m(i, j);
    }
    return out;
}

int minutes_to_steps(double minutes, std::int64_t step_seconds) {
    if (step_seconds <= 0) {
        throw ConfigError("step duration must be positive to convert minutes to steps");
    }
    const double steps = minutes * 60.0 / static_cast<double>(step_seconds);
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 || rounded < 1.0) {
        throw ConfigError("horizon of " + format_double(minutes) +
                          " minutes is not a whole number of " +
                          std::to_string(step_seconds) + "s steps");
    }
    return static_cast<int>(rounded);
}

} // namespace graphrl
