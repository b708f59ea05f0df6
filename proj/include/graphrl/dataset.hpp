#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphrl/matrix.hpp"

namespace graphrl {

/// A multivariate series in original units, with evenly spaced timestamps.
struct TimeSeries {
    std::vector<std::int64_t> timestamps; // epoch seconds, strictly increasing
    Matrix values;                        // T x n
    std::vector<std::string> node_names;
    std::int64_t step_seconds = 0;

    std::size_t length() const { return values.rows(); }
    std::size_t node_count() const { return values.cols(); }
};

/// Header `timestamp,node_0,...`; timestamps are epoch seconds or ISO-8601,
/// strictly increasing with constant spacing. Rows with missing fields are
/// rejected outright (no imputation).
TimeSeries load_series_csv(const std::string& path);
void save_series_csv(const std::string& path, const TimeSeries& series);

/// Per-node affine map fitted on training rows only: train range -> [0,1].
/// A node whose training range is degenerate (max == min) maps to the
/// constant 0.5 and is reported in degenerate_nodes().
class MinMaxScaler {
public:
    static MinMaxScaler fit(const Matrix& train_rows);
    static MinMaxScaler from_bounds(std::vector<double> mins, std::vector<double> maxs);

    Matrix apply(const Matrix& original) const;
    Matrix invert(const Matrix& scaled) const;
    double apply_value(std::size_t node, double v) const;
    double invert_value(std::size_t node, double v) const;

    std::size_t node_count() const { return mins_.size(); }
    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }
    const std::vector<std::size_t>& degenerate_nodes() const { return degenerate_; }

private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
    std::vector<std::size_t> degenerate_;
};

/// Sliding windows paired with multi-horizon targets, all in scaled space.
/// Window i covers rows [i, i+w); its target rows sit at i+w-1+h for each
/// horizon h, so inputs and targets never overlap.
struct WindowedDataset {
    std::vector<Matrix> windows; // each w x n
    std::vector<Matrix> targets; // each |horizons| x n
    std::vector<int> horizons;   // step offsets, strictly increasing, >= 1
    std::size_t window_length = 0;
    std::size_t node_count = 0;
    std::int64_t step_seconds = 0;

    std::size_t size() const { return windows.size(); }
};

WindowedDataset build_windows(const Matrix& series, std::size_t window_length,
                              const std::vector<int>& horizons, std::int64_t step_seconds = 0);

/// First `ceil(fraction * T)` rows; windows overlap, so the split is always
/// chronological, never shuffled.
std::size_t chronological_split_point(std::size_t total_rows, double train_fraction);
Matrix matrix_rows(const Matrix& m, std::size_t begin, std::size_t end);

/// Converts a horizon in minutes to a step offset; errors unless it divides evenly.
int minutes_to_steps(double minutes, std::int64_t step_seconds);

} // namespace graphrl
