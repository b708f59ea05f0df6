#pragma once

#include "graphrl/matrix.hpp"

namespace graphrl {

/// Forecast-error summary. mape is in percent; entries whose actual value is
/// within 1e-8 of zero are excluded from mape (but kept in mae/rmse).
struct Metrics {
    double mae = 0.0;
    double mape = 0.0;
    double rmse = 0.0;
};

Metrics compute_metrics(const Matrix& pred, const Matrix& actual);

} // namespace graphrl
