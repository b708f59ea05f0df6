#include "graphrl/metrics.hpp"

#include <cmath>

#include "graphrl/errors.hpp"

namespace graphrl {

namespace {
constexpr double kMapeZeroGuard = 1e-8;
}

Metrics compute_metrics(const Matrix& pred, const Matrix& actual) {
    if (!pred.same_shape(actual)) {
        throw DimensionError("metrics shape mismatch: " + pred.shape_str() + " vs " +
                             actual.shape_str());
    }
    Metrics m;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double pct_sum = 0.0;
    std::size_t pct_count = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = actual.data()[i];
        const double e = pred.data()[i] - a;
        abs_sum += std::abs(e);
        sq_sum += e * e;
        if (std::abs(a) > kMapeZeroGuard) {
            pct_sum += std::abs(e / a) * 100.0;
            ++pct_count;
        }
    }
    const auto count = static_cast<double>(pred.size());
    m.mae = abs_sum / count;
    m.rmse = std::sqrt(sq_sum / count);
    m.mape = pct_count > 0 ? pct_sum / static_cast<double>(pct_count) : 0.0;
    return m;
}

} // namespace graphrl
