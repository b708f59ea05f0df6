#include "graphrl/bayes_tune.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

// Lower Cholesky; false if the matrix is not (numerically) positive definite.
bool cholesky(const Matrix& a, Matrix& out) {
    const std::size_t n = a.rows();
    out = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= out(i, k) * out(j, k);
            if (i == j) {
                if (acc <= 0.0) return false;
                out(i, i) = std::sqrt(acc);
            } else {
                out(i, j) = acc / out(j, j);
            }
        }
    }
    return true;
}

std::vector<double> forward_solve(const Matrix& lower, const std::vector<double>& b) {
    const std::size_t n = b.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lower(i, j) * x[j];
        x[i] = acc / lower(i, i);
    }
    return x;
}

std::vector<double> backward_solve(const Matrix& lower, const std::vector<double>& b) {
    const std::size_t n = b.size();
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= lower(j, i) * x[j];
        x[i] = acc / lower(i, i);
    }
    return x;
}

double standard_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

constexpr std::array<int, 8> kHaltonPrimes = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::size_t index, int base) {
    double result = 0.0;
    double fraction = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += fraction * static_cast<double>(index % static_cast<std::size_t>(base));
        index /= static_cast<std::size_t>(base);
        fraction /= static_cast<double>(base);
    }
    return result;
}

std::vector<double> halton_point(std::size_t index, const std::vector<double>& shifts) {
    std::vector<double> p(shifts.size());
    for (std::size_t d = 0; d < shifts.size(); ++d) {
        const double v = radical_inverse(index + 1, kHaltonPrimes[d]) + shifts[d];
        p[d] = v - std::floor(v);
    }
    return p;
}

} // namespace

void SearchSpace::validate() const {
    if (dims.empty()) {
        throw ConfigError("search space must have at least one dimension");
    }
    if (dims.size() > kHaltonPrimes.size()) {
        throw ConfigError("search space supports at most " +
                          std::to_string(kHaltonPrimes.size()) + " dimensions");
    }
    for (const auto& d : dims) {
        if (d.name.empty()) throw ConfigError("search dimension needs a name");
        if (!(d.lower < d.upper)) {
            throw ConfigError("search dimension '" + d.name + "': lower must be < upper");
        }
        if (d.scale == SearchDim::Scale::Log10 && d.lower <= 0.0) {
            throw ConfigError("search dimension '" + d.name +
                              "': log10 scale requires positive bounds");
        }
    }
}

std::vector<double> SearchSpace::to_unit(const std::vector<double>& original) const {
    if (original.size() != dims.size()) {
        throw DimensionError("point has " + std::to_string(original.size()) +
                             " coordinates, space has " + std::to_string(dims.size()));
    }
    std::vector<double> unit(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) {
        const auto& dim = dims[d];
        if (dim.scale == SearchDim::Scale::Log10) {
            unit[d] = (std::log10(original[d]) - std::log10(dim.lower)) /
                      (std::log10(dim.upper) - std::log10(dim.lower));
        } else {
            unit[d] = (original[d] - dim.lower) / (dim.upper - dim.lower);
        }
    }
    return unit;
}

std::vector<double> SearchSpace::from_unit(const std::vector<double>& unit) const {
    if (unit.size() != dims.size()) {
        throw DimensionError("point has " + std::to_string(unit.size()) +
                             " coordinates, space has " + std::to_string(dims.size()));
    }
    std::vector<double> original(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) {
        const auto& dim = dims[d];
        const double u = std::clamp(unit[d], 0.0, 1.0);
        if (dim.scale == SearchDim::Scale::Log10) {
            const double lg =
                std::log10(dim.lower) + u * (std::log10(dim.upper) - std::log10(dim.lower));
            original[d] = std::pow(10.0, lg);
        } else {
            original[d] = dim.lower + u * (dim.upper - dim.lower);
        }
    }
    return original;
}

double se_kernel(const std::vector<double>& a, const std::vector<double>& b,
                 const GpConfig& config) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return config.signal_variance *
           std::exp(-d2 / (2.0 * config.lengthscale * config.lengthscale));
}

GpModel GpModel::fit(std::vector<std::vector<double>> points_unit, std::vector<double> values,
                     GpConfig config) {
    if (points_unit.empty() || points_unit.size() != values.size()) {
        throw ValidationError("gp fit needs matching, non-empty points and values");
    }
    GpModel model;
    model.config_ = config;

    // Perturb duplicate rows: identical inputs make the Gram matrix singular.
    for (std::size_t i = 0; i < points_unit.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double max_diff = 0.0;
            for (std::size_t d = 0; d < points_unit[i].size(); ++d) {
                max_diff = std::max(max_diff, std::abs(points_unit[i][d] - points_unit[j][d]));
            }
            if (max_diff < kDuplicateTolerance) {
                const double nudge = 1e-9 * static_cast<double>(i + 1);
                for (double& v : points_unit[i]) {
                    v = v + nudge <= 1.0 ? v + nudge : v - nudge;
                }
            }
        }
    }
    model.points_ = std::move(points_unit);
    model.values_ = std::move(values);

    const std::size_t m = model.values_.size();
    double mean = 0.0;
    for (const double v : model.values_) mean += v;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (const double v : model.values_) var += (v - mean) * (v - mean);
    double sd = m >= 2 ? std::sqrt(var / static_cast<double>(m)) : 1.0;
    if (sd == 0.0) sd = 1.0;
    model.y_mean_ = mean;
    model.y_sd_ = sd;

    Matrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            gram(i, j) = se_kernel(model.points_[i], model.points_[j], config);
        }
    }

    bool factored = false;
    for (const double jitter : {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
        Matrix attempt = gram;
        for (std::size_t i = 0; i < m; ++i) attempt(i, i) += config.noise_variance + jitter;
        if (cholesky(attempt, model.chol_)) {
            model.jitter_ = jitter;
            factored = true;
            break;
        }
    }
    if (!factored) {
        throw NumericError("gp gram matrix is not positive definite even with jitter 1e-6; "
                           "the " + std::to_string(m) + " design points are too ill-conditioned");
    }

    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = (model.values_[i] - mean) / sd;
    model.alpha_ = backward_solve(model.chol_, forward_solve(model.chol_, z));
    return model;
}

Posterior GpModel::predict(const std::vector<double>& x_unit) const {
    const std::size_t m = points_.size();
    if (m == 0) {
        throw ContractError("gp model is not fitted");
    }
    if (x_unit.size() != points_[0].size()) {
        throw DimensionError("query has " + std::to_string(x_unit.size()) +
                             " coordinates, model expects " + std::to_string(points_[0].size()));
    }
    std::vector<double> k_star(m);
    for (std::size_t i = 0; i < m; ++i) k_star[i] = se_kernel(points_[i], x_unit, config_);

    double mean_std = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean_std += k_star[i] * alpha_[i];

    const std::vector<double> v = forward_solve(chol_, k_star);
    double reduction = 0.0;
    for (const double vi : v) reduction += vi * vi;
    double var_std = se_kernel(x_unit, x_unit, config_) - reduction;
    if (var_std < 0.0) var_std = 0.0;

    Posterior post;
    post.mean = mean_std * y_sd_ + y_mean_;
    post.variance = var_std * y_sd_ * y_sd_;
    return post;
}

double GpModel::best_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

const std::vector<double>& GpModel::best_point() const {
    const std::size_t idx = static_cast<std::size_t>(
        std::min_element(values_.begin(), values_.end()) - values_.begin());
    return points_[idx];
}

double expected_improvement(const Posterior& posterior, double best_value) {
    const double gap = best_value - posterior.mean;
    const double sd = std::sqrt(std::max(0.0, posterior.variance));
    if (sd == 0.0) {
        return std::max(0.0, gap);
    }
    const double z = gap / sd;
    return gap * standard_normal_cdf(z) + sd * standard_normal_pdf(z);
}

std::vector<std::vector<double>> build_candidate_pool(const GpModel& model,
                                                      const SearchSpace& space,
                                                      std::size_t count, Rng& rng) {
    const std::size_t d = space.size();
    std::vector<double> shifts(d);
    for (double& s : shifts) s = rng.uniform();
    std::vector<std::vector<double>> pool;
    pool.reserve(count + 32);
    for (std::size_t i = 0; i < count; ++i) {
        pool.push_back(halton_point(i, shifts));
    }
    // local refinements around the incumbent
    const std::vector<double>& incumbent = model.best_point();
    for (std::size_t i = 0; i < 32; ++i) {
        std::vector<double> p(d);
        for (std::size_t k = 0; k < d; ++k) {
            p[k] = std::clamp(incumbent[k] + rng.normal(0.0, 0.05), 0.0, 1.0);
        }
        pool.push_back(std::move(p));
    }
    return pool;
}

std::size_t select_best_candidate(const GpModel& model,
                                  const std::vector<std::vector<double>>& pool) {
    if (pool.empty()) {
        throw ContractError("candidate pool is empty");
    }
    const double best_value = model.best_value();
    std::size_t best_index = 0;
    double best_ei = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double ei = expected_improvement(model.predict(pool[i]), best_value);
        if (ei > best_ei) {
            best_ei = ei;
            best_index = i;
        }
    }
    return best_index;
}

std::vector<double> propose_next(const GpModel& model, const SearchSpace& space,
                                 std::size_t candidate_count, Rng& rng) {
    const auto pool = build_candidate_pool(model, space, candidate_count, rng);
    return pool[select_best_candidate(model, pool)];
}

namespace {

double penalty_for(double worst) {
    if (worst == 0.0) return 1.0;
    return worst + 9.0 * std::abs(worst); // == 10x worst for positive losses
}

} // namespace

TuneResult tune(const std::function<double(const std::vector<double>&)>& objective,
                const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                GpConfig gp_config, std::size_t candidate_count) {
    space.validate();
    const std::size_t d = space.size();
    const std::size_t initial = std::max<std::size_t>(3, d + 1);
    if (budget < initial) {
        throw ConfigError("tune budget " + std::to_string(budget) +
                          " is below the initial design size " + std::to_string(initial));
    }

    Rng rng = Rng::substream(seed, "tuner");
    std::vector<double> shifts(d);
    for (double& s : shifts) s = rng.uniform();

    TuneResult result;
    result.seed = seed;
    std::vector<std::vector<double>> evaluated_unit;
    std::vector<double> observed;
    std::vector<std::size_t> failed_pending; // log indices awaiting a penalty
    bool any_success = false;
    double worst_success = 0.0;
    double best = 0.0;

    const auto record = [&](const std::vector<double>& unit_point, std::size_t iteration) {
        const std::vector<double> original = space.from_unit(unit_point);
        TuneLogEntry entry;
        entry.iteration = iteration;
        entry.point = original;
        double value = 0.0;
        bool ok = true;
        try {
            value = objective(original);
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok && !std::isfinite(value)) ok = false;
        if (ok) {
            if (!any_success || value > worst_success) worst_success = value;
            if (!any_success || value < best) {
                best = value;
                entry.is_best = true;
                result.best_point = original;
                result.best_objective = value;
            }
            any_success = true;
            entry.objective = value;
        } else {
            entry.failed = true;
            entry.objective = penalty_for(worst_success); // refreshed later if still pending
            failed_pending.push_back(result.log.size());
        }
        result.log.push_back(entry);
        evaluated_unit.push_back(unit_point);
        observed.push_back(entry.objective);
        return ok;
    };

    for (std::size_t i = 0; i < initial; ++i) {
        record(halton_point(i, shifts), i);
    }
    if (!any_success) {
        throw TuningError("objective failed on all " + std::to_string(initial) +
                          " initial design points");
    }
    // initial-design failures get their penalty from the full initial sweep
    for (const std::size_t idx : failed_pending) {
        result.log[idx].objective = penalty_for(worst_success);
        observed[idx] = result.log[idx].objective;
    }
    failed_pending.clear();

    for (std::size_t iteration = initial; iteration < budget; ++iteration) {
        const GpModel model = GpModel::fit(evaluated_unit, observed, gp_config);
        const std::vector<double> next = propose_next(model, space, candidate_count, rng);
        record(next, iteration);
    }
    return result;
}

void save_tune_log_csv(const std::string& path, const SearchSpace& space,
                       const TuneResult& result) {
    std::ostringstream out;
    out << "iteration";
    for (const auto& dim : space.dims) out << ',' << dim.name;
    out << ",objective,is_best\n";
    for (const auto& entry : result.log) {
        out << entry.iteration;
        for (const double v : entry.point) out << ',' << format_double(v);
        out << ',' << format_double(entry.objective) << ',' << (entry.is_best ? 1 : 0) << '\n';
    }
    write_text_file(path, out.str());
}

} // namespace graphrl
