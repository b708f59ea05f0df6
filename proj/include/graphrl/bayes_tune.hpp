#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphrl/matrix.hpp"
#include "graphrl/rng.hpp"

namespace graphrl {

/// One tunable dimension. Log-scaled dimensions must be strictly positive;
/// their unit-cube mapping is affine in log10 space.
struct SearchDim {
    enum class Scale { Linear, Log10 };
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    Scale scale = Scale::Linear;
};

struct SearchSpace {
    std::vector<SearchDim> dims;

    void validate() const;
    std::size_t size() const { return dims.size(); }
    std::vector<double> to_unit(const std::vector<double>& original) const;
    std::vector<double> from_unit(const std::vector<double>& unit) const;
};

struct GpConfig {
    double lengthscale = 0.2;      // in unit-cube coordinates
    double signal_variance = 1.0;  // in standardized-y space
    double noise_variance = 1e-4;
};

/// Squared-exponential kernel between two unit-cube points.
double se_kernel(const std::vector<double>& a, const std::vector<double>& b,
                 const GpConfig& config);

struct Posterior {
    double mean = 0.0;
    double variance = 0.0; // clamped at zero from below
};

/// Gaussian-process surrogate over the unit cube. y is standardized
/// internally; predictions are mapped back to the original objective units.
/// The Gram factorization escalates jitter (1e-10 .. 1e-6) until the
/// Cholesky succeeds and throws NumericError beyond that.
class GpModel {
public:
    static GpModel fit(std::vector<std::vector<double>> points_unit, std::vector<double> values,
                       GpConfig config = {});

    Posterior predict(const std::vector<double>& x_unit) const;

    const std::vector<std::vector<double>>& points() const { return points_; }
    const std::vector<double>& values() const { return values_; }
    double best_value() const;
    const std::vector<double>& best_point() const;
    double jitter_used() const { return jitter_; }
    const GpConfig& config() const { return config_; }

private:
    GpConfig config_;
    std::vector<std::vector<double>> points_;
    std::vector<double> values_;
    double y_mean_ = 0.0;
    double y_sd_ = 1.0;
    double jitter_ = 0.0;
    Matrix chol_;               // lower-triangular factor of K + (noise+jitter) I
    std::vector<double> alpha_; // (K + noise I)^{-1} z
};

/// Minimization-form expected improvement against the incumbent best value.
double expected_improvement(const Posterior& posterior, double best_value);

/// Quasi-random candidate pool (shifted Halton) plus local perturbations of
/// the incumbent, all in the unit cube.
std::vector<std::vector<double>> build_candidate_pool(const GpModel& model,
                                                      const SearchSpace& space,
                                                      std::size_t count, Rng& rng);

/// Index of the pool entry with maximal EI; ties resolve to the first.
std::size_t select_best_candidate(const GpModel& model,
                                  const std::vector<std::vector<double>>& pool);

/// Argmax-EI proposal over a fresh candidate pool (unit-cube coordinates).
std::vector<double> propose_next(const GpModel& model, const SearchSpace& space,
                                 std::size_t candidate_count, Rng& rng);

struct TuneLogEntry {
    std::size_t iteration = 0;
    std::vector<double> point; // original coordinates
    double objective = 0.0;
    bool is_best = false;
    bool failed = false;
};

struct TuneResult {
    std::vector<double> best_point; // original coordinates
    double best_objective = 0.0;
    std::vector<TuneLogEntry> log;
    std::uint64_t seed = 0;
};

/// Fit-propose-evaluate loop: quasi-random initial design of max(3, d+1)
/// points, then EI proposals until `budget` evaluations. Objective failures
/// are logged with a penalty value worse than anything observed; if every
/// initial point fails the tune aborts with TuningError.
TuneResult tune(const std::function<double(const std::vector<double>&)>& objective,
                const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                GpConfig gp_config = {}, std::size_t candidate_count = 2048);

/// `iteration,<dim names...>,objective,is_best`
void save_tune_log_csv(const std::string& path, const SearchSpace& space,
                       const TuneResult& result);

} // namespace graphrl
