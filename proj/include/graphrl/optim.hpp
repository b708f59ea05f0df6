#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graphrl/matrix.hpp"

namespace graphrl {

/// Whether a parameter counts toward the L2 penalty (weights do, biases don't).
enum class ParamKind { Weight, Bias };

/// Named trainable parameters with matching gradient slots. Iteration order is
/// the sorted name order, which keeps optimizer updates deterministic.
class ParamStore {
public:
    struct Entry {
        Matrix value;
        Matrix grad;
        ParamKind kind = ParamKind::Weight;
    };

    void add(const std::string& name, Matrix value, ParamKind kind = ParamKind::Weight);
    bool contains(const std::string& name) const;

    Matrix& value(const std::string& name);
    const Matrix& value(const std::string& name) const;
    Matrix& grad(const std::string& name);
    const Matrix& grad(const std::string& name) const;
    ParamKind kind(const std::string& name) const;

    void zero_grads();
    std::size_t size() const { return entries_.size(); }
    std::vector<std::string> names() const;

    std::map<std::string, Entry>& entries() { return entries_; }
    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    const Entry& find(const std::string& name) const;
    std::map<std::string, Entry> entries_;
};

/// Sum of squared entries over all Weight-kind parameters; biases excluded.
double l2_penalty(const ParamStore& params);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Holds first/second moment accumulators per
/// parameter; the step counter increases by one per step() call.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig config = {}) : config_(config) {}

    /// Applies one update from the gradients currently stored in `params`.
    void step(ParamStore& params, double learning_rate);

    std::int64_t steps_taken() const { return step_count_; }
    const AdamConfig& config() const { return config_; }

private:
    struct Moments {
        Matrix first;
        Matrix second;
    };
    AdamConfig config_;
    std::int64_t step_count_ = 0;
    std::map<std::string, Moments> moments_;
};

} // namespace graphrl
