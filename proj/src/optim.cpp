#include "graphrl/optim.hpp"

#include <cmath>

#include "graphrl/errors.hpp"

namespace graphrl {

void ParamStore::add(const std::string& name, Matrix value, ParamKind kind) {
    if (entries_.count(name) != 0) {
        throw ContractError("parameter already registered: " + name);
    }
    Entry entry;
    entry.grad = Matrix::zeros(value.rows(), value.cols());
    entry.value = std::move(value);
    entry.kind = kind;
    entries_.emplace(name, std::move(entry));
}

bool ParamStore::contains(const std::string& name) const {
    return entries_.count(name) != 0;
}

const ParamStore::Entry& ParamStore::find(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw ContractError("unknown parameter: " + name);
    }
    return it->second;
}

Matrix& ParamStore::value(const std::string& name) {
    return const_cast<Entry&>(find(name)).value;
}

const Matrix& ParamStore::value(const std::string& name) const {
    return find(name).value;
}

Matrix& ParamStore::grad(const std::string& name) {
    return const_cast<Entry&>(find(name)).grad;
}

const Matrix& ParamStore::grad(const std::string& name) const {
    return find(name).grad;
}

ParamKind ParamStore::kind(const std::string& name) const {
    return find(name).kind;
}

void ParamStore::zero_grads() {
    for (auto& [name, entry] : entries_) {
        for (double& g : entry.grad.data()) g = 0.0;
    }
}

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

double l2_penalty(const ParamStore& params) {
    double acc = 0.0;
    for (const auto& [name, entry] : params.entries()) {
        if (entry.kind != ParamKind::Weight) continue;
        acc += sum_squares(entry.value);
    }
    return acc;
}

void AdamOptimizer::step(ParamStore& params, double learning_rate) {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("adam learning rate must be positive, got " +
                          std::to_string(learning_rate));
    }
    ++step_count_;
    const double t = static_cast<double>(step_count_);
    const double bc1 = 1.0 - std::pow(config_.beta1, t);
    const double bc2 = 1.0 - std::pow(config_.beta2, t);
    for (auto& [name, entry] : params.entries()) {
        Moments& m = moments_[name];
        if (m.first.empty()) {
            m.first = Matrix::zeros(entry.value.rows(), entry.value.cols());
            m.second = Matrix::zeros(entry.value.rows(), entry.value.cols());
        }
        for (std::size_t i = 0; i < entry.value.size(); ++i) {
            const double g = entry.grad.data()[i];
            double& m1 = m.first.data()[i];
            double& m2 = m.second.data()[i];
            m1 = config_.beta1 * m1 + (1.0 - config_.beta1) * g;
            m2 = config_.beta2 * m2 + (1.0 - config_.beta2) * g * g;
            const double m1_hat = m1 / bc1;
            const double m2_hat = m2 / bc2;
            entry.value.data()[i] -= learning_rate * m1_hat / (std::sqrt(m2_hat) + config_.eps);
        }
    }
}

} // namespace graphrl
