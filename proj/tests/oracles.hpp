#pragma once

// Independent oracles used by the unit and acceptance suites. Everything here
// is deliberately written without the library's tape/solver machinery so it
// can disagree with the implementation under test.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "graphrl/matrix.hpp"
#include "graphrl/optim.hpp"

namespace oracles {

struct GradCheckResult {
    bool ok = true;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_rel = 0.0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Central finite differences over every entry of every parameter. `loss`
// must evaluate the loss from scratch on the given store (no cached tapes).
// The analytic gradients must already be present in `store.grad(...)`.
inline GradCheckResult check_gradients(
    graphrl::ParamStore& store,
    const std::function<double(graphrl::ParamStore&)>& loss,
    double step = 1e-5,
    double rel_tol = 1e-4,
    double abs_floor = 1e-7) {
    GradCheckResult result;
    for (const auto& name : store.names()) {
        const graphrl::Matrix analytic = store.grad(name);
        graphrl::Matrix& value = store.value(name);
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double saved = value.data()[i];
            value.data()[i] = saved + step;
            const double hi = loss(store);
            value.data()[i] = saved - step;
            const double lo = loss(store);
            value.data()[i] = saved;
            const double numeric = (hi - lo) / (2.0 * step);
            const double a = analytic.data()[i];
            const double diff = std::abs(a - numeric);
            const double denom = std::max({std::abs(a), std::abs(numeric), abs_floor});
            const double rel = diff / denom;
            if (diff > abs_floor && rel > rel_tol) {
                result.ok = false;
            }
            if (rel > result.worst_rel) {
                result.worst_rel = rel;
                result.worst_param = name;
                result.worst_index = i;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

// Naive Gauss-Jordan inverse; fine for the small systems in these tests.
inline graphrl::Matrix dense_inverse(const graphrl::Matrix& in) {
    const std::size_t n = in.rows();
    graphrl::Matrix a = in;
    graphrl::Matrix inv = graphrl::Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(inv(col, j), inv(pivot, j));
            }
        }
        const double p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Gaussian-process posterior by direct dense solve of the textbook formulas,
// standardizing y the same way the implementation documents.
struct DensePosterior {
    double mean = 0.0;
    double variance = 0.0;
};

inline DensePosterior gp_dense_solve(const std::vector<std::vector<double>>& X,
                                     const std::vector<double>& y,
                                     const std::vector<double>& query,
                                     double lengthscale,
                                     double signal_variance,
                                     double noise_variance,
                                     double jitter = 0.0) {
    const std::size_t m = X.size();
    double mean_y = 0.0;
    for (const double v : y) mean_y += v;
    mean_y /= static_cast<double>(m);
    double var_y = 0.0;
    for (const double v : y) var_y += (v - mean_y) * (v - mean_y);
    double sd_y = m >= 2 ? std::sqrt(var_y / static_cast<double>(m)) : 1.0;
    if (sd_y == 0.0) sd_y = 1.0;

    const auto kernel = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
        return signal_variance * std::exp(-d2 / (2.0 * lengthscale * lengthscale));
    };

    graphrl::Matrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) gram(i, j) = kernel(X[i], X[j]);
        gram(i, i) += noise_variance + jitter;
    }
    const graphrl::Matrix inv = dense_inverse(gram);

    std::vector<double> k_star(m);
    for (std::size_t i = 0; i < m; ++i) k_star[i] = kernel(X[i], query);

    DensePosterior post;
    double mean_std = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += inv(i, j) * (y[j] - mean_y) / sd_y;
        mean_std += k_star[i] * acc;
    }
    double reduction = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += inv(i, j) * k_star[j];
        reduction += k_star[i] * acc;
    }
    const double var_std = kernel(query, query) - reduction;
    post.mean = mean_std * sd_y + mean_y;
    post.variance = std::max(0.0, var_std) * sd_y * sd_y;
    return post;
}

// Tabular value iteration for a deterministic MDP given as next[s][a], reward[s][a].
struct TabularMdp {
    std::vector<std::vector<int>> next;
    std::vector<std::vector<double>> reward;
    double gamma = 0.9;
};

struct ValueIterationResult {
    std::vector<std::vector<double>> q;
    std::vector<int> policy;
};

inline ValueIterationResult value_iteration(const TabularMdp& mdp, std::size_t sweeps = 10000) {
    const std::size_t ns = mdp.next.size();
    const std::size_t na = mdp.next[0].size();
    std::vector<double> v(ns, 0.0);
    std::vector<std::vector<double>> q(ns, std::vector<double>(na, 0.0));
    for (std::size_t it = 0; it < sweeps; ++it) {
        double delta = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t a = 0; a < na; ++a) {
                q[s][a] = mdp.reward[s][a] + mdp.gamma * v[mdp.next[s][a]];
            }
            double best = q[s][0];
            for (std::size_t a = 1; a < na; ++a) best = std::max(best, q[s][a]);
            delta = std::max(delta, std::abs(best - v[s]));
            v[s] = best;
        }
        if (delta < 1e-13) break;
    }
    ValueIterationResult out;
    out.q = q;
    out.policy.resize(ns, 0);
    for (std::size_t s = 0; s < ns; ++s) {
        int best = 0;
        for (std::size_t a = 1; a < na; ++a) {
            if (q[s][a] > q[s][best]) best = static_cast<int>(a);
        }
        out.policy[s] = best;
    }
    return out;
}

} // namespace oracles
