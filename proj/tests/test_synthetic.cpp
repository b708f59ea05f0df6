#include <cmath>

#include "doctest.h"
#include "graphrl/errors.hpp"
#include "graphrl/synthetic.hpp"

using namespace graphrl;

namespace {

// Pearson correlation between two node columns.
double level_correlation(const Matrix& series, std::size_t a, std::size_t b) {
    const std::size_t m = series.rows();
    double ma = 0, mb = 0;
    for (std::size_t t = 0; t < m; ++t) {
        ma += series(t, a);
        mb += series(t, b);
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double cov = 0, va = 0, vb = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double da = series(t, a) - ma;
        const double db = series(t, b) - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    return cov / std::sqrt(va * vb);
}

} // namespace

TEST_SUITE_BEGIN("synthetic");

TEST_CASE("zero noise and zero coupling from a constant start stays constant") {
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    Rng rng(1);
    const Matrix series = generate_diffusion(graph, 50, 0.0, 0.0, 0.7, 0.7, rng);
    for (const double v : series.data()) CHECK(v == 0.7);
}

TEST_CASE("same seed produces identical synthetic output") {
    SyntheticSpec spec;
    spec.seed = 77;
    spec.length = 64;
    const auto a = synthesize(spec);
    const auto b = synthesize(spec);
    REQUIRE(a.series.values.same_shape(b.series.values));
    for (std::size_t i = 0; i < a.series.values.size(); ++i) {
        CHECK(a.series.values.data()[i] == b.series.values.data()[i]);
    }
    for (std::size_t i = 0; i < a.adjacency.size(); ++i) {
        CHECK(a.adjacency.data()[i] == b.adjacency.data()[i]);
    }
}

TEST_CASE("diffusion couples neighbors more strongly than distant nodes") {
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(4));
    Rng rng(7);
    const Matrix series = generate_diffusion(graph, 2000, 0.6, 0.05, 0.0, 1.0, rng);
    const double near = level_correlation(series, 0, 1);
    const double far = level_correlation(series, 0, 3);
    CHECK(near > far + 0.03);
}

TEST_CASE("threshold walk stays inside its bounds and crosses bands") {
    Rng rng(3);
    const Matrix series = generate_threshold_walk(2, 3000, 4.0, 30.0, 180.0, rng);
    double lo = 1e18, hi = -1e18;
    for (const double v : series.data()) {
        CHECK(v >= 30.0);
        CHECK(v <= 180.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // wanders across a wide chunk of the range
    CHECK(hi - lo > 60.0);
}

TEST_CASE("spec validation names the offending field") {
    SyntheticSpec spec;
    spec.nodes = 0;
    CHECK_THROWS_WITH_AS(spec.validate(), "synthetic: nodes must be positive", ConfigError);
    spec.nodes = 4;
    spec.diffusion = 1.6;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.diffusion = 0.5;
    spec.walk_hi = spec.walk_lo;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_SUITE_END();
