#include "graphrl/synthetic.hpp"

#include <cmath>

#include "graphrl/errors.hpp"

namespace graphrl {

GeneratorKind generator_kind_from_name(const std::string& name) {
    if (name == "graph-diffusion") return GeneratorKind::GraphDiffusion;
    if (name == "threshold-walk") return GeneratorKind::ThresholdWalk;
    throw ConfigError("unknown generator kind: " + name +
                      " (expected graph-diffusion or threshold-walk)");
}

std::string generator_kind_name(GeneratorKind kind) {
    return kind == GeneratorKind::GraphDiffusion ? "graph-diffusion" : "threshold-walk";
}

void SyntheticSpec::validate() const {
    if (nodes == 0) throw ConfigError("synthetic: nodes must be positive");
    if (length < 2) throw ConfigError("synthetic: length must be at least 2");
    if (noise < 0.0) throw ConfigError("synthetic: noise must be >= 0");
    if (diffusion < 0.0 || diffusion > 1.5) {
        throw ConfigError("synthetic: diffusion must be in [0,1.5]");
    }
    if (init_hi < init_lo) throw ConfigError("synthetic: init_hi must be >= init_lo");
    if (walk_step < 0.0) throw ConfigError("synthetic: walk_step must be >= 0");
    if (walk_hi <= walk_lo) throw ConfigError("synthetic: walk_hi must be > walk_lo");
    if (step_seconds <= 0) throw ConfigError("synthetic: step_seconds must be positive");
}

Matrix generate_diffusion(const NormalizedGraph& graph, std::size_t length, double coupling,
                          double noise, double init_lo, double init_hi, Rng& rng) {
    const std::size_t n = graph.node_count();
    const Matrix& p = graph.propagation();
    Matrix series(length, n);
    std::vector<double> state(n);
    for (std::size_t j = 0; j < n; ++j) state[j] = rng.uniform(init_lo, init_hi);
    std::vector<double> mixed(n);
    for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t j = 0; j < n; ++j) series(t, j) = state[j];
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += p(i, j) * state[j];
            mixed[i] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) {
            state[i] += coupling * (mixed[i] - state[i]);
            if (noise > 0.0) state[i] += rng.normal(0.0, noise);
        }
    }
    return series;
}

Matrix generate_threshold_walk(std::size_t nodes, std::size_t length, double step, double lo,
                               double hi, Rng& rng) {
    Matrix series(length, nodes);
    std::vector<double> state(nodes);
    for (std::size_t j = 0; j < nodes; ++j) state[j] = rng.uniform(lo, hi);
    for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t j = 0; j < nodes; ++j) series(t, j) = state[j];
        for (std::size_t j = 0; j < nodes; ++j) {
            double next = state[j] + rng.normal(0.0, step);
            // reflect at the bounds so the walk keeps crossing bands
            if (next < lo) next = lo + (lo - next);
            if (next > hi) next = hi - (next - hi);
            if (next < lo) next = lo;
            if (next > hi) next = hi;
            state[j] = next;
        }
    }
    return series;
}

SyntheticOutput synthesize(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng = Rng::substream(spec.seed, "data");
    SyntheticOutput out;
    out.adjacency = ring_with_chords(spec.nodes, spec.extra_edges, spec.seed);
    if (spec.kind == GeneratorKind::GraphDiffusion) {
        const auto graph = NormalizedGraph::from_adjacency(out.adjacency);
        out.series.values = generate_diffusion(graph, spec.length, spec.diffusion, spec.noise,
                                               spec.init_lo, spec.init_hi, rng);
    } else {
        out.series.values = generate_threshold_walk(spec.nodes, spec.length, spec.walk_step,
                                                    spec.walk_lo, spec.walk_hi, rng);
    }
    out.series.step_seconds = spec.step_seconds;
    out.series.timestamps.resize(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        out.series.timestamps[t] = static_cast<std::int64_t>(t) * spec.step_seconds;
    }
    out.series.node_names.resize(spec.nodes);
    for (std::size_t j = 0; j < spec.nodes; ++j) {
        out.series.node_names[j] = "node_" + std::to_string(j);
    }
    return out;
}

} // namespace graphrl
