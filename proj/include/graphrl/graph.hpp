#pragma once

#include <string>

#include "graphrl/matrix.hpp"

namespace graphrl {

/// A fixed, undirected graph together with its propagation matrix
/// D^{-1/2} (A + I) D^{-1/2}, where D is the degree matrix of A + I (the
/// symmetric normalization with self loops used by the GCN layers).
/// Immutable after construction; safe to share across threads.
class NormalizedGraph {
public:
    /// Validates the raw adjacency (square, symmetric, nonnegative, zero
    /// diagonal) and precomputes the propagation matrix.
    static NormalizedGraph from_adjacency(Matrix adjacency);

    std::size_t node_count() const { return adjacency_.rows(); }
    const Matrix& adjacency() const { return adjacency_; }
    const Matrix& propagation() const { return propagation_; }

private:
    NormalizedGraph(Matrix adjacency, Matrix propagation)
        : adjacency_(std::move(adjacency)), propagation_(std::move(propagation)) {}

    Matrix adjacency_;
    Matrix propagation_;
};

/// n rows of n comma-separated reals, no header.
Matrix load_adjacency_csv(const std::string& path);
void save_adjacency_csv(const std::string& path, const Matrix& adjacency);

/// Ring over n nodes plus `extra_chords` deterministic pseudo-random chords.
/// Connected by construction; used by the synthetic data generators.
Matrix ring_with_chords(std::size_t n, std::size_t extra_chords, std::uint64_t seed);

/// Path graph adjacency (nodes 0-1-2-...-n-1).
Matrix path_adjacency(std::size_t n);

} // namespace graphrl
