#include "graphrl/graph.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"
#include "graphrl/rng.hpp"

namespace graphrl {

NormalizedGraph NormalizedGraph::from_adjacency(Matrix adjacency) {
    const std::size_t n = adjacency.rows();
    if (n == 0 || adjacency.cols() != n) {
        throw ValidationError("adjacency must be square and non-empty, got " +
                              adjacency.shape_str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0) {
            throw ValidationError("adjacency diagonal must be zero (node " + std::to_string(i) +
                                  ")");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = adjacency(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("adjacency entries must be finite and nonnegative, got " +
                                      format_double(v) + " at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            if (std::abs(v - adjacency(j, i)) > 1e-12 * std::max(1.0, std::abs(v))) {
                throw ValidationError("adjacency must be symmetric; mismatch at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }

    // degree of A + I, then D^{-1/2} (A + I) D^{-1/2}
    std::vector<double> inv_sqrt_degree(n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 1.0;
        for (std::size_t j = 0; j < n; ++j) degree += adjacency(i, j);
        inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
    }
    Matrix propagation(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double self_looped = adjacency(i, j) + (i == j ? 1.0 : 0.0);
            propagation(i, j) = inv_sqrt_degree[i] * self_looped * inv_sqrt_degree[j];
        }
    }
    return NormalizedGraph(std::move(adjacency), std::move(propagation));
}

Matrix load_adjacency_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open adjacency file: " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(parse_double_field(f, path + " row " + std::to_string(rows.size())));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ValidationError("adjacency file is empty: " + path);
    }
    const std::size_t n = rows.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ValidationError("adjacency file is not square: row " + std::to_string(i) +
                                  " has " + std::to_string(rows[i].size()) + " fields, expected " +
                                  std::to_string(n) + " (" + path + ")");
        }
        for (std::size_t j = 0; j < n; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

void save_adjacency_csv(const std::string& path, const Matrix& adjacency) {
    std::ostringstream out;
    for (std::size_t i = 0; i < adjacency.rows(); ++i) {
        for (std::size_t j = 0; j < adjacency.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(adjacency(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

Matrix ring_with_chords(std::size_t n, std::size_t extra_chords, std::uint64_t seed) {
    Matrix a(n, n);
    if (n == 1) return a;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    Rng rng = Rng::substream(seed, "graph");
    std::size_t placed = 0;
    std::size_t attempts = 0;
    while (placed < extra_chords && attempts < 64 * (extra_chords + 1)) {
        ++attempts;
        const std::size_t i = rng.uniform_index(n);
        const std::size_t j = rng.uniform_index(n);
        if (i == j || a(i, j) != 0.0) continue;
        a(i, j) = 1.0;
        a(j, i) = 1.0;
        ++placed;
    }
    return a;
}

Matrix path_adjacency(std::size_t n) {
    Matrix a(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = 1.0;
        a(i + 1, i) = 1.0;
    }
    return a;
}

} // namespace graphrl
