#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "graphrl/errors.hpp"
#include "graphrl/forecaster.hpp"
#include "graphrl/graph.hpp"
#include "graphrl/io_util.hpp"
#include "graphrl/rng.hpp"
#include "oracles.hpp"

using namespace graphrl;

namespace {

using Grid = std::vector<std::vector<double>>;

Grid to_grid(const Matrix& m) {
    Grid g(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
    }
    return g;
}

Grid grid_matmul(const Grid& a, const Grid& b) {
    Grid out(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b[0].size(); ++j) {
            for (std::size_t p = 0; p < b.size(); ++p) out[i][j] += a[i][p] * b[p][j];
        }
    }
    return out;
}

// Step-by-step spatial-layer evaluation written independently of the library.
Grid oracle_gcn(const Grid& prop, const Grid& x, const Grid& w1, const Grid& w2) {
    Grid h = grid_matmul(grid_matmul(prop, x), w1);
    for (auto& row : h) {
        for (double& v : row) v = v > 0 ? v : 0;
    }
    Grid out = grid_matmul(grid_matmul(prop, h), w2);
    for (auto& row : out) {
        for (double& v : row) v = 1.0 / (1.0 + std::exp(-v));
    }
    return out;
}

// Hand transcription of the gating equations.
Grid oracle_gru(const Grid& g, const Grid& h, const GruWeights& w) {
    const std::size_t n = g.size();
    const std::size_t hidden = h[0].size();
    const auto gate = [&](const Matrix& wm, const Matrix& bm, const Grid& right) {
        Grid joint(n);
        for (std::size_t i = 0; i < n; ++i) {
            joint[i] = g[i];
            joint[i].insert(joint[i].end(), right[i].begin(), right[i].end());
        }
        Grid out = grid_matmul(joint, to_grid(wm));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < hidden; ++j) out[i][j] += bm(0, j);
        }
        return out;
    };
    Grid z = gate(w.update_w, w.update_b, h);
    Grid r = gate(w.reset_w, w.reset_b, h);
    for (auto& row : z)
        for (double& v : row) v = 1.0 / (1.0 + std::exp(-v));
    for (auto& row : r)
        for (double& v : row) v = 1.0 / (1.0 + std::exp(-v));
    Grid rh(n, std::vector<double>(hidden));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < hidden; ++j) rh[i][j] = r[i][j] * h[i][j];
    Grid cand = gate(w.candidate_w, w.candidate_b, rh);
    for (auto& row : cand)
        for (double& v : row) v = std::tanh(v);
    Grid out(n, std::vector<double>(hidden));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < hidden; ++j) {
            out[i][j] = z[i][j] * h[i][j] + (1.0 - z[i][j]) * cand[i][j];
        }
    }
    return out;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.normal(0.0, scale);
    return m;
}

void zero_params(ParamStore& store) {
    for (auto& [name, entry] : store.entries()) {
        for (double& v : entry.value.data()) v = 0.0;
    }
}

WindowedDataset constant_dataset(std::size_t rows, std::size_t nodes, double value,
                                 std::size_t window, const std::vector<int>& horizons) {
    Matrix series(rows, nodes);
    for (double& v : series.data()) v = value;
    return build_windows(series, window, horizons);
}

TgcnConfig small_config() {
    TgcnConfig c;
    c.n_nodes = 2;
    c.window = 3;
    c.hidden = 4;
    c.gcn_hidden = 4;
    c.horizons = {1};
    c.lambda = 0.0;
    c.learning_rate = 0.02;
    c.epochs = 200;
    c.batch_size = 8;
    c.seed = 0;
    return c;
}

} // namespace

TEST_SUITE_BEGIN("tgcn");

TEST_CASE("gcn with zero weights outputs 0.5 everywhere") {
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    const Matrix x = Matrix::from_rows({{0.3}, {0.7}, {0.1}});
    const Matrix out = gcn_forward(x, graph, Matrix(1, 4), Matrix(4, 4));
    for (const double v : out.data()) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("single-node gcn reduces to a dense two-layer map") {
    const auto graph = NormalizedGraph::from_adjacency(Matrix(1, 1));
    Rng rng(3);
    const Matrix x = Matrix::from_rows({{0.42}});
    const Matrix w1 = random_matrix(1, 5, rng);
    const Matrix w2 = random_matrix(5, 5, rng);
    const Matrix out = gcn_forward(x, graph, w1, w2);
    const Matrix direct = activation(
        matmul(activation(matmul(x, w1), Activation::Relu), w2), Activation::Sigmoid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.data()[i] == doctest::Approx(direct.data()[i]).epsilon(1e-14));
    }
}

TEST_CASE("gcn on the 3-node path matches the brute-force oracle (seed 7)") {
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    Rng rng(7);
    const Matrix x = random_matrix(3, 1, rng);
    const Matrix w1 = random_matrix(1, 4, rng);
    const Matrix w2 = random_matrix(4, 4, rng);
    const Matrix out = gcn_forward(x, graph, w1, w2);

    // propagation for the path graph, from the hand computation
    const double s6 = 1.0 / std::sqrt(6.0);
    const Grid prop = {{0.5, s6, 0.0}, {s6, 1.0 / 3.0, s6}, {0.0, s6, 0.5}};
    const Grid expected = oracle_gcn(prop, to_grid(x), to_grid(w1), to_grid(w2));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(out(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(gcn_forward(Matrix(2, 1), graph, w1, w2), DimensionError);
}

TEST_CASE("gru step zero case") {
    GruWeights w;
    w.update_w = Matrix(6, 4);
    w.update_b = Matrix(1, 4);
    w.reset_w = Matrix(6, 4);
    w.reset_b = Matrix(1, 4);
    w.candidate_w = Matrix(6, 4);
    w.candidate_b = Matrix(1, 4);
    const Matrix out = gru_step(Matrix(3, 2), Matrix(3, 4), w);
    for (const double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("gru step matches the hand-transcribed gate oracle") {
    Rng rng(21);
    GruWeights w;
    w.update_w = random_matrix(7, 4, rng);
    w.update_b = random_matrix(1, 4, rng, 0.3);
    w.reset_w = random_matrix(7, 4, rng);
    w.reset_b = random_matrix(1, 4, rng, 0.3);
    w.candidate_w = random_matrix(7, 4, rng);
    w.candidate_b = random_matrix(1, 4, rng, 0.3);
    const Matrix g = random_matrix(2, 3, rng);
    Matrix h(2, 4);
    for (double& v : h.data()) v = rng.uniform(-0.9, 0.9);
    const Matrix out = gru_step(g, h, w);
    const Grid expected = oracle_gru(to_grid(g), to_grid(h), w);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(out(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("gru hidden state stays in (-1,1) whenever the prior state does") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        GruWeights w;
        w.update_w = random_matrix(9, 5, rng, 2.0);
        w.update_b = random_matrix(1, 5, rng);
        w.reset_w = random_matrix(9, 5, rng, 2.0);
        w.reset_b = random_matrix(1, 5, rng);
        w.candidate_w = random_matrix(9, 5, rng, 2.0);
        w.candidate_b = random_matrix(1, 5, rng);
        Matrix h(3, 5);
        for (double& v : h.data()) v = rng.uniform(-0.999, 0.999);
        for (int step = 0; step < 30; ++step) {
            const Matrix g = random_matrix(3, 4, rng, 3.0);
            h = gru_step(g, h, w);
            for (const double v : h.data()) {
                CHECK(v > -1.0);
                CHECK(v < 1.0);
            }
        }
    }
}

TEST_CASE("forecast with zero weights predicts the head bias") {
    TgcnConfig config = small_config();
    config.n_nodes = 3;
    config.horizons = {1, 2};
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0, 0}, {1, 1, 1}));
    zero_params(model.params());
    model.params().value("head.b")(0, 0) = 0.25;
    model.params().value("head.b")(0, 1) = -0.5;
    Rng rng(1);
    Matrix window(config.window, 3);
    for (double& v : window.data()) v = rng.uniform();
    const Matrix pred = model.predict_scaled(window);
    REQUIRE(pred.rows() == 2);
    REQUIRE(pred.cols() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(pred(0, j) == doctest::Approx(0.25));
        CHECK(pred(1, j) == doctest::Approx(-0.5));
    }
}

TEST_CASE("forecast is deterministic") {
    TgcnConfig config = small_config();
    config.n_nodes = 3;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0, 0}, {1, 1, 1}));
    Rng rng(9);
    Matrix window(config.window, 3);
    for (double& v : window.data()) v = rng.uniform();
    const Matrix a = model.predict_scaled(window);
    const Matrix b = model.predict_scaled(window);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("node permutation commutes with the forecast") {
    TgcnConfig config = small_config();
    config.n_nodes = 3;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0, 0}, {1, 1, 1}));

    // permutation (0,1,2) -> (2,0,1)
    const std::array<std::size_t, 3> perm = {2, 0, 1};
    Matrix padj(3, 3);
    const Matrix& adj = graph.adjacency();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) padj(perm[i], perm[j]) = adj(i, j);
    }
    const auto pgraph = NormalizedGraph::from_adjacency(padj);
    auto permuted_model = ForecastModel::create(ModelKind::Tgcn, config, &pgraph,
                                                MinMaxScaler::from_bounds({0, 0, 0}, {1, 1, 1}));
    for (const auto& name : model.params().names()) {
        permuted_model.params().value(name) = model.params().value(name);
    }

    Rng rng(11);
    Matrix window(config.window, 3);
    for (double& v : window.data()) v = rng.uniform();
    Matrix permuted_window(config.window, 3);
    for (std::size_t t = 0; t < config.window; ++t) {
        for (std::size_t j = 0; j < 3; ++j) permuted_window(t, perm[j]) = window(t, j);
    }

    const Matrix pred = model.predict_scaled(window);
    const Matrix permuted_pred = permuted_model.predict_scaled(permuted_window);
    for (std::size_t k = 0; k < pred.rows(); ++k) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(permuted_pred(k, perm[j]) == doctest::Approx(pred(k, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("train_loss fixtures") {
    TgcnConfig config = small_config();
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(2));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    const Matrix target = Matrix::from_rows({{0.2, 0.4}});

    SUBCASE("zero at lambda 0 with exact prediction") {
        Tape tape(model.params());
        Var pred = tape.constant(target);
        Var loss = train_loss(tape, pred, target, 0.0);
        CHECK(tape.scalar_value(loss) == 0.0);
    }
    SUBCASE("lambda 1 adds exactly the l2 penalty") {
        Tape t0(model.params());
        const double base = t0.scalar_value(train_loss(t0, t0.constant(target), target, 0.0));
        Tape t1(model.params());
        const double with_reg = t1.scalar_value(train_loss(t1, t1.constant(target), target, 1.0));
        CHECK(with_reg - base == doctest::Approx(l2_penalty(model.params())).epsilon(1e-12));
    }
    SUBCASE("fixed tensors match the direct recomputation") {
        const Matrix pred = Matrix::from_rows({{0.5, 0.1}});
        Tape tape(model.params());
        const double got = tape.scalar_value(train_loss(tape, tape.constant(pred), target, 0.3));
        const double expected = ((0.3 * 0.3) + (0.3 * 0.3)) / 2.0 + 0.3 * l2_penalty(model.params());
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("loss is non-decreasing in lambda") {
        const Matrix pred = Matrix::from_rows({{0.5, 0.1}});
        double previous = -1.0;
        for (const double lambda : {0.0, 0.01, 0.1, 1.0, 10.0}) {
            Tape tape(model.params());
            const double v = tape.scalar_value(train_loss(tape, tape.constant(pred), target, lambda));
            CHECK(v >= previous);
            previous = v;
        }
    }
}

TEST_CASE("training fits a constant series") {
    TgcnConfig config = small_config();
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(2));
    const auto ds = constant_dataset(40, 2, 0.5, config.window, config.horizons);
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    const auto result = train_forecaster(model, ds);
    REQUIRE(result.loss_trace.size() == config.epochs + 1);

    double abs_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Matrix pred = model.predict_scaled(ds.windows[i]);
        for (std::size_t k = 0; k < pred.size(); ++k) {
            abs_sum += std::abs(pred.data()[k] - ds.targets[i].data()[k]);
            ++count;
        }
    }
    CHECK(abs_sum / static_cast<double>(count) < 0.01);
}

TEST_CASE("trace starts at the untrained loss and training is seed-deterministic") {
    TgcnConfig config = small_config();
    config.epochs = 5;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(2));
    Matrix series(30, 2);
    Rng rng(2);
    for (double& v : series.data()) v = rng.uniform();
    const auto ds = build_windows(series, config.window, config.horizons);

    auto model_a = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                         MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    // untrained loss computed directly, before any training touches the params
    double direct = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        direct += mean_squared_error(model_a.predict_scaled(ds.windows[i]), ds.targets[i]);
    }
    direct = direct / static_cast<double>(ds.size()) + config.lambda * l2_penalty(model_a.params());

    const auto trace_a = train_forecaster(model_a, ds).loss_trace;
    CHECK(trace_a[0] == doctest::Approx(direct).epsilon(1e-12));

    auto model_b = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                         MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    const auto trace_b = train_forecaster(model_b, ds).loss_trace;
    REQUIRE(trace_a.size() == trace_b.size());
    for (std::size_t i = 0; i < trace_a.size(); ++i) CHECK(trace_a[i] == trace_b[i]);

    // identical parameters after identical training
    for (const auto& name : model_a.params().names()) {
        const auto& va = model_a.params().value(name);
        const auto& vb = model_b.params().value(name);
        for (std::size_t i = 0; i < va.size(); ++i) CHECK(va.data()[i] == vb.data()[i]);
    }
}

TEST_CASE("training reports divergence with the epoch index") {
    TgcnConfig config = small_config();
    config.epochs = 3;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(2));
    const auto ds = constant_dataset(20, 2, 0.5, config.window, config.horizons);
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    model.params().value("head.w")(0, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
        train_forecaster(model, ds);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch() == 1);
    }
}

TEST_CASE("persistence predicts the last observed row") {
    const Matrix window = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
    const Matrix pred = persistence_predict(window, 3);
    REQUIRE(pred.rows() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(pred(k, 0) == 5.0);
        CHECK(pred(k, 1) == 6.0);
    }
}

TEST_CASE("persistence error on a random walk matches the closed form") {
    Rng rng(31);
    const double sigma = 0.1;
    const std::size_t length = 5000;
    Matrix series(length, 1);
    double x = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        series(t, 0) = x;
        x += rng.normal(0.0, sigma);
    }
    const std::vector<int> horizons = {1, 2, 3, 4};
    const auto ds = build_windows(series, 2, horizons);
    std::vector<double> abs_sum(horizons.size(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Matrix pred = persistence_predict(ds.windows[i], horizons.size());
        for (std::size_t k = 0; k < horizons.size(); ++k) {
            abs_sum[k] += std::abs(pred(k, 0) - ds.targets[i](k, 0));
        }
    }
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        const double mae = abs_sum[k] / static_cast<double>(ds.size());
        const double expected =
            sigma * std::sqrt(static_cast<double>(horizons[k])) * std::sqrt(2.0 / M_PI);
        CHECK(mae == doctest::Approx(expected).epsilon(0.12));
    }
}

TEST_CASE("gradient check on a 3-node tgcn instance") {
    TgcnConfig config;
    config.n_nodes = 3;
    config.window = 3;
    config.hidden = 4;
    config.gcn_hidden = 4;
    config.horizons = {1, 2};
    config.lambda = 0.01;
    config.seed = 13;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0, 0}, {1, 1, 1}));
    Rng rng(8);
    Matrix window(config.window, 3);
    for (double& v : window.data()) v = rng.uniform();
    Matrix target(3, 2);
    for (double& v : target.data()) v = rng.uniform();

    const auto loss_fn = [&](ParamStore&) {
        Tape tape(model.params());
        Var pred = model.forward(tape, window);
        return tape.scalar_value(train_loss(tape, pred, target, config.lambda));
    };
    Tape tape(model.params());
    Var pred = model.forward(tape, window);
    tape.backward(train_loss(tape, pred, target, config.lambda));

    const auto check = oracles::check_gradients(model.params(), loss_fn);
    CAPTURE(check.worst_param);
    CAPTURE(check.worst_rel);
    CHECK(check.ok);
}

TEST_CASE("gru-only baseline trains end to end") {
    TgcnConfig config = small_config();
    config.epochs = 30;
    const auto ds = constant_dataset(30, 2, 0.25, config.window, config.horizons);
    auto model = ForecastModel::create(ModelKind::GruOnly, config, nullptr,
                                       MinMaxScaler::from_bounds({0, 0}, {1, 1}));
    const auto result = train_forecaster(model, ds);
    CHECK(result.loss_trace.back() < result.loss_trace.front());
    const Matrix pred = model.predict_scaled(ds.windows[0]);
    CHECK(pred.rows() == 1);
    CHECK(pred.cols() == 2);
}

TEST_CASE("checkpoint round trip preserves predictions exactly") {
    TgcnConfig config = small_config();
    config.n_nodes = 3;
    const auto graph = NormalizedGraph::from_adjacency(path_adjacency(3));
    auto model = ForecastModel::create(ModelKind::Tgcn, config, &graph,
                                       MinMaxScaler::from_bounds({0, 0, 0}, {2, 3, 4}));
    Rng rng(15);
    Matrix window(config.window, 3);
    for (double& v : window.data()) v = rng.uniform();

    const auto path = std::filesystem::temp_directory_path() / "graphrl_ckpt_test.json";
    model.save(path.string());
    const auto loaded = ForecastModel::load(path.string(), &graph);
    const Matrix a = model.predict_scaled(window);
    const Matrix b = loaded.predict_scaled(window);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
    CHECK(loaded.scaler().maxs()[2] == 4.0);

    // version tag is enforced
    write_text_file(path.string(), "{\"format\":\"graphrl-forecast-v999\"}");
    CHECK_THROWS_AS(ForecastModel::load(path.string(), &graph), ValidationError);
    std::filesystem::remove(path);
}

TEST_SUITE_END();
