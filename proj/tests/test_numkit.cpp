#include <cmath>

#include "doctest.h"
#include "graphrl/errors.hpp"
#include "graphrl/matrix.hpp"
#include "graphrl/optim.hpp"
#include "graphrl/rng.hpp"
#include "graphrl/tape.hpp"
#include "oracles.hpp"

using namespace graphrl;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.normal(0.0, scale);
    return m;
}

// A small network touching every primitive in the supported set.
double full_primitive_loss(ParamStore& store, const Matrix& target, Tape* out_tape = nullptr) {
    Tape local(store);
    Tape& t = out_tape != nullptr ? *out_tape : local;
    Var x = t.param("x");
    Var w1 = t.param("w1");
    Var b1 = t.param("b1");
    Var w2 = t.param("w2");
    Var w3 = t.param("w3");
    Var hidden = t.relu(t.add(t.matmul(x, w1), b1));
    Var a = t.matmul(hidden, w2);
    Var c = t.concat_cols(t.sigmoid(a), t.tanh(t.matmul(x, w3)));
    Var d = t.hadamard(c, t.scale(c, 0.7));
    Var loss = t.add(t.mean_squared_error(d, t.constant(target)),
                     t.scale(t.sum_squares(w1), 0.3));
    if (out_tape != nullptr) {
        t.backward(loss);
    }
    return t.scalar_value(loss);
}

} // namespace

TEST_SUITE_BEGIN("numkit");

TEST_CASE("matmul identity and hand-computed product") {
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix id = Matrix::identity(2);
    const Matrix out = matmul(id, m);
    CHECK(out(0, 0) == 1.0);
    CHECK(out(0, 1) == 2.0);
    CHECK(out(1, 0) == 3.0);
    CHECK(out(1, 1) == 4.0);

    const Matrix dot = matmul(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3}, {4}}));
    CHECK(dot.rows() == 1);
    CHECK(dot.cols() == 1);
    CHECK(dot(0, 0) == 11.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    const Matrix a(2, 3);
    const Matrix b(4, 2);
    try {
        matmul(a, b);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("4x2") != std::string::npos);
    }
}

TEST_CASE("activation fixed points") {
    const Matrix z = Matrix::from_rows({{0.0}});
    CHECK(activation(z, Activation::Sigmoid)(0, 0) == doctest::Approx(0.5));
    CHECK(activation(z, Activation::Tanh)(0, 0) == 0.0);
    CHECK(activation(Matrix::from_rows({{-3.0}}), Activation::Relu)(0, 0) == 0.0);
}

TEST_CASE("sigmoid and tanh stay strictly inside their ranges") {
    Rng rng(11);
    Matrix x(4, 5);
    for (double& v : x.data()) v = rng.uniform(-60.0, 60.0);
    const Matrix s = activation(x, Activation::Sigmoid);
    const Matrix t = activation(x, Activation::Tanh);
    for (const double v : s.data()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    for (const double v : t.data()) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("l2 penalty sums squared weights and skips biases") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1, 2}, {0, 1}}), ParamKind::Weight);
    CHECK(l2_penalty(store) == doctest::Approx(6.0));

    store.add("b", Matrix::from_rows({{5, 5}}), ParamKind::Bias);
    CHECK(l2_penalty(store) == doctest::Approx(6.0));

    ParamStore zeros;
    zeros.add("w", Matrix(3, 3));
    CHECK(l2_penalty(zeros) == 0.0);
}

TEST_CASE("adding a parameter never decreases the penalty") {
    Rng rng(5);
    ParamStore store;
    double previous = 0.0;
    for (int k = 0; k < 6; ++k) {
        store.add("w" + std::to_string(k), random_matrix(2, 3, rng));
        const double now = l2_penalty(store);
        CHECK(now >= previous);
        previous = now;
    }
}

TEST_CASE("backward of sum of squares") {
    ParamStore store;
    store.add("x", Matrix::from_rows({{1, 2}}));
    Tape tape(store);
    Var loss = tape.sum_squares(tape.param("x"));
    tape.backward(loss);
    CHECK(store.grad("x")(0, 0) == doctest::Approx(2.0));
    CHECK(store.grad("x")(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("parameters unreachable from the loss get zero gradients") {
    ParamStore store;
    store.add("used", Matrix::from_rows({{3.0}}));
    store.add("unused", Matrix::from_rows({{7.0}}));
    Tape tape(store);
    tape.param("unused");
    Var loss = tape.sum_squares(tape.param("used"));
    tape.backward(loss);
    CHECK(store.grad("used")(0, 0) == doctest::Approx(6.0));
    CHECK(store.grad("unused")(0, 0) == 0.0);
}

TEST_CASE("backward rejects non-scalar loss") {
    ParamStore store;
    store.add("x", Matrix::from_rows({{1, 2}}));
    Tape tape(store);
    Var x = tape.param("x");
    CHECK_THROWS_AS(tape.backward(x), ContractError);
}

TEST_CASE("analytic gradients match central finite differences") {
    for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        Rng rng(seed);
        ParamStore store;
        store.add("x", random_matrix(3, 4, rng, 0.8));
        store.add("w1", random_matrix(4, 5, rng, 0.8));
        store.add("b1", random_matrix(1, 5, rng, 0.5), ParamKind::Bias);
        store.add("w2", random_matrix(5, 3, rng, 0.8));
        store.add("w3", random_matrix(4, 2, rng, 0.8));
        const Matrix target = random_matrix(3, 5, rng, 0.5);

        Tape tape(store);
        full_primitive_loss(store, target, &tape);

        const auto result = oracles::check_gradients(
            store, [&](ParamStore& s) { return full_primitive_loss(s, target); });
        CAPTURE(seed);
        CAPTURE(result.worst_param);
        CAPTURE(result.worst_rel);
        CHECK(result.ok);
    }
}

TEST_CASE("randomly composed primitive graphs pass the gradient check") {
    // Random DAGs over the full primitive set, grown from a few parameter
    // leaves; every composition must agree with finite differences.
    for (const std::uint64_t seed : {101ull, 202ull, 303ull, 404ull, 505ull}) {
        Rng rng(seed);
        ParamStore store;
        const std::size_t rows = 2 + rng.uniform_index(3);
        const std::size_t cols = 2 + rng.uniform_index(3);
        const std::size_t n_params = 2 + rng.uniform_index(3);
        for (std::size_t p = 0; p < n_params; ++p) {
            store.add("p" + std::to_string(p), random_matrix(rows, cols, rng, 0.7),
                      p % 3 == 2 ? ParamKind::Bias : ParamKind::Weight);
        }

        const auto build = [&](ParamStore& s, Tape* out_tape) {
            Tape local(s);
            Tape& t = out_tape != nullptr ? *out_tape : local;
            Rng op_rng(seed ^ 0xabcdef);
            std::vector<Var> pool;
            for (std::size_t p = 0; p < n_params; ++p) pool.push_back(t.param("p" + std::to_string(p)));
            for (int step = 0; step < 8; ++step) {
                const Var a = pool[op_rng.uniform_index(pool.size())];
                const Var b = pool[op_rng.uniform_index(pool.size())];
                switch (op_rng.uniform_index(6)) {
                    case 0: pool.push_back(t.add(a, b)); break;
                    case 1: pool.push_back(t.hadamard(a, b)); break;
                    case 2: pool.push_back(t.scale(a, op_rng.uniform(-1.5, 1.5))); break;
                    case 3: pool.push_back(t.sigmoid(a)); break;
                    case 4: pool.push_back(t.tanh(a)); break;
                    default:
                        // matmul through a transpose-free pairing: a (r x c) times
                        // a constant (c x r) keeps shapes composable
                        pool.push_back(t.matmul(
                            a, t.constant(random_matrix(cols, cols, op_rng, 0.4))));
                        break;
                }
            }
            Var acc = t.sum_squares(pool.back());
            acc = t.add(acc, t.mean_squared_error(pool[pool.size() - 2], pool[0]));
            const double value = t.scalar_value(acc);
            if (out_tape != nullptr) t.backward(acc);
            return value;
        };

        Tape tape(store);
        build(store, &tape);
        const auto result =
            oracles::check_gradients(store, [&](ParamStore& s) { return build(s, nullptr); });
        CAPTURE(seed);
        CAPTURE(result.worst_param);
        CAPTURE(result.worst_rel);
        CHECK(result.ok);
    }
}

TEST_CASE("tape evaluation is deterministic") {
    Rng rng(42);
    ParamStore store;
    store.add("x", random_matrix(3, 4, rng));
    store.add("w1", random_matrix(4, 5, rng));
    store.add("b1", random_matrix(1, 5, rng), ParamKind::Bias);
    store.add("w2", random_matrix(5, 3, rng));
    store.add("w3", random_matrix(4, 2, rng));
    const Matrix target = random_matrix(3, 5, rng);
    const double first = full_primitive_loss(store, target);
    const double second = full_primitive_loss(store, target);
    CHECK(first == second);
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1.5, -2.0}}));
    store.zero_grads();
    AdamOptimizer adam;
    adam.step(store, 0.1);
    CHECK(store.value("w")(0, 0) == 1.5);
    CHECK(store.value("w")(0, 1) == -2.0);
}

TEST_CASE("adam steps downhill on w^2") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1.0}}));
    Tape tape(store);
    Var loss = tape.sum_squares(tape.param("w"));
    tape.backward(loss);
    AdamOptimizer adam;
    adam.step(store, 0.1);
    CHECK(store.value("w")(0, 0) < 1.0);
    CHECK(store.value("w")(0, 0) > 0.0);
}

TEST_CASE("adam converges on (w-2)^2 within 500 steps") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{0.0}}));
    AdamOptimizer adam;
    const Matrix target = Matrix::from_rows({{2.0}});
    for (int i = 0; i < 500; ++i) {
        Tape tape(store);
        Var diff = tape.add(tape.param("w"), tape.scale(tape.constant(target), -1.0));
        Var loss = tape.sum_squares(diff);
        tape.backward(loss);
        adam.step(store, 0.05);
    }
    CHECK(std::abs(store.value("w")(0, 0) - 2.0) < 0.01);
    CHECK(adam.steps_taken() == 500);
}

TEST_CASE("adam rejects non-positive learning rate") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1.0}}));
    AdamOptimizer adam;
    CHECK_THROWS_AS(adam.step(store, 0.0), ConfigError);
    CHECK_THROWS_AS(adam.step(store, -0.1), ConfigError);
}

TEST_CASE("row-vector bias broadcast in add") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix bias = Matrix::from_rows({{10, 20}});
    const Matrix out = add(a, bias);
    CHECK(out(0, 0) == 11.0);
    CHECK(out(1, 1) == 24.0);
    CHECK_THROWS_AS(add(a, Matrix(3, 3)), DimensionError);
}

TEST_SUITE_END();
