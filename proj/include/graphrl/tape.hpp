#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graphrl/matrix.hpp"
#include "graphrl/optim.hpp"

namespace graphrl {

class Tape;

/// Handle to a node on a tape. Cheap to copy; only valid for the tape that
/// created it and until that tape is reset.
struct Var {
    std::int32_t id = -1;
    Tape* tape = nullptr;
};

/// Reverse-mode autodiff over a fixed primitive set: matmul, add (with
/// row-vector bias broadcast), hadamard, scalar scale, column concat,
/// sigmoid/tanh/relu, mean squared error and sum of squares. Evaluation is
/// eager; backward() walks the records in reverse and writes parameter
/// gradients into the bound ParamStore.
///
/// A tape is single-threaded. It snapshots parameter values at the moment
/// param() is called, so it must be rebuilt after an optimizer step.
class Tape {
public:
    Tape() = default;
    explicit Tape(ParamStore& params) : store_(&params) {}

    Var constant(Matrix value);
    /// Leaf bound to a named parameter of the attached store; memoized so a
    /// parameter used twice contributes one node (and accumulates gradients).
    Var param(const std::string& name);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var hadamard(Var a, Var b);
    Var scale(Var a, double factor);
    Var concat_cols(Var a, Var b);
    Var activation(Var a, Activation kind);
    Var sigmoid(Var a) { return activation(a, Activation::Sigmoid); }
    Var tanh(Var a) { return activation(a, Activation::Tanh); }
    Var relu(Var a) { return activation(a, Activation::Relu); }
    Var mean_squared_error(Var pred, Var target);
    Var sum_squares(Var a);

    const Matrix& value(Var v) const;
    double scalar_value(Var v) const;

    /// Reverse pass from a 1x1 loss node. Zeroes the store's gradients first,
    /// then accumulates; parameters the loss does not reach keep zero grads.
    void backward(Var loss);

    /// Gradient of the last backward() pass with respect to a node (testing aid).
    const Matrix& grad_of(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }
    ParamStore* params() const { return store_; }

    /// Drops all nodes; existing Vars become invalid. Keeps the store binding.
    void reset();

private:
    enum class Op : std::uint8_t {
        Constant,
        Param,
        MatMul,
        Add,
        Hadamard,
        Scale,
        ConcatCols,
        Sigmoid,
        Tanh,
        Relu,
        Mse,
        SumSquares,
    };

    struct Node {
        Op op = Op::Constant;
        std::int32_t a = -1;
        std::int32_t b = -1;
        double factor = 0.0;       // for Scale
        std::size_t split = 0;     // for ConcatCols: column count of input a
        Matrix value;
        Matrix grad;
        std::string param_name;    // for Param
    };

    Var push(Node node);
    const Node& node(Var v) const;
    void check_owns(Var v) const;
    Matrix& grad_slot(std::int32_t id);

    std::vector<Node> nodes_;
    std::map<std::string, std::int32_t> param_nodes_;
    ParamStore* store_ = nullptr;
};

} // namespace graphrl
