#include "graphrl/tape.hpp"

#include <cmath>

#include "graphrl/errors.hpp"

namespace graphrl {

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1), this};
}

const Tape::Node& Tape::node(Var v) const {
    check_owns(v);
    return nodes_[static_cast<std::size_t>(v.id)];
}

void Tape::check_owns(Var v) const {
    if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
        throw ContractError("variable does not belong to this tape");
    }
}

Var Tape::constant(Matrix value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::param(const std::string& name) {
    if (store_ == nullptr) {
        throw ContractError("tape has no parameter store attached");
    }
    const auto it = param_nodes_.find(name);
    if (it != param_nodes_.end()) {
        return Var{it->second, this};
    }
    Node n;
    n.op = Op::Param;
    n.value = store_->value(name);
    n.param_name = name;
    const Var v = push(std::move(n));
    param_nodes_.emplace(name, v.id);
    return v;
}

Var Tape::matmul(Var a, Var b) {
    check_owns(a);
    check_owns(b);
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.value = graphrl::matmul(node(a).value, node(b).value);
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    check_owns(a);
    check_owns(b);
    Node n;
    n.op = Op::Add;
    n.a = a.id;
    n.b = b.id;
    n.value = graphrl::add(node(a).value, node(b).value);
    return push(std::move(n));
}

Var Tape::hadamard(Var a, Var b) {
    check_owns(a);
    check_owns(b);
    Node n;
    n.op = Op::Hadamard;
    n.a = a.id;
    n.b = b.id;
    n.value = graphrl::hadamard(node(a).value, node(b).value);
    return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
    check_owns(a);
    Node n;
    n.op = Op::Scale;
    n.a = a.id;
    n.factor = factor;
    n.value = graphrl::scale(node(a).value, factor);
    return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
    check_owns(a);
    check_owns(b);
    Node n;
    n.op = Op::ConcatCols;
    n.a = a.id;
    n.b = b.id;
    n.split = node(a).value.cols();
    n.value = graphrl::concat_cols(node(a).value, node(b).value);
    return push(std::move(n));
}

Var Tape::activation(Var a, Activation kind) {
    check_owns(a);
    Node n;
    switch (kind) {
        case Activation::Sigmoid: n.op = Op::Sigmoid; break;
        case Activation::Tanh: n.op = Op::Tanh; break;
        case Activation::Relu: n.op = Op::Relu; break;
    }
    n.a = a.id;
    n.value = graphrl::activation(node(a).value, kind);
    return push(std::move(n));
}

Var Tape::mean_squared_error(Var pred, Var target) {
    check_owns(pred);
    check_owns(target);
    Node n;
    n.op = Op::Mse;
    n.a = pred.id;
    n.b = target.id;
    n.value = Matrix(1, 1, {graphrl::mean_squared_error(node(pred).value, node(target).value)});
    return push(std::move(n));
}

Var Tape::sum_squares(Var a) {
    check_owns(a);
    Node n;
    n.op = Op::SumSquares;
    n.a = a.id;
    n.value = Matrix(1, 1, {graphrl::sum_squares(node(a).value)});
    return push(std::move(n));
}

const Matrix& Tape::value(Var v) const {
    return node(v).value;
}

double Tape::scalar_value(Var v) const {
    const Matrix& m = node(v).value;
    if (m.rows() != 1 || m.cols() != 1) {
        throw ContractError("expected a 1x1 node, got " + m.shape_str());
    }
    return m(0, 0);
}

const Matrix& Tape::grad_of(Var v) const {
    return node(v).grad;
}

Matrix& Tape::grad_slot(std::int32_t id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty()) {
        n.grad = Matrix::zeros(n.value.rows(), n.value.cols());
    }
    return n.grad;
}

void Tape::backward(Var loss) {
    check_owns(loss);
    const Node& loss_node = nodes_[static_cast<std::size_t>(loss.id)];
    if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
        throw ContractError("backward requires a scalar (1x1) loss node, got " +
                            loss_node.value.shape_str());
    }
    // Explicit zeroing so stale gradients from a previous pass can't leak in.
    if (store_ != nullptr) store_->zero_grads();
    for (auto& n : nodes_) n.grad = Matrix();
    grad_slot(loss.id)(0, 0) = 1.0;

    for (std::int32_t id = loss.id; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad.empty()) continue; // not reachable from the loss
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Constant:
                break;
            case Op::Param:
                if (store_ != nullptr) {
                    Matrix& pg = store_->grad(n.param_name);
                    for (std::size_t i = 0; i < pg.size(); ++i) pg.data()[i] += g.data()[i];
                }
                break;
            case Op::MatMul: {
                const Matrix& av = nodes_[n.a].value;
                const Matrix& bv = nodes_[n.b].value;
                Matrix& ga = grad_slot(n.a);
                const Matrix da = matmul_transpose_b(g, bv);
                for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += da.data()[i];
                Matrix& gb = grad_slot(n.b);
                const Matrix db = matmul_transpose_a(av, g);
                for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += db.data()[i];
                break;
            }
            case Op::Add: {
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g.data()[i];
                Matrix& gb = grad_slot(n.b);
                if (gb.same_shape(g)) {
                    for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += g.data()[i];
                } else {
                    // Broadcast bias row: gradient is the column sum.
                    const Matrix cs = column_sums(g);
                    for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += cs.data()[i];
                }
                break;
            }
            case Op::Hadamard: {
                const Matrix& av = nodes_[n.a].value;
                const Matrix& bv = nodes_[n.b].value;
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i)
                    ga.data()[i] += g.data()[i] * bv.data()[i];
                Matrix& gb = grad_slot(n.b);
                for (std::size_t i = 0; i < gb.size(); ++i)
                    gb.data()[i] += g.data()[i] * av.data()[i];
                break;
            }
            case Op::Scale: {
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i)
                    ga.data()[i] += n.factor * g.data()[i];
                break;
            }
            case Op::ConcatCols: {
                Matrix& ga = grad_slot(n.a);
                Matrix& gb = grad_slot(n.b);
                const std::size_t ca = n.split;
                const std::size_t cb = gb.cols();
                for (std::size_t i = 0; i < g.rows(); ++i) {
                    for (std::size_t j = 0; j < ca; ++j) ga(i, j) += g(i, j);
                    for (std::size_t j = 0; j < cb; ++j) gb(i, j) += g(i, ca + j);
                }
                break;
            }
            case Op::Sigmoid: {
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) {
                    const double y = n.value.data()[i];
                    ga.data()[i] += g.data()[i] * y * (1.0 - y);
                }
                break;
            }
            case Op::Tanh: {
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) {
                    const double y = n.value.data()[i];
                    ga.data()[i] += g.data()[i] * (1.0 - y * y);
                }
                break;
            }
            case Op::Relu: {
                const Matrix& xv = nodes_[n.a].value;
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) {
                    if (xv.data()[i] > 0.0) ga.data()[i] += g.data()[i];
                }
                break;
            }
            case Op::Mse: {
                const Matrix& av = nodes_[n.a].value;
                const Matrix& bv = nodes_[n.b].value;
                const double coef = 2.0 * g(0, 0) / static_cast<double>(av.size());
                Matrix& ga = grad_slot(n.a);
                Matrix& gb = grad_slot(n.b);
                for (std::size_t i = 0; i < av.size(); ++i) {
                    const double d = coef * (av.data()[i] - bv.data()[i]);
                    ga.data()[i] += d;
                    gb.data()[i] -= d;
                }
                break;
            }
            case Op::SumSquares: {
                const Matrix& av = nodes_[n.a].value;
                const double g0 = g(0, 0);
                Matrix& ga = grad_slot(n.a);
                for (std::size_t i = 0; i < av.size(); ++i) {
                    ga.data()[i] += 2.0 * g0 * av.data()[i];
                }
                break;
            }
        }
    }
}

void Tape::reset() {
    nodes_.clear();
    param_nodes_.clear();
}

} // namespace graphrl
