#pragma once

#include <functional>
#include <vector>

#include "shiftcast/tensor.hpp"

namespace shiftcast::nn {

class Tape;

/// Handle to a node on a tape. Only valid for the tape that created it.
struct Var {
    int idx = -1;
    bool valid() const { return idx >= 0; }
};

/// Reverse-mode tape over a fixed op set. Forward calls append nodes;
/// backward() walks the nodes in reverse and accumulates gradients.
///
/// Every op validates shapes and checks its output for NaN/Inf. Stochastic
/// ops take their noise as an explicit tensor so a draw is recorded once and
/// the node stays a deterministic function of its inputs.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf without gradient.
    Var constant(Tensor2 value);
    /// Leaf with gradient (parameters and shared upstream activations).
    Var input(Tensor2 value);

    const Tensor2& val(Var v) const;
    /// Gradient accumulated by backward(); zeros if the node was unreached.
    const Tensor2& grad(Var v);

    // structural
    Var transpose(Var a);
    Var matmul(Var a, Var b);
    Var add_rowvec(Var a, Var b);  // b is 1 x cols, broadcast over rows
    Var affine(Var x, Var w, Var b) { return add_rowvec(matmul(x, w), b); }

    // elementwise, same shape
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);

    // elementwise unary
    Var scale(Var a, double c);
    Var add_scalar(Var a, double c);
    Var relu(Var a);
    Var leaky_relu(Var a, double slope = 0.01);
    Var sigmoid(Var a);
    /// log(1 + e^x) + floor, numerically stable; strictly positive output.
    Var softplus_floor(Var a, double floor = 1e-6);
    Var log(Var a);
    Var sqrt(Var a);
    Var square(Var a);
    Var clamp(Var a, double lo, double hi);

    Var softmax_rows(Var a);

    // reductions
    Var mean_all(Var a);  // 1x1
    Var mse(Var a, Var b) { return mean_all(square(sub(a, b))); }

    // stochastic reparameterizations
    /// z = mu + sqrt(var) * eps, elementwise. Gradient flows to mu and var.
    Var gauss_sample(Var mu, Var var, const Tensor2& eps);
    /// a = sigmoid((logit(clamp(w)) + gdiff) / tau), gdiff = g1 - g2.
    Var gumbel_sigmoid(Var w, double tau, const Tensor2& gdiff);

    /// Seed a cotangent on any node before backward_seeded().
    void seed_grad(Var v, const Tensor2& cotangent);
    /// Backward from a scalar root (seeds d root = 1).
    void backward(Var root);
    /// Backward using whatever seeds were planted with seed_grad().
    void backward_seeded();

    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor2 val;
        Tensor2 grad;  // sized lazily on first accumulation
        bool needs_grad = false;
        std::function<void(Tape&, const Node&)> back;  // empty for leaves
    };

    Var push(Tensor2 value, bool needs_grad, std::function<void(Tape&, const Node&)> back);
    void accum(int idx, const Tensor2& g);
    void accum_scaled(int idx, const Tensor2& g, double scale);
    bool any_needs_grad(Var a) const { return nodes_[a.idx].needs_grad; }
    void check_finite(const Tensor2& t, const char* op) const;

    std::vector<Node> nodes_;
    static const Tensor2 empty_;

    friend struct TapeOps;
};

}  // namespace shiftcast::nn
