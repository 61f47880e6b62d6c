#include "shiftcast/tape.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "shiftcast/errors.hpp"

namespace shiftcast::nn {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

CMap emap(const Tensor2& t) { return CMap(t.v.data(), t.rows, t.cols); }
Map emap(Tensor2& t) { return Map(t.v.data(), t.rows, t.cols); }

void require_same_shape(const Tensor2& a, const Tensor2& b, const char* op) {
    if (!a.same_shape(b))
        fail(ErrorCode::ShapeMismatch,
             std::string(op) + ": " + a.shape_str() + " vs " + b.shape_str());
}

constexpr double kGumbelLo = 1e-6;
constexpr double kGumbelHi = 1.0 - 1e-6;

}  // namespace

const Tensor2 Tape::empty_{};

Var Tape::push(Tensor2 value, bool needs_grad, std::function<void(Tape&, const Node&)> back) {
    Node n;
    n.val = std::move(value);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check_finite(const Tensor2& t, const char* op) const {
    if (!t.all_finite())
        fail(ErrorCode::NonFiniteValue, std::string(op) + " produced a non-finite value");
}

Var Tape::constant(Tensor2 value) {
    check_finite(value, "constant");
    return push(std::move(value), false, {});
}

Var Tape::input(Tensor2 value) {
    check_finite(value, "input");
    return push(std::move(value), true, {});
}

const Tensor2& Tape::val(Var v) const { return nodes_[v.idx].val; }

const Tensor2& Tape::grad(Var v) {
    Node& n = nodes_[v.idx];
    if (n.grad.v.empty()) n.grad = Tensor2(n.val.rows, n.val.cols);  // unreached: zeros
    return n.grad;
}

void Tape::accum(int idx, const Tensor2& g) {
    Node& n = nodes_[idx];
    if (!n.needs_grad) return;
    if (n.grad.v.empty()) n.grad = Tensor2(n.val.rows, n.val.cols);
    for (size_t i = 0; i < g.v.size(); ++i) n.grad.v[i] += g.v[i];
}

void Tape::accum_scaled(int idx, const Tensor2& g, double scale) {
    Node& n = nodes_[idx];
    if (!n.needs_grad) return;
    if (n.grad.v.empty()) n.grad = Tensor2(n.val.rows, n.val.cols);
    n.grad.add_scaled(g, scale);
}

Var Tape::transpose(Var a) {
    const Tensor2& x = nodes_[a.idx].val;
    Tensor2 y(x.cols, x.rows);
    emap(y) = emap(x).transpose();
    int ai = a.idx;
    return push(std::move(y), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        Node& parent = t.nodes_[ai];
        if (!parent.needs_grad) return;
        if (parent.grad.v.empty()) parent.grad = Tensor2(parent.val.rows, parent.val.cols);
        emap(parent.grad) += emap(self.grad).transpose();
    });
}

Var Tape::matmul(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& w = nodes_[b.idx].val;
    if (x.cols != w.rows)
        fail(ErrorCode::ShapeMismatch, "matmul: " + x.shape_str() + " * " + w.shape_str());
    Tensor2 y(x.rows, w.cols);
    emap(y).noalias() = emap(x) * emap(w);
    check_finite(y, "matmul");
    int ai = a.idx, bi = b.idx;
    return push(std::move(y), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    const Tensor2& xv = t.nodes_[ai].val;
                    const Tensor2& wv = t.nodes_[bi].val;
                    Node& na = t.nodes_[ai];
                    Node& nb = t.nodes_[bi];
                    if (na.needs_grad) {
                        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
                        emap(na.grad).noalias() += emap(self.grad) * emap(wv).transpose();
                    }
                    if (nb.needs_grad) {
                        if (nb.grad.v.empty()) nb.grad = Tensor2(wv.rows, wv.cols);
                        emap(nb.grad).noalias() += emap(xv).transpose() * emap(self.grad);
                    }
                });
}

Var Tape::add_rowvec(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& r = nodes_[b.idx].val;
    if (r.rows != 1 || r.cols != x.cols)
        fail(ErrorCode::ShapeMismatch,
             "add_rowvec: " + x.shape_str() + " + " + r.shape_str());
    Tensor2 y = x;
    for (int i = 0; i < y.rows; ++i)
        for (int j = 0; j < y.cols; ++j) y(i, j) += r(0, j);
    check_finite(y, "add_rowvec");
    int ai = a.idx, bi = b.idx;
    return push(std::move(y), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    t.accum(ai, self.grad);
                    Node& nb = t.nodes_[bi];
                    if (!nb.needs_grad) return;
                    if (nb.grad.v.empty()) nb.grad = Tensor2(1, self.grad.cols);
                    for (int i = 0; i < self.grad.rows; ++i)
                        for (int j = 0; j < self.grad.cols; ++j)
                            nb.grad(0, j) += self.grad(i, j);
                });
}

Var Tape::add(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& yv = nodes_[b.idx].val;
    require_same_shape(x, yv, "add");
    Tensor2 out = x;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += yv.v[i];
    check_finite(out, "add");
    int ai = a.idx, bi = b.idx;
    return push(std::move(out), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    t.accum(ai, self.grad);
                    t.accum(bi, self.grad);
                });
}

Var Tape::sub(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& yv = nodes_[b.idx].val;
    require_same_shape(x, yv, "sub");
    Tensor2 out = x;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= yv.v[i];
    check_finite(out, "sub");
    int ai = a.idx, bi = b.idx;
    return push(std::move(out), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    t.accum(ai, self.grad);
                    t.accum_scaled(bi, self.grad, -1.0);
                });
}

Var Tape::mul(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& yv = nodes_[b.idx].val;
    require_same_shape(x, yv, "mul");
    Tensor2 out = x;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= yv.v[i];
    check_finite(out, "mul");
    int ai = a.idx, bi = b.idx;
    return push(std::move(out), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    const Tensor2& xv = t.nodes_[ai].val;
                    const Tensor2& bv = t.nodes_[bi].val;
                    Node& na = t.nodes_[ai];
                    if (na.needs_grad) {
                        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
                        for (size_t i = 0; i < xv.v.size(); ++i)
                            na.grad.v[i] += self.grad.v[i] * bv.v[i];
                    }
                    Node& nb = t.nodes_[bi];
                    if (nb.needs_grad) {
                        if (nb.grad.v.empty()) nb.grad = Tensor2(bv.rows, bv.cols);
                        for (size_t i = 0; i < bv.v.size(); ++i)
                            nb.grad.v[i] += self.grad.v[i] * xv.v[i];
                    }
                });
}

Var Tape::div(Var a, Var b) {
    const Tensor2& x = nodes_[a.idx].val;
    const Tensor2& yv = nodes_[b.idx].val;
    require_same_shape(x, yv, "div");
    Tensor2 out = x;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] /= yv.v[i];
    check_finite(out, "div");
    int ai = a.idx, bi = b.idx;
    return push(std::move(out), any_needs_grad(a) || any_needs_grad(b),
                [ai, bi](Tape& t, const Node& self) {
                    const Tensor2& xv = t.nodes_[ai].val;
                    const Tensor2& bv = t.nodes_[bi].val;
                    Node& na = t.nodes_[ai];
                    if (na.needs_grad) {
                        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
                        for (size_t i = 0; i < xv.v.size(); ++i)
                            na.grad.v[i] += self.grad.v[i] / bv.v[i];
                    }
                    Node& nb = t.nodes_[bi];
                    if (nb.needs_grad) {
                        if (nb.grad.v.empty()) nb.grad = Tensor2(bv.rows, bv.cols);
                        for (size_t i = 0; i < bv.v.size(); ++i)
                            nb.grad.v[i] -= self.grad.v[i] * xv.v[i] / (bv.v[i] * bv.v[i]);
                    }
                });
}

Var Tape::scale(Var a, double c) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x *= c;
    check_finite(out, "scale");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai, c](Tape& t, const Node& self) {
        t.accum_scaled(ai, self.grad, c);
    });
}

Var Tape::add_scalar(Var a, double c) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x += c;
    check_finite(out, "add_scalar");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a),
                [ai](Tape& t, const Node& self) { t.accum(ai, self.grad); });
}

Var Tape::relu(Var a) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = x > 0.0 ? x : 0.0;
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i)
            if (xv.v[i] > 0.0) na.grad.v[i] += self.grad.v[i];
    });
}

Var Tape::leaky_relu(Var a, double slope) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = x > 0.0 ? x : slope * x;
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai, slope](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i)
            na.grad.v[i] += self.grad.v[i] * (xv.v[i] > 0.0 ? 1.0 : slope);
    });
}

Var Tape::sigmoid(Var a) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
    check_finite(out, "sigmoid");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(self.val.rows, self.val.cols);
        for (size_t i = 0; i < self.val.v.size(); ++i) {
            double y = self.val.v[i];
            na.grad.v[i] += self.grad.v[i] * y * (1.0 - y);
        }
    });
}

Var Tape::softplus_floor(Var a, double floor) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) {
        double sp = x > 30.0 ? x : std::log1p(std::exp(x));
        x = sp + floor;
    }
    check_finite(out, "softplus");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i)
            na.grad.v[i] += self.grad.v[i] / (1.0 + std::exp(-xv.v[i]));
    });
}

Var Tape::log(Var a) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = std::log(x);
    check_finite(out, "log");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i) na.grad.v[i] += self.grad.v[i] / xv.v[i];
    });
}

Var Tape::sqrt(Var a) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = std::sqrt(x);
    check_finite(out, "sqrt");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(self.val.rows, self.val.cols);
        for (size_t i = 0; i < self.val.v.size(); ++i) {
            double y = self.val.v[i];
            if (y > 0.0) na.grad.v[i] += self.grad.v[i] / (2.0 * y);
            // subgradient 0 at y == 0 (reached only by exact-zero variance hooks)
        }
    });
}

Var Tape::square(Var a) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = x * x;
    check_finite(out, "square");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i)
            na.grad.v[i] += self.grad.v[i] * 2.0 * xv.v[i];
    });
}

Var Tape::clamp(Var a, double lo, double hi) {
    Tensor2 out = nodes_[a.idx].val;
    for (double& x : out.v) x = x < lo ? lo : (x > hi ? hi : x);
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai, lo, hi](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        for (size_t i = 0; i < xv.v.size(); ++i)
            if (xv.v[i] > lo && xv.v[i] < hi) na.grad.v[i] += self.grad.v[i];
    });
}

Var Tape::softmax_rows(Var a) {
    const Tensor2& x = nodes_[a.idx].val;
    Tensor2 out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        double mx = x(i, 0);
        for (int j = 1; j < x.cols; ++j) mx = std::max(mx, x(i, j));
        double sum = 0.0;
        for (int j = 0; j < x.cols; ++j) {
            out(i, j) = std::exp(x(i, j) - mx);
            sum += out(i, j);
        }
        for (int j = 0; j < x.cols; ++j) out(i, j) /= sum;
    }
    check_finite(out, "softmax_rows");
    int ai = a.idx;
    return push(std::move(out), any_needs_grad(a), [ai](Tape& t, const Node& self) {
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(self.val.rows, self.val.cols);
        for (int i = 0; i < self.val.rows; ++i) {
            double dot = 0.0;
            for (int j = 0; j < self.val.cols; ++j)
                dot += self.grad(i, j) * self.val(i, j);
            for (int j = 0; j < self.val.cols; ++j)
                na.grad(i, j) += self.val(i, j) * (self.grad(i, j) - dot);
        }
    });
}

Var Tape::mean_all(Var a) {
    const Tensor2& x = nodes_[a.idx].val;
    double sum = 0.0;
    for (double v : x.v) sum += v;
    Tensor2 out(1, 1);
    out(0, 0) = sum / static_cast<double>(x.size());
    check_finite(out, "mean_all");
    int ai = a.idx;
    double inv = 1.0 / static_cast<double>(x.size());
    return push(std::move(out), any_needs_grad(a), [ai, inv](Tape& t, const Node& self) {
        const Tensor2& xv = t.nodes_[ai].val;
        Node& na = t.nodes_[ai];
        if (!na.needs_grad) return;
        if (na.grad.v.empty()) na.grad = Tensor2(xv.rows, xv.cols);
        double g = self.grad(0, 0) * inv;
        for (double& gi : na.grad.v) gi += g;
    });
}

Var Tape::gauss_sample(Var mu, Var var, const Tensor2& eps) {
    const Tensor2& m = nodes_[mu.idx].val;
    const Tensor2& s2 = nodes_[var.idx].val;
    require_same_shape(m, s2, "gauss_sample");
    require_same_shape(m, eps, "gauss_sample(eps)");
    for (double x : s2.v)
        if (x < 0.0) fail(ErrorCode::NegativeVariance, "gauss_sample variance < 0");
    Tensor2 out = m;
    Tensor2 noise = eps;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += std::sqrt(s2.v[i]) * noise.v[i];
    check_finite(out, "gauss_sample");
    int mi = mu.idx, vi = var.idx;
    return push(std::move(out), any_needs_grad(mu) || any_needs_grad(var),
                [mi, vi, noise](Tape& t, const Node& self) {
                    t.accum(mi, self.grad);
                    const Tensor2& s2v = t.nodes_[vi].val;
                    Node& nv = t.nodes_[vi];
                    if (!nv.needs_grad) return;
                    if (nv.grad.v.empty()) nv.grad = Tensor2(s2v.rows, s2v.cols);
                    for (size_t i = 0; i < s2v.v.size(); ++i) {
                        double sd = std::sqrt(s2v.v[i]);
                        if (sd > 0.0)
                            nv.grad.v[i] += self.grad.v[i] * noise.v[i] / (2.0 * sd);
                    }
                });
}

Var Tape::gumbel_sigmoid(Var w, double tau, const Tensor2& gdiff) {
    const Tensor2& wv = nodes_[w.idx].val;
    require_same_shape(wv, gdiff, "gumbel_sigmoid");
    Tensor2 out(wv.rows, wv.cols);
    Tensor2 noise = gdiff;
    for (size_t i = 0; i < wv.v.size(); ++i) {
        double wc = std::min(std::max(wv.v[i], kGumbelLo), kGumbelHi);
        double logit = std::log(wc / (1.0 - wc));
        out.v[i] = 1.0 / (1.0 + std::exp(-(logit + noise.v[i]) / tau));
    }
    check_finite(out, "gumbel_sigmoid");
    int wi = w.idx;
    return push(std::move(out), any_needs_grad(w),
                [wi, tau](Tape& t, const Node& self) {
                    const Tensor2& wvv = t.nodes_[wi].val;
                    Node& nw = t.nodes_[wi];
                    if (!nw.needs_grad) return;
                    if (nw.grad.v.empty()) nw.grad = Tensor2(wvv.rows, wvv.cols);
                    for (size_t i = 0; i < wvv.v.size(); ++i) {
                        double wc = wvv.v[i];
                        if (wc <= kGumbelLo || wc >= kGumbelHi) continue;  // clamped: zero grad
                        double a = self.val.v[i];
                        nw.grad.v[i] += self.grad.v[i] * a * (1.0 - a) / (tau * wc * (1.0 - wc));
                    }
                });
}

void Tape::seed_grad(Var v, const Tensor2& cotangent) {
    Node& n = nodes_[v.idx];
    require_same_shape(n.val, cotangent, "seed_grad");
    if (n.grad.v.empty()) n.grad = Tensor2(n.val.rows, n.val.cols);
    for (size_t i = 0; i < cotangent.v.size(); ++i) n.grad.v[i] += cotangent.v[i];
}

void Tape::backward(Var root) {
    const Node& r = nodes_[root.idx];
    if (r.val.rows != 1 || r.val.cols != 1)
        fail(ErrorCode::ShapeMismatch, "backward root must be 1x1, got " + r.val.shape_str());
    Tensor2 one(1, 1);
    one(0, 0) = 1.0;
    seed_grad(root, one);
    backward_seeded();
}

void Tape::backward_seeded() {
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        Node& n = nodes_[i];
        if (!n.back || n.grad.v.empty()) continue;
        n.back(*this, n);
    }
}

}  // namespace shiftcast::nn
