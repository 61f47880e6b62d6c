#include "shiftcast/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shiftcast/errors.hpp"

namespace shiftcast::nn {

Tensor2::Tensor2(int r, int c, std::vector<double> data) : rows(r), cols(c), v(std::move(data)) {
    if (v.size() != static_cast<size_t>(r) * c)
        fail(ErrorCode::ShapeMismatch, "tensor data length does not match " + shape_str());
}

Tensor2 Tensor2::full(int r, int c, double value) {
    Tensor2 t(r, c);
    t.fill(value);
    return t;
}

Tensor2 Tensor2::identity(int n) {
    Tensor2 t(n, n);
    for (int i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

Tensor2 Tensor2::row(std::span<const double> values) {
    Tensor2 t(1, static_cast<int>(values.size()));
    std::copy(values.begin(), values.end(), t.v.begin());
    return t;
}

bool Tensor2::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void Tensor2::fill(double value) { std::fill(v.begin(), v.end(), value); }

void Tensor2::add_scaled(const Tensor2& o, double scale) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += scale * o.v[i];
}

std::string Tensor2::shape_str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%dx%d", rows, cols);
    return buf;
}

double max_abs_diff(const Tensor2& a, const Tensor2& b) {
    if (!a.same_shape(b))
        fail(ErrorCode::ShapeMismatch, "max_abs_diff " + a.shape_str() + " vs " + b.shape_str());
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace shiftcast::nn
