#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shiftcast::nn {

/// Dense row-major matrix of doubles. The single value type flowing through
/// the tape; vectors are represented as 1xq rows.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
    Tensor2(int r, int c, std::vector<double> data);

    static Tensor2 full(int r, int c, double value);
    static Tensor2 identity(int n);
    static Tensor2 row(std::span<const double> values);

    double& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;

    void fill(double value);
    void add_scaled(const Tensor2& o, double scale);  // *this += scale * o

    std::string shape_str() const;
};

double max_abs_diff(const Tensor2& a, const Tensor2& b);

}  // namespace shiftcast::nn
