#pragma once

#include <functional>

#include "shiftcast/tape.hpp"
#include "shiftcast/tensor.hpp"

namespace shiftcast::nn {

/// Builds a scalar node from one input leaf. Called repeatedly on fresh
/// tapes, so it must be a pure function of the leaf value.
using ScalarFn = std::function<Var(Tape&, Var)>;

struct GradCheckReport {
    double max_rel_err = 0.0;
    int worst_index = -1;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

/// Compares the reverse-mode gradient of f at `point` against central finite
/// differences, coordinate by coordinate. Relative error uses a 1e-8 absolute
/// floor. Throws NonFiniteGradient if the analytic gradient is not finite.
GradCheckReport grad_check(const ScalarFn& f, const Tensor2& point, double eps = 1e-4);

}  // namespace shiftcast::nn
