#include "shiftcast/gradcheck.hpp"

#include <cmath>

#include "shiftcast/errors.hpp"

namespace shiftcast::nn {

namespace {

double eval_value(const ScalarFn& f, const Tensor2& point) {
    Tape tape;
    Var x = tape.constant(point);
    Var y = f(tape, x);
    const Tensor2& out = tape.val(y);
    if (out.rows != 1 || out.cols != 1)
        fail(ErrorCode::ShapeMismatch, "grad_check function must be scalar-valued");
    return out(0, 0);
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, const Tensor2& point, double eps) {
    Tape tape;
    Var x = tape.input(point);
    Var y = f(tape, x);
    tape.backward(y);
    Tensor2 analytic = tape.grad(x);
    if (!analytic.all_finite())
        fail(ErrorCode::NonFiniteGradient, "analytic gradient is not finite");

    GradCheckReport report;
    Tensor2 probe = point;
    for (size_t i = 0; i < probe.v.size(); ++i) {
        double saved = probe.v[i];
        probe.v[i] = saved + eps;
        double fp = eval_value(f, probe);
        probe.v[i] = saved - eps;
        double fm = eval_value(f, probe);
        probe.v[i] = saved;
        double numeric = (fp - fm) / (2.0 * eps);
        double denom = std::max({std::fabs(analytic.v[i]), std::fabs(numeric), 1e-8});
        double rel = std::fabs(analytic.v[i] - numeric) / denom;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_index = static_cast<int>(i);
            report.analytic_at_worst = analytic.v[i];
            report.numeric_at_worst = numeric;
        }
    }
    return report;
}

}  // namespace shiftcast::nn
