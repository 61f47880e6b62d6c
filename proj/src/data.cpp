#include "shiftcast/data.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "shiftcast/errors.hpp"

namespace shiftcast::data {

namespace {

constexpr double kStdFloor = 1e-8;

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& field, double& out) {
    std::string t = trim(field);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

RawSeries slice_steps(const RawSeries& raw, int start, int count) {
    RawSeries out;
    out.variable_names = raw.variable_names;
    out.interval = raw.interval;
    out.values = nn::Tensor2(raw.n_vars(), count);
    for (int i = 0; i < raw.n_vars(); ++i)
        for (int t = 0; t < count; ++t) out.values(i, t) = raw.values(i, start + t);
    return out;
}

}  // namespace

void SplitSpec::validate() const {
    if (train_frac <= 0 || val_frac <= 0 || test_frac <= 0)
        fail(ErrorCode::InvalidArgument, "split fractions must be positive");
    if (std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        fail(ErrorCode::InvalidArgument, "split fractions must sum to 1");
}

RawSeries load_csv(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::EmptyFile, "cannot open " + path);

    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;  // one vector per time step
    std::string line;
    int line_no = 0;
    size_t n_cols = 0;
    bool expect_header = header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (expect_header) {
            for (const std::string& f : fields) names.push_back(trim(f));
            n_cols = fields.size();
            expect_header = false;
            continue;
        }
        if (n_cols == 0) n_cols = fields.size();
        if (fields.size() != n_cols)
            fail(ErrorCode::RaggedRows,
                 "row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                     " columns, expected " + std::to_string(n_cols));
        std::vector<double> row(fields.size());
        for (size_t c = 0; c < fields.size(); ++c) {
            if (!parse_double(fields[c], row[c]))
                fail(ErrorCode::NonNumericCell,
                     "cell at row " + std::to_string(line_no) + ", column " +
                         std::to_string(c + 1) + ": '" + trim(fields[c]) + "'");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorCode::EmptyFile, path + " has no data rows");

    int n_vars = static_cast<int>(n_cols);
    int n_steps = static_cast<int>(rows.size());
    RawSeries out;
    out.values = nn::Tensor2(n_vars, n_steps);
    for (int t = 0; t < n_steps; ++t)
        for (int i = 0; i < n_vars; ++i) out.values(i, t) = rows[t][i];
    if (names.empty())
        for (int i = 0; i < n_vars; ++i) names.push_back("var" + std::to_string(i));
    out.variable_names = std::move(names);
    if (!out.values.all_finite())
        fail(ErrorCode::NonNumericCell, path + " contains non-finite values");
    return out;
}

void save_csv(const RawSeries& series, const std::string& path, bool header) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out.precision(17);
    if (header) {
        for (int i = 0; i < series.n_vars(); ++i) {
            if (i) out << ',';
            out << (i < static_cast<int>(series.variable_names.size())
                        ? series.variable_names[i]
                        : "var" + std::to_string(i));
        }
        out << '\n';
    }
    for (int t = 0; t < series.n_steps(); ++t) {
        for (int i = 0; i < series.n_vars(); ++i) {
            if (i) out << ',';
            out << series.values(i, t);
        }
        out << '\n';
    }
}

SplitResult split(const RawSeries& raw, const SplitSpec& spec) {
    spec.validate();
    int total = raw.n_steps();
    int n_train = static_cast<int>(std::floor(total * spec.train_frac));
    int n_val = static_cast<int>(std::floor(total * spec.val_frac));
    int n_test = total - n_train - n_val;
    SplitResult out;
    out.train = slice_steps(raw, 0, n_train);
    out.val = slice_steps(raw, n_train, n_val);
    out.test = slice_steps(raw, n_train + n_val, n_test);
    return out;
}

NormStats zscore_fit(const RawSeries& train) {
    int n = train.n_vars();
    int steps = train.n_steps();
    NormStats stats;
    stats.mean.resize(n);
    stats.std.resize(n);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int t = 0; t < steps; ++t) sum += train.values(i, t);
        double mean = sum / steps;
        double sq = 0.0;
        for (int t = 0; t < steps; ++t) {
            double d = train.values(i, t) - mean;
            sq += d * d;
        }
        double sd = std::sqrt(sq / steps);  // population formula
        stats.mean[i] = mean;
        stats.std[i] = sd > kStdFloor ? sd : kStdFloor;
    }
    return stats;
}

RawSeries zscore_apply(const RawSeries& series, const NormStats& stats) {
    if (static_cast<int>(stats.mean.size()) != series.n_vars())
        fail(ErrorCode::ShapeMismatch, "norm stats cover " + std::to_string(stats.mean.size()) +
                                           " variables, series has " +
                                           std::to_string(series.n_vars()));
    RawSeries out = series;
    for (int i = 0; i < series.n_vars(); ++i)
        for (int t = 0; t < series.n_steps(); ++t)
            out.values(i, t) = (series.values(i, t) - stats.mean[i]) / stats.std[i];
    return out;
}

RawSeries zscore_invert(const RawSeries& series, const NormStats& stats) {
    if (static_cast<int>(stats.mean.size()) != series.n_vars())
        fail(ErrorCode::ShapeMismatch, "norm stats mismatch");
    RawSeries out = series;
    for (int i = 0; i < series.n_vars(); ++i)
        for (int t = 0; t < series.n_steps(); ++t)
            out.values(i, t) = series.values(i, t) * stats.std[i] + stats.mean[i];
    return out;
}

std::string normstats_to_json(const NormStats& stats) {
    nlohmann::json j;
    j["mean"] = stats.mean;
    j["std"] = stats.std;
    return j.dump();
}

NormStats normstats_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NormStats stats;
    stats.mean = j.at("mean").get<std::vector<double>>();
    stats.std = j.at("std").get<std::vector<double>>();
    return stats;
}

std::vector<WindowPair> make_windows(const RawSeries& slice, int lookback, int horizon,
                                     int stride) {
    if (stride < 1) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
    int total = slice.n_steps();
    if (total < lookback + horizon)
        fail(ErrorCode::SliceTooShort, "slice has " + std::to_string(total) +
                                           " steps, needs at least " +
                                           std::to_string(lookback + horizon));
    int n = slice.n_vars();
    std::vector<WindowPair> windows;
    for (int anchor = lookback; anchor + horizon <= total; anchor += stride) {
        WindowPair w;
        w.anchor = anchor;
        w.lookback = nn::Tensor2(n, lookback);
        w.horizon = nn::Tensor2(n, horizon);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < lookback; ++t)
                w.lookback(i, t) = slice.values(i, anchor - lookback + t);
            for (int t = 0; t < horizon; ++t) w.horizon(i, t) = slice.values(i, anchor + t);
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

int default_adf_max_lag(int n_steps) {
    return static_cast<int>(std::lround(12.0 * std::pow(n_steps / 100.0, 0.25)));
}

double adf_statistic(const std::vector<double>& series, int max_lag) {
    int total = static_cast<int>(series.size());
    if (max_lag < 0) fail(ErrorCode::InvalidArgument, "max_lag must be >= 0");
    if (total <= max_lag + 2)
        fail(ErrorCode::SeriesTooShort, "need more than " + std::to_string(max_lag + 2) +
                                            " observations, got " + std::to_string(total));

    // regression rows are t = max_lag+1 .. total-1:
    //   dx_t = c + rho * x_{t-1} + sum_j gamma_j dx_{t-j} + e_t
    int rows = total - max_lag - 1;
    int cols = 2 + max_lag;  // [x_{t-1}, dx_{t-1..max_lag}, const]
    if (rows <= cols)
        fail(ErrorCode::SeriesTooShort,
             "only " + std::to_string(rows) + " regression rows for " + std::to_string(cols) +
                 " coefficients");

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (int r = 0; r < rows; ++r) {
        int t = max_lag + 1 + r;
        target(r) = series[t] - series[t - 1];
        design(r, 0) = series[t - 1];
        for (int j = 1; j <= max_lag; ++j)
            design(r, j) = series[t - j] - series[t - j - 1];
        design(r, cols - 1) = 1.0;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols)
        fail(ErrorCode::SingularRegression,
             "design matrix rank " + std::to_string(qr.rank()) + " < " + std::to_string(cols));
    Eigen::VectorXd coef = qr.solve(target);
    Eigen::VectorXd resid = target - design * coef;
    double dof = rows - cols;
    double sigma2 = resid.squaredNorm() / dof;

    // var(coef) = sigma2 * (X'X)^-1; we only need the [0,0] entry
    Eigen::MatrixXd xtx_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
    double se = std::sqrt(sigma2 * xtx_inv(0, 0));
    if (!(se > 0.0) || !std::isfinite(se))
        fail(ErrorCode::SingularRegression, "zero standard error on lag coefficient");
    return coef(0) / se;
}

}  // namespace shiftcast::data
