#pragma once

#include <string>
#include <vector>

#include "shiftcast/tensor.hpp"

namespace shiftcast::data {

/// N-variable, T-step series. Row = variable, column = time step
/// (transposed from the on-disk CSV layout).
struct RawSeries {
    nn::Tensor2 values;  // N x T
    std::vector<std::string> variable_names;
    std::string interval;

    int n_vars() const { return values.rows; }
    int n_steps() const { return values.cols; }
};

struct NormStats {
    std::vector<double> mean;
    std::vector<double> std;
};

struct SplitSpec {
    double train_frac = 0.7;
    double val_frac = 0.1;
    double test_frac = 0.2;

    void validate() const;
};

struct SplitResult {
    RawSeries train;
    RawSeries val;
    RawSeries test;
};

/// One (lookback, horizon) training instance anchored at step t:
/// lookback covers [anchor-L, anchor), horizon covers [anchor, anchor+H).
struct WindowPair {
    nn::Tensor2 lookback;  // N x L
    nn::Tensor2 horizon;   // N x H
    int anchor = 0;
};

/// Comma-separated, one row per time step, one column per variable,
/// optional single header row. Result is transposed to variables-as-rows.
RawSeries load_csv(const std::string& path, bool header);

void save_csv(const RawSeries& series, const std::string& path, bool header = true);

/// Contiguous chronological slices of floor(T*frac) steps; the remainder
/// goes to the test slice.
SplitResult split(const RawSeries& raw, const SplitSpec& spec);

/// Per-variable mean and population (1/T) standard deviation, floored at
/// 1e-8. Fit on the training slice only.
NormStats zscore_fit(const RawSeries& train);
RawSeries zscore_apply(const RawSeries& series, const NormStats& stats);
RawSeries zscore_invert(const RawSeries& series, const NormStats& stats);

std::string normstats_to_json(const NormStats& stats);
NormStats normstats_from_json(const std::string& text);

/// Windows anchored at L, L+stride, ...; count floor((T-L-H)/stride)+1.
std::vector<WindowPair> make_windows(const RawSeries& slice, int lookback, int horizon,
                                     int stride = 1);

/// Dickey-Fuller t-statistic: OLS of dx_t on x_{t-1}, max_lag lagged
/// differences, and a constant term; returns the t-statistic of the
/// x_{t-1} coefficient. Larger (less negative) means more non-stationary.
double adf_statistic(const std::vector<double>& series, int max_lag);

/// 12*(T/100)^(1/4), rounded — the usual Schwert rule of thumb.
int default_adf_max_lag(int n_steps);

}  // namespace shiftcast::data
