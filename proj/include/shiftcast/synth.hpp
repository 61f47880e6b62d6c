#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shiftcast/data.hpp"
#include "shiftcast/tensor.hpp"

namespace shiftcast::synth {

/// One autoregressive regime: per-variable AR coefficient vectors plus a
/// mixing matrix applied to the latent drivers while the regime is active.
struct Regime {
    int start_step = 0;
    std::vector<std::vector<double>> ar_coeffs;  // [var][lag]
    nn::Tensor2 mixing;                          // n_vars x n_vars
};

struct ShiftScenario {
    int n_vars = 0;
    int n_steps = 0;
    std::vector<Regime> regimes;
    double noise_std = 1.0;
    double obs_noise_std = 0.0;
    uint64_t seed = 0;
    std::vector<double> init;  // optional initial driver values, default zeros

    /// Checks regime ordering, AR stability (companion spectral radius < 1)
    /// and row-normalizes each |mixing| to unit absolute row sum.
    void validate_and_normalize();

    bool has_identity_mixing() const;

    std::string to_json() const;
    static ShiftScenario from_json(const std::string& text);
};

/// Per-variable AR recursion with regime-dependent coefficients; requires
/// identity mixing. Coefficient changes at regime boundaries shift each
/// series' own lookback-to-horizon conditional.
data::RawSeries gen_intra_shift(const ShiftScenario& scenario);

/// Latent AR drivers mixed by the active regime's matrix; mixing changes at
/// regime boundaries shift the conditional structure across series.
data::RawSeries gen_inter_shift(const ShiftScenario& scenario);

/// |mixing| of the regime active at step t, row-normalized. A boundary step
/// belongs to the later regime.
nn::Tensor2 ground_truth_graph(const ShiftScenario& scenario, int step);

/// Largest |eigenvalue| of the AR companion matrix.
double ar_spectral_radius(const std::vector<double>& coeffs);

}  // namespace shiftcast::synth
