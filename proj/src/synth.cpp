#include "shiftcast/synth.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "json.hpp"

#include "shiftcast/errors.hpp"
#include "shiftcast/rng.hpp"

namespace shiftcast::synth {

namespace {

using nlohmann::json;

int active_regime(const ShiftScenario& s, int step) {
    int idx = 0;
    for (size_t r = 0; r < s.regimes.size(); ++r)
        if (s.regimes[r].start_step <= step) idx = static_cast<int>(r);
    return idx;
}

/// Drivers are per-variable AR processes sharing labels between the intra
/// and inter generators, so identity mixing reproduces intra output exactly.
nn::Tensor2 gen_drivers(const ShiftScenario& s) {
    nn::Tensor2 drivers(s.n_vars, s.n_steps);
    for (int i = 0; i < s.n_vars; ++i) {
        nn::RngStream rng = nn::RngStream(s.seed).child("driver").child(static_cast<uint64_t>(i));
        double x0 = i < static_cast<int>(s.init.size()) ? s.init[i] : 0.0;
        for (int t = 0; t < s.n_steps; ++t) {
            const Regime& reg = s.regimes[active_regime(s, t)];
            const std::vector<double>& coeffs = reg.ar_coeffs[i];
            double value = 0.0;
            if (t == 0) {
                value = x0;
            } else {
                for (size_t j = 0; j < coeffs.size(); ++j) {
                    int lag = static_cast<int>(j) + 1;
                    if (t - lag >= 0) value += coeffs[j] * drivers(i, t - lag);
                }
            }
            if (s.noise_std > 0.0 && t > 0) value += s.noise_std * rng.normal();
            drivers(i, t) = value;
        }
    }
    return drivers;
}

}  // namespace

double ar_spectral_radius(const std::vector<double>& coeffs) {
    int p = static_cast<int>(coeffs.size());
    if (p == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) companion(0, j) = coeffs[j];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    double radius = 0.0;
    for (int i = 0; i < p; ++i) radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
    return radius;
}

void ShiftScenario::validate_and_normalize() {
    if (n_vars < 1 || n_steps < 1)
        fail(ErrorCode::InvalidScenario, "n_vars and n_steps must be positive");
    if (regimes.empty()) fail(ErrorCode::InvalidScenario, "at least one regime required");
    if (regimes.front().start_step != 0)
        fail(ErrorCode::InvalidScenario, "first regime must start at step 0");
    for (size_t r = 1; r < regimes.size(); ++r)
        if (regimes[r].start_step <= regimes[r - 1].start_step)
            fail(ErrorCode::InvalidScenario, "regime starts must be strictly increasing");
    if (noise_std < 0.0 || obs_noise_std < 0.0)
        fail(ErrorCode::InvalidScenario, "noise stds must be non-negative");

    for (size_t r = 0; r < regimes.size(); ++r) {
        Regime& reg = regimes[r];
        if (static_cast<int>(reg.ar_coeffs.size()) != n_vars)
            fail(ErrorCode::InvalidScenario,
                 "regime " + std::to_string(r) + " has AR coefficients for " +
                     std::to_string(reg.ar_coeffs.size()) + " variables, expected " +
                     std::to_string(n_vars));
        for (int i = 0; i < n_vars; ++i) {
            double radius = ar_spectral_radius(reg.ar_coeffs[i]);
            if (radius >= 1.0)
                fail(ErrorCode::UnstableRegime,
                     "regime " + std::to_string(r) + ", variable " + std::to_string(i) +
                         ": spectral radius " + std::to_string(radius) + " >= 1");
        }
        if (reg.mixing.rows != n_vars || reg.mixing.cols != n_vars)
            fail(ErrorCode::InvalidScenario,
                 "regime " + std::to_string(r) + " mixing must be " + std::to_string(n_vars) +
                     "x" + std::to_string(n_vars));
        for (int i = 0; i < n_vars; ++i) {
            double abs_sum = 0.0;
            for (int j = 0; j < n_vars; ++j) abs_sum += std::fabs(reg.mixing(i, j));
            if (abs_sum == 0.0)
                fail(ErrorCode::InvalidScenario,
                     "regime " + std::to_string(r) + " mixing row " + std::to_string(i) +
                         " is all zeros");
            for (int j = 0; j < n_vars; ++j) reg.mixing(i, j) /= abs_sum;
        }
    }
}

bool ShiftScenario::has_identity_mixing() const {
    for (const Regime& reg : regimes) {
        for (int i = 0; i < n_vars; ++i)
            for (int j = 0; j < n_vars; ++j) {
                double expect = i == j ? 1.0 : 0.0;
                if (std::fabs(reg.mixing(i, j) - expect) > 1e-12) return false;
            }
    }
    return true;
}

data::RawSeries gen_intra_shift(const ShiftScenario& scenario) {
    ShiftScenario s = scenario;
    s.validate_and_normalize();
    if (!s.has_identity_mixing())
        fail(ErrorCode::InvalidScenario, "gen_intra_shift requires identity mixing");
    data::RawSeries out;
    out.values = gen_drivers(s);
    for (int i = 0; i < s.n_vars; ++i) out.variable_names.push_back("var" + std::to_string(i));
    out.interval = "synthetic";
    return out;
}

data::RawSeries gen_inter_shift(const ShiftScenario& scenario) {
    ShiftScenario s = scenario;
    s.validate_and_normalize();
    nn::Tensor2 drivers = gen_drivers(s);
    data::RawSeries out;
    out.values = nn::Tensor2(s.n_vars, s.n_steps);
    nn::RngStream obs_rng = nn::RngStream(s.seed).child("obs_noise");
    for (int t = 0; t < s.n_steps; ++t) {
        const Regime& reg = s.regimes[active_regime(s, t)];
        for (int i = 0; i < s.n_vars; ++i) {
            double value = 0.0;
            for (int j = 0; j < s.n_vars; ++j) value += reg.mixing(i, j) * drivers(j, t);
            if (s.obs_noise_std > 0.0) value += s.obs_noise_std * obs_rng.normal();
            out.values(i, t) = value;
        }
    }
    for (int i = 0; i < s.n_vars; ++i) out.variable_names.push_back("var" + std::to_string(i));
    out.interval = "synthetic";
    return out;
}

nn::Tensor2 ground_truth_graph(const ShiftScenario& scenario, int step) {
    ShiftScenario s = scenario;
    s.validate_and_normalize();
    if (step < 0 || step >= s.n_steps)
        fail(ErrorCode::InvalidArgument, "step " + std::to_string(step) + " out of range");
    const Regime& reg = s.regimes[active_regime(s, step)];
    nn::Tensor2 graph(s.n_vars, s.n_vars);
    for (int i = 0; i < s.n_vars; ++i) {
        double abs_sum = 0.0;
        for (int j = 0; j < s.n_vars; ++j) abs_sum += std::fabs(reg.mixing(i, j));
        for (int j = 0; j < s.n_vars; ++j) graph(i, j) = std::fabs(reg.mixing(i, j)) / abs_sum;
    }
    return graph;
}

std::string ShiftScenario::to_json() const {
    json j;
    j["n_vars"] = n_vars;
    j["n_steps"] = n_steps;
    j["noise_std"] = noise_std;
    if (obs_noise_std != 0.0) j["obs_noise_std"] = obs_noise_std;
    j["seed"] = seed;
    if (!init.empty()) j["init"] = init;
    j["regimes"] = json::array();
    for (const Regime& reg : regimes) {
        json jr;
        jr["start"] = reg.start_step;
        jr["ar"] = reg.ar_coeffs;
        std::vector<std::vector<double>> mix(reg.mixing.rows);
        for (int i = 0; i < reg.mixing.rows; ++i)
            for (int jcol = 0; jcol < reg.mixing.cols; ++jcol)
                mix[i].push_back(reg.mixing(i, jcol));
        jr["mixing"] = mix;
        j["regimes"].push_back(jr);
    }
    return j.dump(2);
}

ShiftScenario ShiftScenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidScenario, std::string("bad scenario JSON: ") + e.what());
    }
    ShiftScenario s;
    try {
        s.n_vars = j.at("n_vars").get<int>();
        s.n_steps = j.at("n_steps").get<int>();
        s.noise_std = j.value("noise_std", 1.0);
        s.obs_noise_std = j.value("obs_noise_std", 0.0);
        s.seed = j.value("seed", 0ull);
        if (j.contains("init")) s.init = j.at("init").get<std::vector<double>>();
        for (const json& jr : j.at("regimes")) {
            Regime reg;
            reg.start_step = jr.at("start").get<int>();
            reg.ar_coeffs = jr.at("ar").get<std::vector<std::vector<double>>>();
            auto mix = jr.at("mixing").get<std::vector<std::vector<double>>>();
            reg.mixing = nn::Tensor2(static_cast<int>(mix.size()),
                                     mix.empty() ? 0 : static_cast<int>(mix[0].size()));
            for (size_t i = 0; i < mix.size(); ++i) {
                if (static_cast<int>(mix[i].size()) != reg.mixing.cols)
                    fail(ErrorCode::InvalidScenario, "ragged mixing matrix");
                for (size_t c = 0; c < mix[i].size(); ++c)
                    reg.mixing(static_cast<int>(i), static_cast<int>(c)) = mix[i][c];
            }
            s.regimes.push_back(std::move(reg));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidScenario, std::string("bad scenario fields: ") + e.what());
    }
    s.validate_and_normalize();
    return s;
}

}  // namespace shiftcast::synth
