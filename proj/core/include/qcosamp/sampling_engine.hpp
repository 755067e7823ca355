#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcosamp/builder.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp {

/// One full argument sweep: estimated and exact P(0) per grid point.
/// shots == 0 is the exact-mode sentinel (estimates equal exact values).
struct SweepResult {
    std::vector<double> x_grid;
    std::vector<double> estimated;
    std::vector<double> exact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

struct ErrorReport {
    double mse = 0.0;
    std::vector<double> squared_errors;
};

/// Default grid: 33 points uniform over [-pi, pi] inclusive.
std::vector<double> default_grid(int points = 33);

/// Assembles the spec at each grid point (direct or constant argument),
/// samples the last ancilla and records estimated and exact P(0).
/// Per-point seeds derive from the master seed by grid index.
SweepResult sweep(const QCoSampSpec& spec, const std::vector<double>& x_grid,
                  std::uint64_t shots, std::uint64_t seed);

/// Squared errors of the estimates against the analytic closed form
/// (never against the simulated exact value).
ErrorReport mse(const SweepResult& result, const QCoSampSpec& spec);
ErrorReport mse(const SweepResult& result, const std::vector<double>& reference);

/// Random single-component trials: n in {1..4}, x, r, s uniform in [-pi, pi];
/// each trial samples nu_n at one point and reports the squared error
/// against the analytic value.
std::vector<ErrorReport> random_values_trial(int trials, std::uint64_t shots,
                                             std::uint64_t seed);

/// Quartiles (q1, median, q3) of the per-trial MSE values.
struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};
Quartiles mse_quartiles(const std::vector<ErrorReport>& reports);

/// CSV with header x,estimated,exact; 17 significant digits.
std::string sweep_to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text);

/// CSV with header state,count; states rendered as binary strings.
std::string histogram_to_csv(const Histogram& h, int outcome_bits);

} // namespace qcosamp
