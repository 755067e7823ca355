#include "qcosamp/sampling_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "qcosamp/errors.hpp"

namespace qcosamp {

std::vector<double> default_grid(int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        g[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

namespace {

double estimate_p0(const StateVector& state, int measured, std::uint64_t shots,
                   std::uint64_t seed) {
    if (shots == 0) {
        return measure_probabilities(state, {measured})[0];
    }
    const Histogram h = sample(state, {measured}, shots, seed);
    const auto it = h.counts.find(0);
    const std::uint64_t zeros = it == h.counts.end() ? 0 : it->second;
    return static_cast<double>(zeros) / static_cast<double>(shots);
}

} // namespace

SweepResult sweep(const QCoSampSpec& spec, const std::vector<double>& x_grid,
                  std::uint64_t shots, std::uint64_t seed) {
    if (std::holds_alternative<Steerable>(spec.argument)) {
        throw SchemaError("sweep supports direct or constant-data arguments only");
    }
    for (double x : x_grid) {
        if (x < -kPi - 1e-9 || x > kPi + 1e-9) {
            throw SchemaError("sweep grid must lie within [-pi, pi]");
        }
    }
    SweepResult result;
    result.x_grid = x_grid;
    result.shots = shots;
    result.seed = seed;
    QCoSampSpec point_spec = spec;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        point_spec.argument = Direct{x_grid[i]};
        const AssembledOperator op = assemble(point_spec);
        const StateVector state = op.circuit.run_from_zero();
        state.check_normalized(kTolComposed);
        const double exact = measure_probabilities(state, {op.layout.measured_qubit})[0];
        const double est = shots == 0 ? exact
                                      : estimate_p0(state, op.layout.measured_qubit, shots,
                                                    Rng::stream(seed, i).next_u64());
        result.exact.push_back(exact);
        result.estimated.push_back(est);
    }
    return result;
}

ErrorReport mse(const SweepResult& result, const std::vector<double>& reference) {
    if (reference.size() != result.estimated.size()) {
        throw std::invalid_argument("reference length must match the sweep");
    }
    ErrorReport report;
    double total = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double e = result.estimated[i] - reference[i];
        report.squared_errors.push_back(e * e);
        total += e * e;
    }
    report.mse = total / static_cast<double>(reference.size());
    return report;
}

ErrorReport mse(const SweepResult& result, const QCoSampSpec& spec) {
    std::vector<double> reference;
    reference.reserve(result.x_grid.size());
    for (double x : result.x_grid) reference.push_back(closed_form_mu(spec, x));
    return mse(result, reference);
}

std::vector<ErrorReport> random_values_trial(int trials, std::uint64_t shots,
                                             std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    std::vector<ErrorReport> reports;
    Rng rng = Rng::stream(seed, 0x72616e64);
    for (int t = 0; t < trials; ++t) {
        const long long n = 1 + static_cast<long long>(rng.next_u64() % 4);
        const double x = -kPi + 2.0 * kPi * rng.next_double();
        const double r = -kPi + 2.0 * kPi * rng.next_double();
        const double s = -kPi + 2.0 * kPi * rng.next_double();

        QCoSampSpec spec;
        spec.components.push_back(
            {Direct{static_cast<double>(n)}, Direct{r}, Direct{s}});
        spec.tree = TreeNode::make_leaf(0);
        spec.argument = Direct{x};

        const AssembledOperator op = assemble(spec);
        const StateVector state = op.circuit.run_from_zero();
        const double est =
            estimate_p0(state, op.layout.measured_qubit, shots, Rng::stream(seed, t + 1).next_u64());
        const double analytic = closed_form_mu(spec, x);

        ErrorReport report;
        const double e = est - analytic;
        report.squared_errors.push_back(e * e);
        report.mse = e * e;
        reports.push_back(std::move(report));
    }
    return reports;
}

Quartiles mse_quartiles(const std::vector<ErrorReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("no reports");
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.mse);
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };
    return {at(0.25), at(0.5), at(0.75)};
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "x,estimated,exact\n";
    for (std::size_t i = 0; i < result.x_grid.size(); ++i) {
        out << fmt17(result.x_grid[i]) << ',' << fmt17(result.estimated[i]) << ','
            << fmt17(result.exact[i]) << '\n';
    }
    return out.str();
}

SweepResult sweep_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,estimated,exact") {
        throw SchemaError("sweep CSV must start with header x,estimated,exact");
    }
    SweepResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ',')) throw SchemaError("sweep CSV row too short");
            vals[k] = std::stod(cell);
        }
        result.x_grid.push_back(vals[0]);
        result.estimated.push_back(vals[1]);
        result.exact.push_back(vals[2]);
    }
    return result;
}

std::string histogram_to_csv(const Histogram& h, int outcome_bits) {
    std::ostringstream out;
    out << "state,count\n";
    for (const auto& [state, count] : h.counts) {
        for (int b = outcome_bits - 1; b >= 0; --b) out << ((state >> b) & 1u);
        out << ',' << count << '\n';
    }
    return out.str();
}

} // namespace qcosamp
