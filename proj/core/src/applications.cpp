#include "qcosamp/applications.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qcosamp/errors.hpp"

namespace qcosamp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

IntegrateResult integrate(const QCoSampSpec& spec, int max_qubits) {
    const bool steerable = std::holds_alternative<Steerable>(spec.argument);
    const bool constant = std::holds_alternative<ConstantData>(spec.argument);
    if (!steerable && !constant) {
        throw SchemaError("integration needs a steerable or constant-data argument register");
    }

    AssembleOptions opts;
    opts.max_qubits = max_qubits;
    opts.uniform_argument = steerable;
    const AssembledOperator op = assemble(spec, opts);

    const StateVector state = op.circuit.run_from_zero();
    state.check_normalized(kTolComposed);

    // Final component's ancilla pair: c1 then the measured c2.
    const int c2 = op.layout.measured_qubit;
    const int c1 = op.layout.ancillae[op.layout.ancillae.size() - 2];
    const std::vector<double> probs = measure_probabilities(state, {c1, c2});

    IntegrateResult result;
    result.p00 = probs[0];
    result.p_last_zero = probs[0] + probs[2];
    result.argument_qubits = static_cast<int>(op.layout.x_register.size());

    // Closed-form grid sum: p00 is half the uniform grid mean of mu.
    std::vector<double> grid;
    if (steerable) {
        const int xq = result.argument_qubits;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << xq); ++v) {
            grid.push_back(phase_grid_value(v, xq));
        }
    } else {
        const auto& cd = std::get<ConstantData>(spec.argument);
        grid = cd.values;
        grid.resize(std::uint64_t{1} << cd.register_qubits, 0.0);
    }
    double mean_mu = 0.0;
    for (double x : grid) mean_mu += closed_form_mu(spec, x);
    mean_mu /= static_cast<double>(grid.size());
    result.p00_oracle = mean_mu / 2.0;
    result.integral = 2.0 * kPi * mean_mu; // == 4*pi*p00
    return result;
}

// ---------------------------------------------------------------------------
// State comparison
// ---------------------------------------------------------------------------

namespace {

std::vector<double> phases_of_uniform_state(const StateVector& s) {
    const double want = 1.0 / std::sqrt(static_cast<double>(s.dim()));
    std::vector<double> phases;
    phases.reserve(s.dim());
    for (std::uint64_t k = 0; k < s.dim(); ++k) {
        if (std::abs(std::abs(s.amp(k)) - want) > 1e-9) {
            throw std::invalid_argument(
                "comparison needs uniform-magnitude phase states; coordinate " +
                std::to_string(k) + " has magnitude " + std::to_string(std::abs(s.amp(k))));
        }
        phases.push_back(std::arg(s.amp(k)));
    }
    return phases;
}

} // namespace

double compare_phase_states(const std::vector<double>& w_phases,
                            const std::vector<double>& y_phases) {
    if (w_phases.size() != y_phases.size() || w_phases.empty()) {
        throw std::invalid_argument("compared states must have equal width");
    }
    int reg_qubits = 0;
    while ((std::size_t{1} << reg_qubits) < w_phases.size()) ++reg_qubits;
    if ((std::size_t{1} << reg_qubits) != w_phases.size()) {
        throw std::invalid_argument("phase table length must be a power of two");
    }

    const int total = reg_qubits + 2;
    const int c1 = reg_qubits, c2 = reg_qubits + 1;
    std::vector<int> reg(reg_qubits);
    for (int i = 0; i < reg_qubits; ++i) reg[i] = i;

    // (1/2)[ |1^>|00> - |Y>|01> + |W>|10> - |1^>|11> ], then H x H and cX.
    Circuit c(total);
    for (int q : reg) c.add(GateApplication::h(q));
    c.add(GateApplication::h(c1));
    c.add(GateApplication::h(c2));
    auto pattern = [&](std::uint64_t k, bool v1, bool v2) {
        std::vector<std::pair<int, bool>> conds;
        for (int j = 0; j < reg_qubits; ++j) {
            conds.emplace_back(reg[j], ((k >> (reg_qubits - 1 - j)) & 1u) != 0);
        }
        conds.emplace_back(c1, v1);
        conds.emplace_back(c2, v2);
        return conds;
    };
    for (std::uint64_t k = 0; k < y_phases.size(); ++k) {
        add_pattern_phase(c, y_phases[k] + kPi, pattern(k, false, true)); // -|Y>|01>
    }
    for (std::uint64_t k = 0; k < w_phases.size(); ++k) {
        add_pattern_phase(c, w_phases[k], pattern(k, true, false)); // +|W>|10>
    }
    add_pattern_phase(c, kPi, {{c1, true}, {c2, true}}); // -|1^>|11>
    c.add(GateApplication::h(c1));
    c.add(GateApplication::h(c2));
    c.add(GateApplication::x(c2, {c1}));

    const StateVector out = c.run_from_zero();
    out.check_normalized(kTolComposed);
    return measure_probabilities(out, {c2})[1];
}

double compare_states(const Circuit& w_prep, const Circuit& y_prep) {
    if (w_prep.qubit_count() != y_prep.qubit_count()) {
        throw std::invalid_argument("compared preparations must have equal width");
    }
    const std::vector<double> w = phases_of_uniform_state(w_prep.run_from_zero());
    const std::vector<double> y = phases_of_uniform_state(y_prep.run_from_zero());
    return compare_phase_states(w, y);
}

// ---------------------------------------------------------------------------
// Amplitude amplification
// ---------------------------------------------------------------------------

namespace {

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm_sq_of(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& a : v) s += std::norm(a);
    return s;
}

void check_unit(const std::vector<cplx>& v, const char* name) {
    if (std::abs(norm_sq_of(v) - 1.0) > kTolComposed) {
        throw std::invalid_argument(std::string(name) +
                                    " must be normalized for the reflection to be unitary");
    }
}

} // namespace

AmplificationRun amplitude_amplify(const AmplificationProblem& problem, int iterations) {
    if (problem.phi.size() != problem.omega.size() || problem.phi.empty()) {
        throw std::invalid_argument("phi and omega must live in the same space");
    }
    if (iterations < 0) throw std::invalid_argument("iteration count must be >= 0");
    check_unit(problem.phi, "phi");
    check_unit(problem.omega, "omega");

    AmplificationRun run;
    run.state = problem.phi;
    run.trace.push_back(std::norm(inner(problem.omega, run.state)));
    for (int it = 0; it < iterations; ++it) {
        // Oracle 1 - 2|w><w| then diffusion 2|phi><phi| - 1.
        const cplx ow = inner(problem.omega, run.state);
        for (std::size_t i = 0; i < run.state.size(); ++i) {
            run.state[i] -= 2.0 * ow * problem.omega[i];
        }
        const cplx op = inner(problem.phi, run.state);
        for (std::size_t i = 0; i < run.state.size(); ++i) {
            run.state[i] = 2.0 * op * problem.phi[i] - run.state[i];
        }
        run.trace.push_back(std::norm(inner(problem.omega, run.state)));
    }
    return run;
}

int suggested_iterations(const AmplificationProblem& problem) {
    const double a = std::norm(inner(problem.omega, problem.phi));
    if (a <= 0.0) throw std::invalid_argument("phi has no overlap with omega");
    if (a >= 1.0) return 0;
    const double theta = std::asin(std::sqrt(a));
    return std::max(0, static_cast<int>(std::lround(kPi / (4.0 * theta) - 0.5)));
}

// ---------------------------------------------------------------------------
// Curve fitting
// ---------------------------------------------------------------------------

void DataSet::validate() const {
    if (x.size() != y.size() || x.empty()) {
        throw SchemaError("data set needs matching nonempty x and y columns");
    }
    for (double yi : y) {
        if (!(yi >= 0.0 && yi <= 1.0)) {
            throw SchemaError("reference values must lie in [0, 1] for arccos encoding");
        }
    }
    for (double xi : x) {
        if (!std::isfinite(xi)) throw SchemaError("arguments must be finite");
    }
}

DataSet dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,y") {
        throw SchemaError("data CSV must start with header x,y");
    }
    DataSet d;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw SchemaError("data CSV row needs two columns");
        d.x.push_back(std::stod(line.substr(0, comma)));
        d.y.push_back(std::stod(line.substr(comma + 1)));
    }
    d.validate();
    return d;
}

std::string dataset_to_csv(const DataSet& data) {
    std::ostringstream out;
    out << "x,y\n";
    char buf[96];
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", data.x[i], data.y[i]);
        out << buf;
    }
    return out.str();
}

namespace {

double fdist(double a, double b) { return 2.0 * (1.0 - std::cos(a - b)); }

struct FitGeometry {
    long long n;
    int r_qubits, s_qubits, x_qubits, total_qubits;
    std::uint64_t rdim, sdim, kdim;

    std::uint64_t index(std::uint64_t pr, std::uint64_t ps, std::uint64_t k, int w, int c1,
                        int c2) const {
        return ((((pr * sdim + ps) * kdim + k) * 2 + w) * 2 + c1) * 2 + c2;
    }
};

FitGeometry fit_geometry(long long n, const DataSet& data, int r_qubits, int s_qubits,
                         int max_qubits) {
    data.validate();
    int x_qubits = 0;
    while ((std::size_t{1} << x_qubits) < data.size()) ++x_qubits;
    if ((std::size_t{1} << x_qubits) != data.size()) {
        throw SchemaError("data count must be a power of two (constant-data slots)");
    }
    FitGeometry g;
    g.n = n;
    g.r_qubits = r_qubits;
    g.s_qubits = s_qubits;
    g.x_qubits = x_qubits;
    g.total_qubits = r_qubits + s_qubits + x_qubits + 3;
    if (g.total_qubits > max_qubits) {
        throw GuardrailError("curve fitting needs " + std::to_string(g.total_qubits) +
                             " qubits, over the limit (crossed while adding the data register)");
    }
    g.rdim = std::uint64_t{1} << r_qubits;
    g.sdim = std::uint64_t{1} << s_qubits;
    g.kdim = std::uint64_t{1} << x_qubits;
    return g;
}

/// Comparison-state amplitudes for one (p, k, w) cell. w = 0 rides the
/// s branch, w = 1 the r branch; `pad` adds the idle 2*|1^> terms.
struct CellBlocks {
    cplx b00, b01, b10, b11;
};

CellBlocks cell_blocks(const FitGeometry& g, const DataSet& data, double r, double s,
                       std::uint64_t k, int w, bool pad) {
    const double xk = data.x[k];
    const double yhat = std::acos(std::clamp(2.0 * data.y[k] - 1.0, -1.0, 1.0));
    const cplx W = std::polar(1.0, static_cast<double>(g.n) * xk + (w == 0 ? s : r));
    const cplx Y = std::polar(1.0, yhat);
    const double base = pad ? 2.0 : 0.0;
    return {W - Y, base + Y + W, base - Y - W, Y - W};
}

std::vector<cplx> build_comparison_state(const FitGeometry& g, const DataSet& data, bool pad) {
    const std::uint64_t dim = std::uint64_t{1} << g.total_qubits;
    std::vector<cplx> v(dim, cplx{0.0, 0.0});
    for (std::uint64_t pr = 0; pr < g.rdim; ++pr) {
        const double r = decode_phase_bits(pr, g.r_qubits);
        for (std::uint64_t ps = 0; ps < g.sdim; ++ps) {
            const double s = decode_phase_bits(ps, g.s_qubits);
            for (std::uint64_t k = 0; k < g.kdim; ++k) {
                for (int w = 0; w < 2; ++w) {
                    const CellBlocks b = cell_blocks(g, data, r, s, k, w, pad);
                    v[g.index(pr, ps, k, w, 0, 0)] = b.b00;
                    v[g.index(pr, ps, k, w, 0, 1)] = b.b01;
                    v[g.index(pr, ps, k, w, 1, 0)] = b.b10;
                    v[g.index(pr, ps, k, w, 1, 1)] = b.b11;
                }
            }
        }
    }
    const double nrm = std::sqrt(norm_sq_of(v));
    for (cplx& a : v) a /= nrm;
    return v;
}

} // namespace

ForgedProblem forge_reference(long long n, const DataSet& data, int r_qubits, int s_qubits,
                              int max_qubits) {
    if (n < 1) throw SchemaError("component frequency must be >= 1");
    const FitGeometry g = fit_geometry(n, data, r_qubits, s_qubits, max_qubits);

    ForgedProblem fp;
    fp.n = n;
    fp.r_qubits = g.r_qubits;
    fp.s_qubits = g.s_qubits;
    fp.x_qubits = g.x_qubits;
    fp.total_qubits = g.total_qubits;
    fp.data = data;
    fp.phi_padded = build_comparison_state(g, data, true);
    fp.problem.phi = build_comparison_state(g, data, false);

    // Desired state: the |00>/|11> blocks zeroed (exact-fit branches).
    fp.problem.omega = fp.problem.phi;
    for (std::uint64_t pr = 0; pr < g.rdim; ++pr) {
        for (std::uint64_t ps = 0; ps < g.sdim; ++ps) {
            for (std::uint64_t k = 0; k < g.kdim; ++k) {
                for (int w = 0; w < 2; ++w) {
                    fp.problem.omega[g.index(pr, ps, k, w, 0, 0)] = 0.0;
                    fp.problem.omega[g.index(pr, ps, k, w, 1, 1)] = 0.0;
                }
            }
        }
    }
    const double nrm = std::sqrt(norm_sq_of(fp.problem.omega));
    if (nrm == 0.0) throw NumericError("desired state vanished; degenerate data");
    for (cplx& a : fp.problem.omega) a /= nrm;
    return fp;
}

double qsm(long long n, double r, double s, const DataSet& data) {
    data.validate();
    const double K = static_cast<double>(data.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const double yhat = std::acos(std::clamp(2.0 * data.y[k] - 1.0, -1.0, 1.0));
        const double nx = static_cast<double>(n) * data.x[k];
        sum += fdist(nx + s, yhat) + fdist(nx + r, yhat);
    }
    return sum / (32.0 * K);
}

double qsm_state_probability(long long n, double r, double s, const DataSet& data) {
    // Fixed-parameter padded state over [k][w][c1][c2].
    data.validate();
    FitGeometry g = fit_geometry(n, data, 0, 0, 30);
    std::vector<cplx> v(std::uint64_t{1} << g.total_qubits, cplx{0.0, 0.0});
    for (std::uint64_t k = 0; k < g.kdim; ++k) {
        for (int w = 0; w < 2; ++w) {
            const CellBlocks b = cell_blocks(g, data, r, s, k, w, true);
            v[g.index(0, 0, k, w, 0, 0)] = b.b00;
            v[g.index(0, 0, k, w, 0, 1)] = b.b01;
            v[g.index(0, 0, k, w, 1, 0)] = b.b10;
            v[g.index(0, 0, k, w, 1, 1)] = b.b11;
        }
    }
    const double nrm = std::sqrt(norm_sq_of(v));
    for (cplx& a : v) a /= nrm;
    const StateVector state(g.total_qubits, std::move(v));
    // c1, c2 are the last two qubits.
    const std::vector<double> p =
        measure_probabilities(state, {g.total_qubits - 2, g.total_qubits - 1});
    return p[0];
}

FitResult curve_fit(const DataSet& data, int components, int phase_resolution, int iterations,
                    std::uint64_t shots, std::uint64_t seed, long long n) {
    if (components != 1) {
        throw SchemaError("curve fitting is implemented for one component at desk scale");
    }
    if (shots == 0) throw SchemaError("curve fitting needs shots >= 1");

    ForgedProblem fp = forge_reference(n, data, phase_resolution, phase_resolution);
    AmplificationRun run = amplitude_amplify(fp.problem, iterations);

    // Comparison cX, then measure (parameter registers, similarity ancilla).
    StateVector state(fp.total_qubits, std::move(run.state));
    apply(state, GateApplication::x(fp.total_qubits - 1, {fp.total_qubits - 2}));

    std::vector<int> measured;
    for (int q = 0; q < fp.r_qubits + fp.s_qubits; ++q) measured.push_back(q);
    measured.push_back(fp.total_qubits - 1);

    const Histogram raw = sample(state, measured, shots, seed);

    // Keep outcomes whose similarity ancilla read 1 (good blocks).
    FitResult fit;
    fit.histogram.shots = 0;
    fit.histogram.seed = seed;
    for (const auto& [outcome, count] : raw.counts) {
        if ((outcome & 1u) == 0) continue;
        fit.histogram.counts[outcome >> 1] += count;
        fit.histogram.shots += count;
    }
    fit.conditioned_shots = fit.histogram.shots;
    if (fit.histogram.counts.empty()) {
        throw NumericError("no shots landed in the similarity branch");
    }

    std::uint64_t best = 0, best_count = 0;
    for (const auto& [p, count] : fit.histogram.counts) {
        if (count > best_count) {
            best = p;
            best_count = count;
        }
    }
    fit.best_state = best;
    const std::uint64_t pr = best >> fp.s_qubits;
    const std::uint64_t ps = best & ((std::uint64_t{1} << fp.s_qubits) - 1);
    fit.best_r = {decode_phase_bits(pr, fp.r_qubits)};
    fit.best_s = {decode_phase_bits(ps, fp.s_qubits)};
    fit.qsm = qsm(n, fit.best_r[0], fit.best_s[0], data);
    return fit;
}

std::string fit_result_to_json_text(const FitResult& fit, const std::string& histogram_csv_path) {
    json j{{"best", json{{"r", fit.best_r}, {"s", fit.best_s}}},
           {"best_state", fit.best_state},
           {"qsm", fit.qsm},
           {"conditioned_shots", fit.conditioned_shots},
           {"histogram_csv_path", histogram_csv_path}};
    return j.dump(2) + "\n";
}

} // namespace qcosamp
