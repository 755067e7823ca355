#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcosamp/builder.hpp"
#include "qcosamp/circuit.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp {

// ---------------------------------------------------------------------------
// Quantum integration
// ---------------------------------------------------------------------------

struct IntegrateResult {
    /// Exact probability of the |00> pattern on the final ancilla pair;
    /// equals half the uniform grid mean of mu.
    double p00 = 0.0;
    /// Closed-form grid-sum oracle for p00 (direct components required).
    double p00_oracle = 0.0;
    /// Exact P(last ancilla = 0) = grid mean of mu (= 2 * p00).
    double p_last_zero = 0.0;
    /// 2*pi * grid mean of mu: the Riemann estimate of the integral of mu
    /// over [-pi, pi].
    double integral = 0.0;
    int argument_qubits = 0;
};

/// Superposes the argument register, runs the assembled operator exactly and
/// reads off the ancilla-pair statistics. The argument must be steerable
/// (put into uniform superposition here) or constant-data.
IntegrateResult integrate(const QCoSampSpec& spec, int max_qubits = 26);

// ---------------------------------------------------------------------------
// State comparison
// ---------------------------------------------------------------------------

/// Comparison of two uniform-magnitude phase states prepared by the given
/// circuits: P(right ancilla = 1) after the idle/argument/reference
/// construction, H on both ancillae and cX. Returns 1 for equal states and
/// 0.5 for Y = -W. Throws if a preparation is not a phase state or widths
/// differ.
double compare_states(const Circuit& w_prep, const Circuit& y_prep);

/// Same comparison given the phase tables directly.
double compare_phase_states(const std::vector<double>& w_phases,
                            const std::vector<double>& y_phases);

// ---------------------------------------------------------------------------
// Amplitude amplification
// ---------------------------------------------------------------------------

/// Dense beginning and desired states; the reflections 2|phi><phi|-1 and
/// 1-2|omega><omega| are applied as rank-one updates over this vector space.
struct AmplificationProblem {
    std::vector<cplx> phi;
    std::vector<cplx> omega;
};

struct AmplificationRun {
    std::vector<cplx> state;
    /// |<omega|state>|^2 after 0, 1, ..., m iterations (m+1 entries).
    std::vector<double> trace;
};

AmplificationRun amplitude_amplify(const AmplificationProblem& problem, int iterations);

/// round(pi/(4 asin(sqrt(a))) - 1/2) with a = |<omega|phi>|^2.
int suggested_iterations(const AmplificationProblem& problem);

// ---------------------------------------------------------------------------
// Curve fitting
// ---------------------------------------------------------------------------

/// Sample pairs (x_k, y_k) with y in [0, 1] (arccos-encodable).
struct DataSet {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
    void validate() const;
};

/// CSV with header x,y.
DataSet dataset_from_csv(const std::string& text);
std::string dataset_to_csv(const DataSet& data);

/// Forged amplification problem for one component of frequency n with
/// steerable phase registers of r_qubits/s_qubits qubits. Data is
/// constant-encoded: x_k as argument angles, arccos(2 y_k - 1) as reference
/// angles, sharing eigenstate k.
struct ForgedProblem {
    AmplificationProblem problem; // working (unpadded) comparison state
    std::vector<cplx> phi_padded; // idle-padded state, the QSM-dual form
    long long n = 1;
    int r_qubits = 0;
    int s_qubits = 0;
    int x_qubits = 0;
    int total_qubits = 0; // r + s + x + 1 (branch) + 2 (ancillae)
    DataSet data;
};

ForgedProblem forge_reference(long long n, const DataSet& data, int r_qubits, int s_qubits,
                              int max_qubits = 26);

/// Quantum similarity measure at fixed phases: QSM = (1/(32K)) sum_k
/// [f(n x_k + s, yhat_k) + f(n x_k + r, yhat_k)], f(a,b) = 2(1-cos(a-b)).
/// Equals the exact |00> ancilla probability of the padded comparison state.
double qsm(long long n, double r, double s, const DataSet& data);

/// The |00> ancilla-pattern probability of the prepared (padded) state at a
/// fixed parameter pair; the formula/circuit duality partner of qsm().
double qsm_state_probability(long long n, double r, double s, const DataSet& data);

struct FitResult {
    std::uint64_t best_state = 0; // parameter eigenstate bits (r bits, s bits)
    std::vector<double> best_r;
    std::vector<double> best_s;
    double qsm = 0.0;
    /// Histogram over parameter eigenstates among shots whose similarity
    /// ancilla read 1 (the good blocks after the comparison cX).
    Histogram histogram;
    std::uint64_t conditioned_shots = 0;
};

/// Forges the reference problem, runs `iterations` amplification rounds,
/// applies the comparison cX and samples (parameter registers, similarity
/// ancilla). The modal conditioned parameter state is decoded into phases.
FitResult curve_fit(const DataSet& data, int components, int phase_resolution, int iterations,
                    std::uint64_t shots, std::uint64_t seed, long long n = 1);

std::string fit_result_to_json_text(const FitResult& fit, const std::string& histogram_csv_path);

} // namespace qcosamp
