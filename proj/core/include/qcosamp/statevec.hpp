#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace qcosamp {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Structural identities hold to 1e-12, composed-circuit numerics to 1e-10,
/// shot statistics to 5 sigma binomial bounds.
inline constexpr double kTolStructural = 1e-12;
inline constexpr double kTolComposed = 1e-10;

/// Dense complex amplitude array over 2^Q basis states. Qubit 0 is the most
/// significant bit of the basis index, so ket strings read left to right.
class StateVector {
public:
    explicit StateVector(int qubit_count);
    StateVector(int qubit_count, std::vector<cplx> amplitudes);

    int qubit_count() const { return qubit_count_; }
    std::uint64_t dim() const { return std::uint64_t{1} << qubit_count_; }

    cplx& amp(std::uint64_t basis_index) { return amps_[basis_index]; }
    const cplx& amp(std::uint64_t basis_index) const { return amps_[basis_index]; }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }

    double norm_sq() const;
    /// Throws NumericError if the norm drifted beyond tol from 1.
    void check_normalized(double tol = kTolStructural) const;

    /// Tensor product: this (high qubits) with other (low qubits).
    StateVector tensor(const StateVector& other) const;

private:
    int qubit_count_;
    std::vector<cplx> amps_;
};

/// Amplitude 1 at basis_index, 0 elsewhere.
StateVector new_basis_state(int qubit_count, std::uint64_t basis_index);

/// Counter-based seedable generator (splitmix64) so histograms reproduce
/// bit-exactly across platforms. Stream i of a master seed is
/// splitmix64 seeded with mix(seed, i); each next() advances one counter step.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derive an independent stream from a master seed by stream index.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double next_double();

private:
    std::uint64_t state_;
};

/// Map from measured eigenstate bit pattern to count. Outcome bits follow
/// the order of the measured-qubit list (first listed qubit = MSB).
struct Histogram {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::map<std::uint64_t, std::uint64_t> counts;
};

/// Outcome probabilities for a subset of qubits: entry k is the summed
/// |amplitude|^2 over all basis states consistent with outcome k.
/// Probabilities sum to 1 within 1e-12. Throws on an empty subset.
std::vector<double> measure_probabilities(const StateVector& state,
                                          const std::vector<int>& measured_qubits);

/// I.i.d. shots from measure_probabilities; deterministic for a fixed seed.
Histogram sample(const StateVector& state, const std::vector<int>& measured_qubits,
                 std::uint64_t shots, std::uint64_t seed);

} // namespace qcosamp
