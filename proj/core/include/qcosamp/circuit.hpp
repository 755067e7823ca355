#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qcosamp/statevec.hpp"

namespace qcosamp {

enum class GateKind {
    Identity,
    Hadamard,
    PhaseShift, // diag(1, e^{i angle}) on the target qubit
    PauliX,
    PauliZ,
    Permutation, // reorder of basis indices over a qubit subset
};

/// One primitive gate application. For single-qubit kinds, `target` names the
/// acted-on qubit and `controls` lists qubits that must all read 1. For
/// Permutation, `perm_qubits` spans the permuted subspace and `perm` maps
/// local source index -> local destination index (amplitudes move, values
/// unchanged).
struct GateApplication {
    GateKind kind = GateKind::Identity;
    double angle = 0.0;
    int target = 0;
    std::vector<int> controls;

    std::vector<int> perm_qubits;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> perm;

    static GateApplication h(int target, std::vector<int> controls = {});
    static GateApplication x(int target, std::vector<int> controls = {});
    static GateApplication z(int target, std::vector<int> controls = {});
    static GateApplication phase(double angle, int target, std::vector<int> controls = {});
};

/// Ordering operator: a partial two-line permutation of basis indices over a
/// qubit subset. Unlisted local indices are identity. Throws on a
/// non-injective map.
GateApplication ordering_operator(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& two_line,
    const std::vector<int>& qubits);

/// Ordered list of primitive gate applications over a fixed-width register.
class Circuit {
public:
    explicit Circuit(int qubit_count) : qubit_count_(qubit_count) {}

    int qubit_count() const { return qubit_count_; }
    const std::vector<GateApplication>& ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }

    Circuit& add(GateApplication g);
    Circuit& append(const Circuit& other);
    /// Append other's ops with its qubit i mapped to qubit_map[i].
    Circuit& append_mapped(const Circuit& other, const std::vector<int>& qubit_map);

    StateVector run(StateVector state) const;
    StateVector run_from_zero() const;

private:
    int qubit_count_;
    std::vector<GateApplication> ops_;
};

/// Validates g against the register width and applies it in place in
/// O(2^Q) by strided index iteration; norm preserved.
void apply(StateVector& state, const GateApplication& g);

/// Diagonal circuit multiplying exactly the listed basis coordinates by the
/// listed unit-modulus values: involutory ordering, (Phi-1)-controlled phase
/// block, same ordering again. Requires |targets| <= 2^(Phi-1), distinct
/// coordinates and unit-modulus values.
Circuit twice_permuted_controlled(int qubit_count,
                                  const std::vector<std::uint64_t>& target_coords,
                                  const std::vector<cplx>& values);

/// Phase e^{i angle} on every basis state matching the required bit
/// conditions; zero-valued conditions are X-wrapped multi-controls. Exact
/// full turns emit nothing. At least one condition must require a 1.
void add_pattern_phase(Circuit& c, double angle,
                       const std::vector<std::pair<int, bool>>& conditions);

/// Uniform-magnitude state whose coordinate at eigenstate k carries phase
/// 2*pi*value*k/2^qubits (binary-fraction phase distribution).
StateVector qft_phase_encode(std::uint64_t register_value, int register_qubits);
Circuit qft_phase_encode_circuit(std::uint64_t register_value, int register_qubits);

/// Kickback test bench: ancilla prepared in |1>, H - controlled-U - H with
/// U|u> = e^{i phase}|u>. Returns exact (p0, p1) = ((1-cos)/2, (1+cos)/2).
std::pair<double, double> hadamard_test(double phase);

} // namespace qcosamp
