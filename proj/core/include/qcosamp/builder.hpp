#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcosamp/circuit.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp {

// ---------------------------------------------------------------------------
// Encodings
// ---------------------------------------------------------------------------

/// Value baked into gate angles at build time.
struct Direct {
    double value = 0.0;
};

/// A table of angles written onto a register of register_qubits qubits in
/// uniform superposition; missing slots are padded with angle 0.
struct ConstantData {
    std::vector<double> values;
    int register_qubits = 0;
};

/// Value read from a quantum register at run time. Frequency registers
/// encode integers n = sum n_k 2^k; phase and argument registers encode
/// reals x = -pi + sum pi*x_j/2^j.
struct Steerable {
    int register_qubits = 0;
};

using EncodingMode = std::variant<Direct, ConstantData, Steerable>;

/// Bits b_0..b_{Q-1} (listed-qubit order) for the closest grid point to a
/// phase in [-pi, pi); inverse of decode_phase_bits.
std::uint64_t encode_phase_bits(double phase, int qubits);
double decode_phase_bits(std::uint64_t bits, int qubits);
/// Grid point v of the 2^Q-point uniform grid over [-pi, pi).
double phase_grid_value(std::uint64_t v, int qubits);

// ---------------------------------------------------------------------------
// Component and tree specification
// ---------------------------------------------------------------------------

/// One harmonic leaf: frequency n with two phase offsets r and s.
struct ComponentSpec {
    EncodingMode frequency = Direct{1.0};
    EncodingMode phase_r = Direct{0.0};
    EncodingMode phase_s = Direct{0.0};
};

/// Full binary tree of component leaves; internal nodes are connections.
struct TreeNode {
    int leaf = -1;
    std::unique_ptr<TreeNode> left, right;

    bool is_leaf() const { return leaf >= 0; }
    static std::unique_ptr<TreeNode> make_leaf(int index);
    static std::unique_ptr<TreeNode> make_node(std::unique_ptr<TreeNode> l,
                                               std::unique_ptr<TreeNode> r);
    std::unique_ptr<TreeNode> clone() const;
};

struct QCoSampSpec {
    std::vector<ComponentSpec> components;
    std::unique_ptr<TreeNode> tree; // defaults to a left-deep... see canonical_tree
    EncodingMode argument = Direct{0.0};

    QCoSampSpec() = default;
    QCoSampSpec(const QCoSampSpec& other);
    QCoSampSpec& operator=(const QCoSampSpec& other);
    QCoSampSpec(QCoSampSpec&&) = default;
    QCoSampSpec& operator=(QCoSampSpec&&) = default;

    /// Leaf count; throws SchemaError if the tree and component list disagree.
    int component_count() const;
    /// Depth of each leaf in component order.
    std::vector<int> depths() const;
    int height() const;
    bool balanced() const;
};

/// Perfect tree when the count is a power of two, otherwise the flattest
/// full binary tree (recursive halving).
std::unique_ptr<TreeNode> canonical_tree(int leaf_count);

/// Exact-rational check of sum over leaves of 1/2^depth == 1; true for every
/// full binary tree.
bool tree_sum_check(const QCoSampSpec& spec);
bool tree_sum_check(const TreeNode& root);

// ---------------------------------------------------------------------------
// Normalization bookkeeping
// ---------------------------------------------------------------------------

struct NormalizationInfo {
    /// Pre-measurement factor 1/sqrt(2^{2N} * 2^X * 2): ancilla pairs, the
    /// argument register (when superposed) and the interference stage.
    double lambda = 0.0;
    std::vector<int> depth;  // delta_n per component
    std::vector<double> tau; // appearance factor 2^{2N-2} * 2^X / M_n
    std::vector<double> L;   // post-measurement factor 4 * 2^{delta_n}
    bool balanced = false;
};

NormalizationInfo normalization(const QCoSampSpec& spec);

// ---------------------------------------------------------------------------
// Register layout of an assembled operator
// ---------------------------------------------------------------------------

struct ComponentRegisters {
    std::vector<int> n_register; // empty unless steerable
    std::vector<int> r_register;
    std::vector<int> s_register;
    int c1 = -1;
    int c2 = -1;
};

struct RegisterLayout {
    std::vector<ComponentRegisters> components;
    std::vector<int> x_register; // constant-data or steerable argument
    int total_qubits = 0;
    int measured_qubit = -1; // last ancilla
    /// All ancilla qubits in coordinate order (first component's c1 is the
    /// most significant of the ancilla coordinate index).
    std::vector<int> ancillae;
};

struct AssembleOptions {
    /// Put the argument register into uniform superposition (quantum
    /// summation / integration mode). Requires a steerable argument.
    bool uniform_argument = false;
    /// Fix a steerable argument register to a basis value before evolution.
    std::optional<std::uint64_t> argument_basis_value;
    /// Per-component basis values for steerable n/r/s registers,
    /// (component, register kind 'n'|'r'|'s', bits).
    struct RegisterInit {
        int component = 0;
        char which = 'r';
        std::uint64_t bits = 0;
    };
    std::vector<RegisterInit> register_inits;
    /// Refuse circuits wider than this many qubits.
    int max_qubits = 26;
};

struct AssembledOperator {
    Circuit circuit; // preparation + H^- tree + interference
    RegisterLayout layout;
    NormalizationInfo norm;
};

/// Full tree of component and connection stages followed by the interference
/// stage on the last ancilla. Measuring that ancilla yields
/// P(0) = sum_n [(1+cos(n x + r_n))/L_n + (1+cos(n x + s_n))/L_n].
AssembledOperator assemble(const QCoSampSpec& spec, const AssembleOptions& opts = {});

// ---------------------------------------------------------------------------
// Stand-alone operator builders
// ---------------------------------------------------------------------------

/// One-ancilla base of computation H R_x^n R_p H; P(0) = (1+cos(n x + p))/2.
Circuit bc_operator(long long n, double x, double p, bool gate_saving = true);

struct CpcOperator {
    Circuit circuit;
    std::vector<int> x_register; // empty in direct mode
    int c1 = -1;
    int c2 = -1;
};

/// Two-ancilla constant-parameters component, interference included.
/// Direct x: P(c2=0) = nu_n(x) with per-branch factor 4. Constant-data x:
/// P(c2=0) = the uniform grid mean of nu_n over the encoded angles.
CpcOperator cpc_operator(long long n, const EncodingMode& x_mode, double r, double s);

/// (1/sqrt(2^K)) e^{i eps_k}|k>: Hadamards then diagonal phases via
/// twice_permuted_controlled.
Circuit constant_encode(const std::vector<double>& values, int register_qubits);

/// Argument-and-phase steering: basis inputs (p, x) produce
/// (|PX0> + e^{i(x+p)}|PX1>)/sqrt(2); one leading Hadamard on the ancilla.
Circuit aps_operator(int total_qubits, const std::vector<int>& p_register,
                     const std::vector<int>& x_register, int ancilla);

/// Fully steerable form: adds a frequency register,
/// (|NPX0> + e^{i(n x + p)}|NPX1>)/sqrt(2).
Circuit fs_operator(int total_qubits, const std::vector<int>& n_register,
                    const std::vector<int>& p_register, const std::vector<int>& x_register,
                    int ancilla, bool gate_saving = true);

struct CmpnOperator {
    Circuit circuit; // H^- form: interference NOT included
    RegisterLayout layout;
};

/// Single component in kicked-back form over layout
/// [n-reg][r-reg][s-reg][x-reg][c1][c2]; appending H on c2 and measuring c2
/// yields nu_n(x).
CmpnOperator cmpn_operator(const ComponentSpec& comp, const EncodingMode& x_mode);

// ---------------------------------------------------------------------------
// Connection stage (exposed for direct verification)
// ---------------------------------------------------------------------------

/// Classification of one ancilla coordinate of an H^- subtree state:
/// unit (coordinate 1 before normalization) or a single phase term
/// e^{i(n x + p)} owned by (component, branch).
struct CoordTag {
    bool unit = true;
    int component = -1;
    bool is_r = false;
};

struct SubtreeBlock {
    std::vector<int> ancillae;  // coordinate order, MSB first
    std::vector<CoordTag> tags; // size 2^|ancillae|
};

/// Register layout for a spec without assembling (custom builds and tests).
RegisterLayout make_register_layout(const QCoSampSpec& spec, int max_qubits = 26);

/// Emits the H^- form of one component into `circuit` (ancilla Hadamards,
/// kickback cascades, doubled-frequency un-computation) and returns its
/// block.
SubtreeBlock leaf_block(Circuit& circuit, const QCoSampSpec& spec, const RegisterLayout& layout,
                        int component);

/// Emits the connection un-computation for two sibling H^- blocks into
/// `circuit` (multi-controlled phases cancelling every two-term coordinate)
/// and returns the merged block. Children must not share ancillae.
SubtreeBlock connect(Circuit& circuit, const QCoSampSpec& spec, const RegisterLayout& layout,
                     const SubtreeBlock& left, const SubtreeBlock& right);

// ---------------------------------------------------------------------------
// Two-dimensional composition
// ---------------------------------------------------------------------------

struct Composed2D {
    Circuit circuit;
    RegisterLayout layout_a;
    RegisterLayout layout_b;
    int measured_a = -1;
    int measured_b = -1;
};

/// Tensor composition of two assembled operators on disjoint registers;
/// P(00) over the two measured ancillae is the product of the operands'
/// P(0) values.
Composed2D compose_2d(const QCoSampSpec& a, const QCoSampSpec& b,
                      const AssembleOptions& opts_a = {}, const AssembleOptions& opts_b = {});

// ---------------------------------------------------------------------------
// Spec file format
// ---------------------------------------------------------------------------

/// JSON document {components: [{n, r, s}], tree: nested pairs,
/// argument: {mode, qubits?, value?, values?}}; see docs in README.
QCoSampSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const QCoSampSpec& spec);

/// Closed-form FCoSamp value for direct-encoding specs (the analytic
/// reference every circuit is checked against).
double closed_form_mu(const QCoSampSpec& spec, double x);

} // namespace qcosamp
