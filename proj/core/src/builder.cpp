#include "qcosamp/builder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcosamp/errors.hpp"

namespace qcosamp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Phase/frequency bit conventions
// ---------------------------------------------------------------------------

double phase_grid_value(std::uint64_t v, int qubits) {
    return -kPi + 2.0 * kPi * static_cast<double>(v) /
                      static_cast<double>(std::uint64_t{1} << qubits);
}

std::uint64_t encode_phase_bits(double phase, int qubits) {
    const double dim = static_cast<double>(std::uint64_t{1} << qubits);
    double v = std::round((phase + kPi) * dim / (2.0 * kPi));
    const std::uint64_t mask = (std::uint64_t{1} << qubits) - 1;
    return static_cast<std::uint64_t>(v) & mask;
}

double decode_phase_bits(std::uint64_t bits, int qubits) {
    return phase_grid_value(bits, qubits);
}

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

std::unique_ptr<TreeNode> TreeNode::make_leaf(int index) {
    auto n = std::make_unique<TreeNode>();
    n->leaf = index;
    return n;
}

std::unique_ptr<TreeNode> TreeNode::make_node(std::unique_ptr<TreeNode> l,
                                              std::unique_ptr<TreeNode> r) {
    if (!l || !r) throw SchemaError("connection node requires exactly two children");
    auto n = std::make_unique<TreeNode>();
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

std::unique_ptr<TreeNode> TreeNode::clone() const {
    if (is_leaf()) return make_leaf(leaf);
    return make_node(left->clone(), right->clone());
}

std::unique_ptr<TreeNode> canonical_tree(int leaf_count) {
    if (leaf_count < 1) throw SchemaError("need at least one component");
    struct Builder {
        int next = 0;
        std::unique_ptr<TreeNode> build(int count) {
            if (count == 1) return TreeNode::make_leaf(next++);
            const int left = (count + 1) / 2;
            auto l = build(left);
            auto r = build(count - left);
            return TreeNode::make_node(std::move(l), std::move(r));
        }
    } b;
    return b.build(leaf_count);
}

QCoSampSpec::QCoSampSpec(const QCoSampSpec& other)
    : components(other.components),
      tree(other.tree ? other.tree->clone() : nullptr),
      argument(other.argument) {}

QCoSampSpec& QCoSampSpec::operator=(const QCoSampSpec& other) {
    if (this != &other) {
        components = other.components;
        tree = other.tree ? other.tree->clone() : nullptr;
        argument = other.argument;
    }
    return *this;
}

namespace {

void collect_leaves(const TreeNode& node, int depth, std::vector<std::pair<int, int>>& out) {
    if (node.is_leaf()) {
        out.emplace_back(node.leaf, depth);
        return;
    }
    collect_leaves(*node.left, depth + 1, out);
    collect_leaves(*node.right, depth + 1, out);
}

/// Leaf indices in traversal order with depths; validates that every
/// component appears exactly once.
std::vector<std::pair<int, int>> leaves_of(const QCoSampSpec& spec) {
    if (spec.components.empty()) throw SchemaError("spec has no components");
    std::vector<std::pair<int, int>> leaves;
    if (spec.tree) {
        collect_leaves(*spec.tree, 0, leaves);
    } else {
        auto t = canonical_tree(static_cast<int>(spec.components.size()));
        collect_leaves(*t, 0, leaves);
    }
    if (leaves.size() != spec.components.size()) {
        throw SchemaError("tree has " + std::to_string(leaves.size()) + " leaves for " +
                          std::to_string(spec.components.size()) + " components");
    }
    std::set<int> seen;
    for (const auto& [idx, depth] : leaves) {
        if (idx < 0 || idx >= static_cast<int>(spec.components.size()) ||
            !seen.insert(idx).second) {
            throw SchemaError("tree leaves must name each component exactly once");
        }
    }
    return leaves;
}

} // namespace

int QCoSampSpec::component_count() const {
    return static_cast<int>(leaves_of(*this).size());
}

std::vector<int> QCoSampSpec::depths() const {
    std::vector<int> d(components.size(), 0);
    for (const auto& [idx, depth] : leaves_of(*this)) d[idx] = depth;
    return d;
}

int QCoSampSpec::height() const {
    int h = 0;
    for (int d : depths()) h = std::max(h, d);
    return h;
}

bool QCoSampSpec::balanced() const {
    const auto d = depths();
    return std::all_of(d.begin(), d.end(), [&](int x) { return x == d.front(); });
}

bool tree_sum_check(const TreeNode& root) {
    std::vector<std::pair<int, int>> leaves;
    collect_leaves(root, 0, leaves);
    int h = 0;
    for (const auto& [idx, d] : leaves) h = std::max(h, d);
    if (h > 120) throw GuardrailError("tree too deep for exact rational check");
    unsigned __int128 sum = 0;
    const unsigned __int128 whole = static_cast<unsigned __int128>(1) << h;
    for (const auto& [idx, d] : leaves) {
        sum += static_cast<unsigned __int128>(1) << (h - d);
    }
    return sum == whole;
}

bool tree_sum_check(const QCoSampSpec& spec) {
    if (spec.tree) return tree_sum_check(*spec.tree);
    auto t = canonical_tree(static_cast<int>(spec.components.size()));
    return tree_sum_check(*t);
}

// ---------------------------------------------------------------------------
// Encoding sources
// ---------------------------------------------------------------------------

namespace {

struct FreqSrc {
    bool direct = true;
    long long n = 0;
    const std::vector<int>* reg = nullptr;
};

struct AngleSrc {
    bool direct = true;
    double p = 0.0;
    const std::vector<int>* reg = nullptr;
};

struct ArgSrc {
    enum Kind { kDirect, kConstant, kSteerable } kind = kDirect;
    double x = 0.0;
    const std::vector<int>* reg = nullptr;
    std::vector<double> table;
};

FreqSrc freq_src(const EncodingMode& m, const std::vector<int>& reg) {
    if (const auto* d = std::get_if<Direct>(&m)) {
        const long long n = std::llround(d->value);
        if (n < 0 || std::abs(d->value - static_cast<double>(n)) > 1e-9) {
            throw SchemaError("direct frequency must be a nonnegative integer");
        }
        return {true, n, nullptr};
    }
    if (std::get_if<Steerable>(&m)) return {false, 0, &reg};
    throw SchemaError("constant-data encoding is not defined for frequencies");
}

AngleSrc angle_src(const EncodingMode& m, const std::vector<int>& reg) {
    if (const auto* d = std::get_if<Direct>(&m)) {
        if (!std::isfinite(d->value) || d->value < -kPi - 1e-12 || d->value > kPi + 1e-12) {
            throw SchemaError("direct phases must lie in [-pi, pi]");
        }
        return {true, d->value, nullptr};
    }
    if (std::get_if<Steerable>(&m)) return {false, 0.0, &reg};
    throw SchemaError("constant-data encoding is not defined for component phases");
}

ArgSrc arg_src(const EncodingMode& m, const std::vector<int>& reg) {
    ArgSrc s;
    if (const auto* d = std::get_if<Direct>(&m)) {
        if (!std::isfinite(d->value)) throw SchemaError("argument must be finite");
        s.kind = ArgSrc::kDirect;
        s.x = d->value;
        return s;
    }
    if (const auto* c = std::get_if<ConstantData>(&m)) {
        const std::uint64_t dim = std::uint64_t{1} << c->register_qubits;
        if (c->values.size() > dim) {
            throw SchemaError("constant-data table exceeds register capacity");
        }
        s.kind = ArgSrc::kConstant;
        s.reg = &reg;
        s.table = c->values;
        s.table.resize(dim, 0.0); // missing slots carry angle 0
        return s;
    }
    s.kind = ArgSrc::kSteerable;
    s.reg = &reg;
    return s;
}

using Conds = std::vector<std::pair<int, bool>>;

void emit_mc_phase(Circuit& c, double angle, const Conds& conds) {
    add_pattern_phase(c, angle, conds);
}

Conds with(Conds conds, int qubit, bool val = true) {
    conds.emplace_back(qubit, val);
    return conds;
}

/// Required-bit conditions putting a register at eigenstate e (read
/// MSB-first in listed order).
Conds register_pattern(Conds conds, const std::vector<int>& reg, std::uint64_t e) {
    const int n = static_cast<int>(reg.size());
    for (int j = 0; j < n; ++j) {
        conds.emplace_back(reg[j], ((e >> (n - 1 - j)) & 1u) != 0);
    }
    return conds;
}

/// Phase-offset contribution mult * p conditioned on `conds`.
void emit_angle(Circuit& c, const AngleSrc& src, double mult, const Conds& conds) {
    if (src.direct) {
        emit_mc_phase(c, mult * src.p, conds);
        return;
    }
    const auto& reg = *src.reg;
    emit_mc_phase(c, mult * -kPi, conds);
    for (std::size_t j = 0; j < reg.size(); ++j) {
        emit_mc_phase(c, mult * kPi / static_cast<double>(std::uint64_t{1} << j),
                      with(conds, reg[j]));
    }
}

/// Harmonic contribution mult * n * x conditioned on `conds`, for every
/// combination of direct, constant-data and steerable sources.
void emit_freq_arg(Circuit& c, const FreqSrc& f, const ArgSrc& a, double mult,
                   const Conds& conds) {
    auto for_each_freq = [&](auto&& body) {
        if (f.direct) {
            body(static_cast<double>(f.n), conds);
        } else {
            const auto& reg = *f.reg;
            for (std::size_t k = 0; k < reg.size(); ++k) {
                body(static_cast<double>(std::uint64_t{1} << k), with(conds, reg[k]));
            }
        }
    };
    switch (a.kind) {
        case ArgSrc::kDirect:
            for_each_freq([&](double n, const Conds& cd) {
                emit_mc_phase(c, mult * n * a.x, cd);
            });
            return;
        case ArgSrc::kConstant: {
            const auto& reg = *a.reg;
            for_each_freq([&](double n, const Conds& cd) {
                for (std::uint64_t e = 0; e < a.table.size(); ++e) {
                    emit_mc_phase(c, mult * n * a.table[e], register_pattern(cd, reg, e));
                }
            });
            return;
        }
        case ArgSrc::kSteerable: {
            const auto& reg = *a.reg;
            for_each_freq([&](double n, const Conds& cd) {
                emit_mc_phase(c, mult * n * -kPi, cd);
                for (std::size_t j = 0; j < reg.size(); ++j) {
                    emit_mc_phase(c, mult * n * kPi / static_cast<double>(std::uint64_t{1} << j),
                                  with(cd, reg[j]));
                }
            });
            return;
        }
    }
}

struct Sources {
    FreqSrc f;
    AngleSrc r;
    AngleSrc s;
    ArgSrc x;
};

Sources component_sources(const QCoSampSpec& spec, const RegisterLayout& layout, int i) {
    const auto& comp = spec.components[i];
    const auto& regs = layout.components[i];
    Sources out;
    out.f = freq_src(comp.frequency, regs.n_register);
    out.r = angle_src(comp.phase_r, regs.r_register);
    out.s = angle_src(comp.phase_s, regs.s_register);
    out.x = arg_src(spec.argument, layout.x_register);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

namespace {

int encoding_register_size(const EncodingMode& m) {
    if (const auto* c = std::get_if<ConstantData>(&m)) return c->register_qubits;
    if (const auto* s = std::get_if<Steerable>(&m)) return s->register_qubits;
    return 0;
}

} // namespace

RegisterLayout make_register_layout(const QCoSampSpec& spec, int max_qubits) {
    RegisterLayout layout;
    layout.components.resize(spec.components.size());
    int next = 0;
    auto take = [&](int count, const std::string& name) {
        std::vector<int> reg(count);
        for (int k = 0; k < count; ++k) reg[k] = next++;
        if (next > max_qubits) {
            throw GuardrailError("operator needs " + std::to_string(next) +
                                 " qubits, over the " + std::to_string(max_qubits) +
                                 "-qubit limit (crossed while adding " + name + ")");
        }
        return reg;
    };
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& comp = spec.components[i];
        const std::string tag = "component " + std::to_string(i);
        layout.components[i].n_register =
            take(encoding_register_size(comp.frequency), tag + " n-register");
        layout.components[i].r_register =
            take(encoding_register_size(comp.phase_r), tag + " r-register");
        layout.components[i].s_register =
            take(encoding_register_size(comp.phase_s), tag + " s-register");
    }
    layout.x_register = take(encoding_register_size(spec.argument), "argument register");

    // Ancilla pairs follow tree traversal order so the measured ancilla is
    // the last qubit.
    const auto leaves = leaves_of(spec);
    for (const auto& [idx, depth] : leaves) {
        const auto pair = take(2, "ancilla pair of component " + std::to_string(idx));
        layout.components[idx].c1 = pair[0];
        layout.components[idx].c2 = pair[1];
        layout.ancillae.push_back(pair[0]);
        layout.ancillae.push_back(pair[1]);
    }
    layout.total_qubits = next;
    layout.measured_qubit = layout.ancillae.back();
    return layout;
}

// ---------------------------------------------------------------------------
// Leaf and connection emission
// ---------------------------------------------------------------------------

SubtreeBlock leaf_block(Circuit& c, const QCoSampSpec& spec, const RegisterLayout& layout,
                        int component) {
    const auto& regs = layout.components[component];
    const Sources src = component_sources(spec, layout, component);

    c.add(GateApplication::h(regs.c1));
    c.add(GateApplication::h(regs.c2));
    emit_angle(c, src.r, 1.0, {{regs.c1, true}});
    emit_freq_arg(c, src.f, src.x, 1.0, {{regs.c1, true}});
    emit_angle(c, src.s, 1.0, {{regs.c2, true}});
    emit_freq_arg(c, src.f, src.x, 1.0, {{regs.c2, true}});

    // Un-computation of the doubled-frequency |11> coordinate.
    const Conds both = {{regs.c1, true}, {regs.c2, true}};
    emit_angle(c, src.r, -1.0, both);
    emit_angle(c, src.s, -1.0, both);
    emit_freq_arg(c, src.f, src.x, -2.0, both);

    SubtreeBlock block;
    block.ancillae = {regs.c1, regs.c2};
    block.tags.resize(4);
    block.tags[0] = {true, -1, false};
    block.tags[1] = {false, component, false}; // s branch on |01>
    block.tags[2] = {false, component, true};  // r branch on |10>
    block.tags[3] = {true, -1, false};
    return block;
}

namespace {

void uncompute_term(Circuit& c, const QCoSampSpec& spec, const RegisterLayout& layout,
                    const CoordTag& tag, const Conds& conds) {
    const Sources src = component_sources(spec, layout, tag.component);
    emit_angle(c, tag.is_r ? src.r : src.s, -1.0, conds);
    emit_freq_arg(c, src.f, src.x, -1.0, conds);
}

} // namespace

SubtreeBlock connect(Circuit& circuit, const QCoSampSpec& spec, const RegisterLayout& layout,
                     const SubtreeBlock& left, const SubtreeBlock& right) {
    for (int qa : left.ancillae) {
        for (int qb : right.ancillae) {
            if (qa == qb) throw std::invalid_argument("connected children share an ancilla");
        }
    }
    SubtreeBlock merged;
    merged.ancillae = left.ancillae;
    merged.ancillae.insert(merged.ancillae.end(), right.ancillae.begin(),
                           right.ancillae.end());
    const std::size_t la = left.tags.size(), lb = right.tags.size();
    merged.tags.resize(la * lb);
    for (std::size_t a = 0; a < la; ++a) {
        for (std::size_t b = 0; b < lb; ++b) {
            const CoordTag& ta = left.tags[a];
            const CoordTag& tb = right.tags[b];
            CoordTag& out = merged.tags[a * lb + b];
            if (ta.unit && tb.unit) {
                out = {true, -1, false};
            } else if (ta.unit) {
                out = tb;
            } else if (tb.unit) {
                out = ta;
            } else {
                // Two-term coordinate: cancel both phases, leaving a unit.
                Conds conds;
                for (std::size_t k = 0; k < left.ancillae.size(); ++k) {
                    conds.emplace_back(left.ancillae[k],
                                       ((a >> (left.ancillae.size() - 1 - k)) & 1u) != 0);
                }
                for (std::size_t k = 0; k < right.ancillae.size(); ++k) {
                    conds.emplace_back(right.ancillae[k],
                                       ((b >> (right.ancillae.size() - 1 - k)) & 1u) != 0);
                }
                uncompute_term(circuit, spec, layout, ta, conds);
                uncompute_term(circuit, spec, layout, tb, conds);
                out = {true, -1, false};
            }
        }
    }
    return merged;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

NormalizationInfo normalization(const QCoSampSpec& spec) {
    NormalizationInfo info;
    info.depth = spec.depths();
    const int n_components = static_cast<int>(spec.components.size());
    const int x_qubits = encoding_register_size(spec.argument);
    info.lambda = 1.0 / std::sqrt(std::pow(2.0, 2 * n_components) * std::pow(2.0, x_qubits) * 2.0);
    info.balanced = spec.balanced();
    for (int d : info.depth) {
        const double m = std::pow(2.0, d);
        info.tau.push_back(std::pow(2.0, 2 * n_components - 2) * std::pow(2.0, x_qubits) / m);
        info.L.push_back(4.0 * m);
    }
    return info;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

SubtreeBlock build_tree(Circuit& c, const QCoSampSpec& spec, const RegisterLayout& layout,
                        const TreeNode& node) {
    if (node.is_leaf()) return leaf_block(c, spec, layout, node.leaf);
    SubtreeBlock l = build_tree(c, spec, layout, *node.left);
    SubtreeBlock r = build_tree(c, spec, layout, *node.right);
    return connect(c, spec, layout, l, r);
}

/// Phase/argument registers read their eigenstate index MSB-first in listed
/// order; frequency registers read bit k at listed qubit k (weight 2^k).
void prep_register_bits(Circuit& c, const std::vector<int>& reg, std::uint64_t bits,
                        bool little_endian = false) {
    const int n = static_cast<int>(reg.size());
    for (int j = 0; j < n; ++j) {
        const int bit = little_endian ? j : n - 1 - j;
        if ((bits >> bit) & 1u) c.add(GateApplication::x(reg[j]));
    }
}

} // namespace

AssembledOperator assemble(const QCoSampSpec& spec, const AssembleOptions& opts) {
    RegisterLayout layout = make_register_layout(spec, opts.max_qubits);

    Circuit c(layout.total_qubits);

    // Input preparation.
    const bool steerable_arg = std::holds_alternative<Steerable>(spec.argument);
    const bool constant_arg = std::holds_alternative<ConstantData>(spec.argument);
    if (opts.uniform_argument) {
        if (!steerable_arg) {
            throw SchemaError("uniform argument preparation requires a steerable argument");
        }
        for (int q : layout.x_register) c.add(GateApplication::h(q));
    } else if (opts.argument_basis_value) {
        if (!steerable_arg) {
            throw SchemaError("argument basis value requires a steerable argument");
        }
        prep_register_bits(c, layout.x_register, *opts.argument_basis_value);
    }
    if (constant_arg) {
        for (int q : layout.x_register) c.add(GateApplication::h(q));
    }
    for (const auto& init : opts.register_inits) {
        if (init.component < 0 || init.component >= static_cast<int>(spec.components.size())) {
            throw SchemaError("register init names a missing component");
        }
        const auto& regs = layout.components[init.component];
        const std::vector<int>* reg = init.which == 'n'   ? &regs.n_register
                                      : init.which == 'r' ? &regs.r_register
                                                          : &regs.s_register;
        if (reg->empty()) throw SchemaError("register init targets a non-steerable element");
        prep_register_bits(c, *reg, init.bits, init.which == 'n');
    }

    // H^- tree, then interference on the last ancilla.
    const auto tree = spec.tree ? spec.tree->clone()
                                : canonical_tree(static_cast<int>(spec.components.size()));
    build_tree(c, spec, layout, *tree);
    c.add(GateApplication::h(layout.measured_qubit));

    return {std::move(c), std::move(layout), normalization(spec)};
}

// ---------------------------------------------------------------------------
// Stand-alone operators
// ---------------------------------------------------------------------------

Circuit bc_operator(long long n, double x, double p, bool gate_saving) {
    if (n < 0) throw SchemaError("frequency must be nonnegative");
    Circuit c(1);
    c.add(GateApplication::h(0));
    c.add(GateApplication::phase(std::remainder(p, 2.0 * kPi), 0));
    if (gate_saving) {
        c.add(GateApplication::phase(std::remainder(static_cast<double>(n) * x, 2.0 * kPi), 0));
    } else {
        for (long long k = 0; k < n; ++k) {
            c.add(GateApplication::phase(std::remainder(x, 2.0 * kPi), 0));
        }
    }
    c.add(GateApplication::h(0));
    return c;
}

CpcOperator cpc_operator(long long n, const EncodingMode& x_mode, double r, double s) {
    if (std::holds_alternative<Steerable>(x_mode)) {
        throw SchemaError("steerable arguments take the component operator, not the CPC");
    }
    QCoSampSpec spec;
    spec.components.push_back({Direct{static_cast<double>(n)}, Direct{r}, Direct{s}});
    spec.tree = TreeNode::make_leaf(0);
    spec.argument = x_mode;
    AssembledOperator op = assemble(spec);
    return {std::move(op.circuit), op.layout.x_register, op.layout.components[0].c1,
            op.layout.components[0].c2};
}

Circuit constant_encode(const std::vector<double>& values, int register_qubits) {
    const std::uint64_t dim = std::uint64_t{1} << register_qubits;
    if (values.size() > dim) {
        throw std::invalid_argument("register of " + std::to_string(register_qubits) +
                                    " qubits cannot hold " + std::to_string(values.size()) +
                                    " values");
    }
    Circuit c(register_qubits);
    for (int q = 0; q < register_qubits; ++q) c.add(GateApplication::h(q));
    for (std::uint64_t k = 0; k < values.size(); ++k) {
        const double eps = std::remainder(values[k], 2.0 * kPi);
        if (eps == 0.0) continue;
        c.append(twice_permuted_controlled(register_qubits, {k}, {std::polar(1.0, eps)}));
    }
    return c;
}

Circuit aps_operator(int total_qubits, const std::vector<int>& p_register,
                     const std::vector<int>& x_register, int ancilla) {
    for (int q : p_register) {
        for (int w : x_register) {
            if (q == w) throw std::invalid_argument("phase and argument registers overlap");
        }
    }
    Circuit c(total_qubits);
    c.add(GateApplication::h(ancilla));
    AngleSrc x{false, 0.0, &x_register};
    AngleSrc p{false, 0.0, &p_register};
    emit_angle(c, x, 1.0, {{ancilla, true}});
    emit_angle(c, p, 1.0, {{ancilla, true}});
    return c;
}

Circuit fs_operator(int total_qubits, const std::vector<int>& n_register,
                    const std::vector<int>& p_register, const std::vector<int>& x_register,
                    int ancilla, bool gate_saving) {
    std::set<int> used;
    for (const auto* reg : {&n_register, &p_register, &x_register}) {
        for (int q : *reg) {
            if (!used.insert(q).second) {
                throw std::invalid_argument("steerable registers overlap");
            }
        }
    }
    if (used.count(ancilla)) throw std::invalid_argument("ancilla inside a register");

    Circuit c(total_qubits);
    c.add(GateApplication::h(ancilla));
    AngleSrc p{false, 0.0, &p_register};
    emit_angle(c, p, 1.0, {{ancilla, true}});

    FreqSrc f{false, 0, &n_register};
    ArgSrc x;
    x.kind = ArgSrc::kSteerable;
    x.reg = &x_register;
    if (gate_saving) {
        emit_freq_arg(c, f, x, 1.0, {{ancilla, true}});
    } else {
        // k-fold composition form: 2^k copies of the base-angle shifts.
        for (std::size_t k = 0; k < n_register.size(); ++k) {
            const std::uint64_t copies = std::uint64_t{1} << k;
            for (std::uint64_t rep = 0; rep < copies; ++rep) {
                Conds cd = {{ancilla, true}, {n_register[k], true}};
                emit_mc_phase(c, -kPi, cd);
                for (std::size_t j = 0; j < x_register.size(); ++j) {
                    emit_mc_phase(c, kPi / static_cast<double>(std::uint64_t{1} << j),
                                  with(cd, x_register[j]));
                }
            }
        }
    }
    return c;
}

CmpnOperator cmpn_operator(const ComponentSpec& comp, const EncodingMode& x_mode) {
    QCoSampSpec spec;
    spec.components.push_back(comp);
    spec.tree = TreeNode::make_leaf(0);
    spec.argument = x_mode;
    RegisterLayout layout = make_register_layout(spec, 26);
    Circuit c(layout.total_qubits);
    if (std::holds_alternative<ConstantData>(x_mode)) {
        for (int q : layout.x_register) c.add(GateApplication::h(q));
    }
    leaf_block(c, spec, layout, 0);
    return {std::move(c), std::move(layout)};
}

// ---------------------------------------------------------------------------
// 2-D composition
// ---------------------------------------------------------------------------

Composed2D compose_2d(const QCoSampSpec& a, const QCoSampSpec& b, const AssembleOptions& opts_a,
                      const AssembleOptions& opts_b) {
    AssembledOperator oa = assemble(a, opts_a);
    AssembledOperator ob = assemble(b, opts_b);
    const int wa = oa.layout.total_qubits;
    const int wb = ob.layout.total_qubits;
    if (wa + wb > 26) {
        throw GuardrailError("2-D composition needs " + std::to_string(wa + wb) + " qubits");
    }
    Circuit c(wa + wb);
    std::vector<int> map_a(wa), map_b(wb);
    for (int i = 0; i < wa; ++i) map_a[i] = i;
    for (int i = 0; i < wb; ++i) map_b[i] = wa + i;
    c.append_mapped(oa.circuit, map_a);
    c.append_mapped(ob.circuit, map_b);

    Composed2D out{std::move(c), std::move(oa.layout), std::move(ob.layout), 0, 0};
    out.measured_a = out.layout_a.measured_qubit;
    out.measured_b = wa + out.layout_b.measured_qubit;
    return out;
}

// ---------------------------------------------------------------------------
// Closed form
// ---------------------------------------------------------------------------

double closed_form_mu(const QCoSampSpec& spec, double x) {
    const auto depths = spec.depths();
    double mu = 0.0;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto* nf = std::get_if<Direct>(&spec.components[i].frequency);
        const auto* rf = std::get_if<Direct>(&spec.components[i].phase_r);
        const auto* sf = std::get_if<Direct>(&spec.components[i].phase_s);
        if (!nf || !rf || !sf) {
            throw SchemaError("closed form needs direct component encodings");
        }
        const double L = 4.0 * std::pow(2.0, depths[i]);
        mu += (1.0 + std::cos(nf->value * x + rf->value)) / L +
              (1.0 + std::cos(nf->value * x + sf->value)) / L;
    }
    return mu;
}

// ---------------------------------------------------------------------------
// JSON spec format
// ---------------------------------------------------------------------------

namespace {

EncodingMode encoding_from_json(const json& j) {
    if (j.is_number()) return Direct{j.get<double>()};
    if (!j.is_object() || !j.contains("mode")) {
        throw SchemaError("encoding must be a number or an object with a mode");
    }
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "direct") return Direct{j.at("value").get<double>()};
    if (mode == "constant") {
        ConstantData c;
        c.register_qubits = j.at("qubits").get<int>();
        c.values = j.at("values").get<std::vector<double>>();
        return c;
    }
    if (mode == "steerable") return Steerable{j.at("qubits").get<int>()};
    throw SchemaError("unknown encoding mode '" + mode + "'");
}

json encoding_to_json(const EncodingMode& m) {
    if (const auto* d = std::get_if<Direct>(&m)) return json(d->value);
    if (const auto* c = std::get_if<ConstantData>(&m)) {
        return json{{"mode", "constant"}, {"qubits", c->register_qubits}, {"values", c->values}};
    }
    const auto& s = std::get<Steerable>(m);
    return json{{"mode", "steerable"}, {"qubits", s.register_qubits}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
    if (j.is_number_integer()) return TreeNode::make_leaf(j.get<int>());
    if (j.is_array() && j.size() == 2) {
        return TreeNode::make_node(tree_from_json(j[0]), tree_from_json(j[1]));
    }
    throw SchemaError("tree nodes are leaf indices or two-element arrays");
}

json tree_to_json(const TreeNode& n) {
    if (n.is_leaf()) return json(n.leaf);
    return json::array({tree_to_json(*n.left), tree_to_json(*n.right)});
}

} // namespace

QCoSampSpec spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("spec is not valid JSON: ") + e.what());
    }
    try {
        QCoSampSpec spec;
        for (const auto& comp : j.at("components")) {
            ComponentSpec cs;
            cs.frequency = encoding_from_json(comp.at("n"));
            cs.phase_r = encoding_from_json(comp.at("r"));
            cs.phase_s = encoding_from_json(comp.at("s"));
            spec.components.push_back(std::move(cs));
        }
        if (j.contains("tree")) {
            spec.tree = tree_from_json(j.at("tree"));
        } else {
            spec.tree = canonical_tree(static_cast<int>(spec.components.size()));
        }
        if (j.contains("argument")) spec.argument = encoding_from_json(j.at("argument"));
        leaves_of(spec); // validates
        return spec;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("spec schema violation: ") + e.what());
    }
}

std::string spec_to_json_text(const QCoSampSpec& spec) {
    json comps = json::array();
    for (const auto& c : spec.components) {
        comps.push_back(json{{"n", encoding_to_json(c.frequency)},
                             {"r", encoding_to_json(c.phase_r)},
                             {"s", encoding_to_json(c.phase_s)}});
    }
    json j{{"components", comps}, {"argument", encoding_to_json(spec.argument)}};
    if (spec.tree) j["tree"] = tree_to_json(*spec.tree);
    return j.dump(2) + "\n";
}

} // namespace qcosamp
