#include "qcosamp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "qcosamp/errors.hpp"

namespace qcosamp {

GateApplication GateApplication::h(int target, std::vector<int> controls) {
    return {GateKind::Hadamard, 0.0, target, std::move(controls), {}, {}};
}
GateApplication GateApplication::x(int target, std::vector<int> controls) {
    return {GateKind::PauliX, 0.0, target, std::move(controls), {}, {}};
}
GateApplication GateApplication::z(int target, std::vector<int> controls) {
    return {GateKind::PauliZ, 0.0, target, std::move(controls), {}, {}};
}
GateApplication GateApplication::phase(double angle, int target, std::vector<int> controls) {
    return {GateKind::PhaseShift, angle, target, std::move(controls), {}, {}};
}

GateApplication ordering_operator(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& two_line,
    const std::vector<int>& qubits) {
    if (qubits.empty()) throw std::invalid_argument("ordering operator needs qubits");
    const std::uint64_t local_dim = std::uint64_t{1} << qubits.size();
    std::set<std::uint64_t> srcs, dsts;
    for (const auto& [s, d] : two_line) {
        if (s >= local_dim || d >= local_dim) {
            throw std::invalid_argument("permutation index out of subspace range");
        }
        if (!srcs.insert(s).second || !dsts.insert(d).second) {
            throw std::invalid_argument("permutation is not a bijection");
        }
    }
    // Complete the partial map: sources that lost their slot receive the
    // vacated destinations, pairing in ascending order.
    std::vector<std::uint64_t> freed, homeless;
    for (std::uint64_t d : dsts) {
        if (!srcs.count(d)) homeless.push_back(d); // d's old content must move
    }
    for (std::uint64_t s : srcs) {
        if (!dsts.count(s)) freed.push_back(s); // s's slot is now empty
    }
    GateApplication g;
    g.kind = GateKind::Permutation;
    g.perm_qubits = qubits;
    g.perm = two_line;
    for (std::size_t i = 0; i < homeless.size(); ++i) {
        g.perm.emplace_back(homeless[i], freed[i]);
    }
    return g;
}

Circuit& Circuit::add(GateApplication g) {
    ops_.push_back(std::move(g));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    for (const auto& g : other.ops()) ops_.push_back(g);
    return *this;
}

Circuit& Circuit::append_mapped(const Circuit& other, const std::vector<int>& qubit_map) {
    if (static_cast<int>(qubit_map.size()) != other.qubit_count()) {
        throw std::invalid_argument("qubit_map size must equal source circuit width");
    }
    for (GateApplication g : other.ops()) {
        g.target = qubit_map[g.target];
        for (int& c : g.controls) c = qubit_map[c];
        for (int& q : g.perm_qubits) q = qubit_map[q];
        ops_.push_back(std::move(g));
    }
    return *this;
}

StateVector Circuit::run(StateVector state) const {
    for (const auto& g : ops_) apply(state, g);
    return state;
}

StateVector Circuit::run_from_zero() const {
    return run(new_basis_state(qubit_count_, 0));
}

namespace {

void validate_indices(const StateVector& state, const GateApplication& g) {
    const int q = state.qubit_count();
    auto check = [&](int idx) {
        if (idx < 0 || idx >= q) {
            throw std::out_of_range("qubit index " + std::to_string(idx) +
                                    " out of range for " + std::to_string(q) + " qubits");
        }
    };
    std::set<int> seen;
    if (g.kind == GateKind::Permutation) {
        for (int t : g.perm_qubits) {
            check(t);
            if (!seen.insert(t).second) {
                throw std::invalid_argument("duplicate qubit in permutation subset");
            }
        }
    } else {
        check(g.target);
        seen.insert(g.target);
    }
    for (int c : g.controls) {
        check(c);
        if (!seen.insert(c).second) {
            throw std::invalid_argument("controls and target must be disjoint");
        }
    }
    if (g.kind == GateKind::PhaseShift && !std::isfinite(g.angle)) {
        throw std::invalid_argument("phase angle must be finite");
    }
}

void apply_single_qubit(StateVector& state, const GateApplication& g) {
    const int q = state.qubit_count();
    const std::uint64_t tmask = std::uint64_t{1} << (q - 1 - g.target);
    std::uint64_t cmask = 0;
    for (int c : g.controls) cmask |= std::uint64_t{1} << (q - 1 - c);

    const std::uint64_t dim = state.dim();
    auto& a = state.amplitudes();
    switch (g.kind) {
        case GateKind::Identity:
            return;
        case GateKind::Hadamard: {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for (std::uint64_t i = 0; i < dim; ++i) {
                if ((i & tmask) || ((i & cmask) != cmask)) continue;
                const std::uint64_t j = i | tmask;
                const cplx a0 = a[i], a1 = a[j];
                a[i] = (a0 + a1) * inv_sqrt2;
                a[j] = (a0 - a1) * inv_sqrt2;
            }
            return;
        }
        case GateKind::PauliX: {
            for (std::uint64_t i = 0; i < dim; ++i) {
                if ((i & tmask) || ((i & cmask) != cmask)) continue;
                std::swap(a[i], a[i | tmask]);
            }
            return;
        }
        case GateKind::PauliZ: {
            for (std::uint64_t i = 0; i < dim; ++i) {
                if ((i & tmask) && (i & cmask) == cmask) a[i] = -a[i];
            }
            return;
        }
        case GateKind::PhaseShift: {
            const cplx f = std::polar(1.0, g.angle);
            for (std::uint64_t i = 0; i < dim; ++i) {
                if ((i & tmask) && (i & cmask) == cmask) a[i] *= f;
            }
            return;
        }
        default:
            throw std::logic_error("unreachable gate kind");
    }
}

void apply_permutation(StateVector& state, const GateApplication& g) {
    const int q = state.qubit_count();
    const int sub = static_cast<int>(g.perm_qubits.size());
    std::uint64_t cmask = 0;
    for (int c : g.controls) cmask |= std::uint64_t{1} << (q - 1 - c);

    // Bit positions of the subset qubits in the global index, MSB of the
    // local index first.
    std::vector<int> pos(sub);
    for (int k = 0; k < sub; ++k) pos[k] = q - 1 - g.perm_qubits[k];

    std::vector<std::uint64_t> dest(std::uint64_t{1} << sub);
    for (std::uint64_t i = 0; i < dest.size(); ++i) dest[i] = i;
    for (const auto& [s, d] : g.perm) dest[s] = d;

    auto local_of = [&](std::uint64_t global) {
        std::uint64_t loc = 0;
        for (int k = 0; k < sub; ++k) loc = (loc << 1) | ((global >> pos[k]) & 1u);
        return loc;
    };
    auto with_local = [&](std::uint64_t global, std::uint64_t loc) {
        for (int k = sub - 1; k >= 0; --k) {
            const std::uint64_t bit = loc & 1u;
            loc >>= 1;
            global = (global & ~(std::uint64_t{1} << pos[k])) | (bit << pos[k]);
        }
        return global;
    };

    std::uint64_t submask = 0;
    for (int p : pos) submask |= std::uint64_t{1} << p;

    auto& a = state.amplitudes();
    std::vector<cplx> scratch(dest.size());
    const std::uint64_t dim = state.dim();
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & submask) continue; // enumerate each coset once
        if ((base & cmask) != cmask) continue;
        for (std::uint64_t loc = 0; loc < dest.size(); ++loc) {
            scratch[dest[loc]] = a[with_local(base, loc)];
        }
        for (std::uint64_t loc = 0; loc < dest.size(); ++loc) {
            a[with_local(base, loc)] = scratch[loc];
        }
    }
}

} // namespace

void apply(StateVector& state, const GateApplication& g) {
    validate_indices(state, g);
    if (g.kind == GateKind::Permutation) {
        apply_permutation(state, g);
    } else {
        apply_single_qubit(state, g);
    }
}

namespace {

/// Phase e^{i angle} at exactly one basis coordinate, as an X-wrapped
/// multi-controlled phase shift.
void emit_phase_at_coordinate(Circuit& c, std::uint64_t coord, double angle) {
    const int q = c.qubit_count();
    std::vector<int> wrapped;
    for (int k = 0; k < q; ++k) {
        if (((coord >> (q - 1 - k)) & 1u) == 0) wrapped.push_back(k);
    }
    for (int w : wrapped) c.add(GateApplication::x(w));
    std::vector<int> controls;
    for (int k = 1; k < q; ++k) controls.push_back(k);
    c.add(GateApplication::phase(angle, 0, controls));
    for (int w : wrapped) c.add(GateApplication::x(w));
}

} // namespace

Circuit twice_permuted_controlled(int qubit_count,
                                  const std::vector<std::uint64_t>& target_coords,
                                  const std::vector<cplx>& values) {
    if (qubit_count < 1) throw std::invalid_argument("need at least one qubit");
    const std::uint64_t dim = std::uint64_t{1} << qubit_count;
    const std::uint64_t half = dim >> 1;
    if (target_coords.size() != values.size()) {
        throw std::invalid_argument("coordinate and value counts differ");
    }
    if (target_coords.size() > half) {
        throw std::invalid_argument("at most 2^(Q-1) coordinates may be changed");
    }
    std::set<std::uint64_t> distinct(target_coords.begin(), target_coords.end());
    if (distinct.size() != target_coords.size()) {
        throw std::invalid_argument("target coordinates must be distinct");
    }
    for (std::uint64_t t : target_coords) {
        if (t >= dim) throw std::out_of_range("target coordinate out of range");
    }
    for (const cplx& v : values) {
        if (std::abs(std::abs(v) - 1.0) > kTolStructural) {
            throw std::invalid_argument("values must have unit modulus");
        }
    }

    // Assign tail slots (the top coordinates). Targets already in the tail
    // keep their own slot; the rest swap with free slots, giving an
    // involution, so the same ordering closes the sandwich.
    std::vector<std::uint64_t> tail_slots;
    for (std::uint64_t s = dim - 1; s >= dim - target_coords.size() && s + 1 != 0; --s) {
        tail_slots.push_back(s);
    }
    std::set<std::uint64_t> tail_set(tail_slots.begin(), tail_slots.end());

    std::unordered_map<std::uint64_t, std::uint64_t> slot_of; // coord -> slot
    std::vector<std::uint64_t> free_slots;
    for (std::uint64_t s : tail_slots) {
        if (!distinct.count(s)) free_slots.push_back(s);
    }
    std::size_t next_free = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> moves;
    for (std::uint64_t t : target_coords) {
        if (tail_set.count(t)) {
            slot_of[t] = t;
        } else {
            const std::uint64_t s = free_slots[next_free++];
            slot_of[t] = s;
            moves.emplace_back(t, s);
            moves.emplace_back(s, t);
        }
    }

    std::vector<int> all_qubits(qubit_count);
    for (int k = 0; k < qubit_count; ++k) all_qubits[k] = k;

    Circuit c(qubit_count);
    const bool trivial_order = moves.empty();
    GateApplication order;
    if (!trivial_order) order = ordering_operator(moves, all_qubits);

    if (!trivial_order) c.add(order);
    for (std::size_t i = 0; i < target_coords.size(); ++i) {
        emit_phase_at_coordinate(c, slot_of[target_coords[i]], std::arg(values[i]));
    }
    if (!trivial_order) c.add(order);
    return c;
}

void add_pattern_phase(Circuit& c, double angle,
                       const std::vector<std::pair<int, bool>>& conditions) {
    angle = std::remainder(angle, 2.0 * kPi);
    if (angle == 0.0) return;
    int target = -1;
    for (const auto& [q, v] : conditions) {
        if (v) {
            target = q;
            break;
        }
    }
    if (target < 0) throw std::logic_error("pattern phase needs a positive condition");
    std::vector<int> wraps, controls;
    for (const auto& [q, v] : conditions) {
        if (!v) wraps.push_back(q);
        if (q != target) controls.push_back(q);
    }
    for (int w : wraps) c.add(GateApplication::x(w));
    c.add(GateApplication::phase(angle, target, controls));
    for (int w : wraps) c.add(GateApplication::x(w));
}

Circuit qft_phase_encode_circuit(std::uint64_t register_value, int register_qubits) {
    const std::uint64_t dim = std::uint64_t{1} << register_qubits;
    if (register_value >= dim) {
        throw std::out_of_range("register value out of range");
    }
    Circuit c(register_qubits);
    for (int k = 0; k < register_qubits; ++k) c.add(GateApplication::h(k));
    // Qubit k carries basis-index weight 2^(Q-1-k); its set-bit contributes
    // 2*pi*value/2^(k+1) to the coordinate phase.
    for (int k = 0; k < register_qubits; ++k) {
        const double angle = 2.0 * kPi * static_cast<double>(register_value) /
                             static_cast<double>(std::uint64_t{1} << (k + 1));
        c.add(GateApplication::phase(std::remainder(angle, 2.0 * kPi), k));
    }
    return c;
}

StateVector qft_phase_encode(std::uint64_t register_value, int register_qubits) {
    return qft_phase_encode_circuit(register_value, register_qubits).run_from_zero();
}

std::pair<double, double> hadamard_test(double phase) {
    if (!std::isfinite(phase)) throw std::invalid_argument("phase must be finite");
    // Qubit 0 = ancilla, qubit 1 = eigenvector register set to |1>.
    Circuit c(2);
    c.add(GateApplication::x(1));
    c.add(GateApplication::x(0));
    c.add(GateApplication::h(0));
    c.add(GateApplication::phase(phase, 1, {0}));
    c.add(GateApplication::h(0));
    const StateVector s = c.run_from_zero();
    const std::vector<double> p = measure_probabilities(s, {0});
    return {p[0], p[1]};
}

} // namespace qcosamp
