#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "qcosamp/builder.hpp"
#include "qcosamp/errors.hpp"

using namespace qcosamp;
using qcosamp::test::dense_matrix;
using qcosamp::test::identity;
using qcosamp::test::max_abs_diff;
using qcosamp::test::max_amp_diff;

namespace {

QCoSampSpec direct_spec(std::vector<std::array<double, 3>> nrs, double x) {
    QCoSampSpec spec;
    for (const auto& c : nrs) {
        spec.components.push_back({Direct{c[0]}, Direct{c[1]}, Direct{c[2]}});
    }
    spec.tree = canonical_tree(static_cast<int>(nrs.size()));
    spec.argument = Direct{x};
    return spec;
}

double p_zero(const AssembledOperator& op) {
    const StateVector s = op.circuit.run_from_zero();
    return measure_probabilities(s, {op.layout.measured_qubit})[0];
}

} // namespace

TEST_CASE("bc operator probabilities") {
    auto p0 = [](const Circuit& c) {
        return measure_probabilities(c.run_from_zero(), {0})[0];
    };
    CHECK(p0(bc_operator(1, 0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p0(bc_operator(2, kPi / 2.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
    // Frozen from the closed form (1 + cos(2*0.7 - 0.2)) / 2.
    const double expected = (1.0 + std::cos(1.2)) / 2.0;
    CHECK(expected == doctest::Approx(0.68117888).epsilon(1e-7));
    CHECK(p0(bc_operator(2, 0.7, -0.2)) == doctest::Approx(expected).epsilon(1e-12));

    // Gate-saving and repeated-composition forms agree.
    CHECK(max_abs_diff(dense_matrix(bc_operator(5, 0.9, 0.3, true)),
                       dense_matrix(bc_operator(5, 0.9, 0.3, false))) < kTolStructural);
}

TEST_CASE("cpc operator, direct argument") {
    // nu_2 with r = -0.2, s = 2.1 swept over a grid.
    for (int i = 0; i < 9; ++i) {
        const double x = -kPi + 2.0 * kPi * i / 8.0;
        const CpcOperator op = cpc_operator(2, Direct{x}, -0.2, 2.1);
        const StateVector s = op.circuit.run_from_zero();
        const double p = measure_probabilities(s, {op.c2})[0];
        const double nu = (1.0 + std::cos(2.0 * x - 0.2)) / 4.0 +
                          (1.0 + std::cos(2.0 * x + 2.1)) / 4.0;
        CHECK(p == doctest::Approx(nu).epsilon(1e-12));
    }

    // Both cosines at their maximum: the component saturates.
    const CpcOperator top = cpc_operator(1, Direct{0.0}, 0.0, 0.0);
    CHECK(measure_probabilities(top.circuit.run_from_zero(), {top.c2})[0] ==
          doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(cpc_operator(1, Steerable{3}, 0.0, 0.0), SchemaError);
}

TEST_CASE("cpc operator, constant-data argument (quantum summation)") {
    // Uniform 2^4 grid over [-pi, pi): the cosine sum vanishes exactly, so
    // P(c2=0) is the grid mean 1/2 and the ancilla-pair |00> pattern gets
    // exactly 1/4.
    std::vector<double> grid;
    for (int v = 0; v < 16; ++v) grid.push_back(phase_grid_value(v, 4));
    const CpcOperator op = cpc_operator(1, ConstantData{grid, 4}, 0.0, 0.0);
    const StateVector s = op.circuit.run_from_zero();
    CHECK(measure_probabilities(s, {op.c2})[0] == doctest::Approx(0.5).epsilon(1e-12));
    const auto joint = measure_probabilities(s, {op.c1, op.c2});
    CHECK(joint[0] == doctest::Approx(0.25).epsilon(1e-12));

    // Quantum summation matches the closed-form grid mean for random params.
    Rng rng(31);
    for (int t = 0; t < 10; ++t) {
        const long long n = 1 + static_cast<long long>(rng.next_u64() % 3);
        const double r = -kPi + 2.0 * kPi * rng.next_double();
        const double sph = -kPi + 2.0 * kPi * rng.next_double();
        std::vector<double> xs;
        for (int v = 0; v < 8; ++v) xs.push_back(-kPi + 2.0 * kPi * rng.next_double());
        const CpcOperator c = cpc_operator(n, ConstantData{xs, 3}, r, sph);
        const double p = measure_probabilities(c.circuit.run_from_zero(), {c.c2})[0];
        double mean = 0.0;
        for (double x : xs) {
            mean += (1.0 + std::cos(n * x + r)) / 4.0 + (1.0 + std::cos(n * x + sph)) / 4.0;
        }
        mean /= static_cast<double>(xs.size());
        CHECK(p == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("constant encoding") {
    const StateVector flat = constant_encode({0.0, 0.0}, 1).run_from_zero();
    CHECK(std::abs(flat.amp(0) - 1.0 / std::sqrt(2.0)) < kTolStructural);
    CHECK(std::abs(flat.amp(1) - 1.0 / std::sqrt(2.0)) < kTolStructural);

    const double a = 0.6, b = -2.2;
    const StateVector two = constant_encode({a, b}, 1).run_from_zero();
    CHECK(std::abs(two.amp(0) - std::polar(1.0 / std::sqrt(2.0), a)) < kTolStructural);
    CHECK(std::abs(two.amp(1) - std::polar(1.0 / std::sqrt(2.0), b)) < kTolStructural);

    // Four values on two qubits against the dense diagonal definition.
    const std::vector<double> eps = {0.1, -0.7, 2.9, 1.3};
    const auto m = dense_matrix(constant_encode(eps, 2));
    Circuit had(2);
    had.add(GateApplication::h(0));
    had.add(GateApplication::h(1));
    auto expect = dense_matrix(had);
    for (int k = 0; k < 4; ++k) {
        for (int col = 0; col < 4; ++col) expect[k][col] *= std::polar(1.0, eps[k]);
    }
    CHECK(max_abs_diff(m, expect) < kTolStructural);

    CHECK_THROWS_AS(constant_encode({0.0, 0.0, 0.0}, 1), std::invalid_argument);
}

namespace {

std::uint64_t index_with_bits(int total, const std::vector<std::pair<int, int>>& bits) {
    std::uint64_t idx = 0;
    for (const auto& [qubit, bit] : bits) {
        if (bit) idx |= std::uint64_t{1} << (total - 1 - qubit);
    }
    return idx;
}

} // namespace

TEST_CASE("aps operator encodes x + p onto the ancilla branch") {
    // Layout: p register on qubits 0-1, x register on 2-3, ancilla 4.
    const std::vector<int> preg = {0, 1}, xreg = {2, 3};
    const Circuit aps = aps_operator(5, preg, xreg, 4);

    auto amp1 = [&](std::uint64_t pbits, std::uint64_t xbits) {
        std::uint64_t idx = (pbits << 3) | (xbits << 1);
        StateVector in = new_basis_state(5, idx);
        const StateVector out = aps.run(std::move(in));
        return out.amp(idx | 1) * std::sqrt(2.0);
    };

    // x bits "10": x = -pi + pi = 0, phase is e^{i(0 + p)}.
    const double p_med = decode_phase_bits(0b01, 2); // p bits "01" -> -pi + pi/2
    CHECK(std::abs(amp1(0b01, 0b10) - std::polar(1.0, 0.0 + p_med)) < kTolStructural);

    // x bits "11": x = pi/2.
    CHECK(std::abs(amp1(0b01, 0b11) - std::polar(1.0, kPi / 2.0 + p_med)) < kTolStructural);

    // All-zero registers: x = p = -pi, coordinate e^{-2 pi i} = 1.
    CHECK(std::abs(amp1(0b00, 0b00) - 1.0) < kTolStructural);

    CHECK_THROWS_AS(aps_operator(5, {0, 1}, {1, 2}, 4), std::invalid_argument);
}

TEST_CASE("fs operator frequencies") {
    const std::vector<int> nreg = {0, 1}, preg = {2}, xreg = {3, 4};
    const Circuit fs = fs_operator(6, nreg, preg, xreg, 5);

    auto amp1 = [&](std::uint64_t nbits_le, std::uint64_t pbits, std::uint64_t xbits) {
        // nbits_le bit k corresponds to register qubit k (weight 2^k).
        std::uint64_t idx = 0;
        for (int k = 0; k < 2; ++k) {
            if ((nbits_le >> k) & 1u) idx |= std::uint64_t{1} << (6 - 1 - nreg[k]);
        }
        idx |= pbits << (6 - 1 - preg[0]);
        idx |= xbits << (6 - 1 - xreg[1]); // contiguous x register
        StateVector in = new_basis_state(6, idx);
        const StateVector out = fs.run(std::move(in));
        return out.amp(idx | 1) * std::sqrt(2.0);
    };

    const double x = decode_phase_bits(0b11, 2); // pi/2
    const double p = decode_phase_bits(0b1, 1);  // 0

    // n = 1 reduces to the APS behaviour.
    CHECK(std::abs(amp1(0b01, 1, 0b11) - std::polar(1.0, 1.0 * x + p)) < kTolStructural);
    // n bits (n0=0, n1=1): n = 2.
    CHECK(std::abs(amp1(0b10, 1, 0b11) - std::polar(1.0, 2.0 * x + p)) < kTolStructural);
    // n = 0 drops the argument.
    CHECK(std::abs(amp1(0b00, 1, 0b11) - std::polar(1.0, p)) < kTolStructural);

    // Gate-saving and repeated forms act identically.
    const Circuit saved = fs_operator(6, nreg, preg, xreg, 5, true);
    const Circuit repeated = fs_operator(6, nreg, preg, xreg, 5, false);
    Rng rng(8);
    for (int t = 0; t < 5; ++t) {
        const std::uint64_t idx = rng.next_u64() % 32; // ancilla bit 0
        const StateVector a = saved.run(new_basis_state(6, idx << 1));
        const StateVector b = repeated.run(new_basis_state(6, idx << 1));
        CHECK(max_amp_diff(a, b) < kTolStructural);
    }
}

TEST_CASE("cmpn equals cpc for direct encodings") {
    const ComponentSpec comp{Direct{2.0}, Direct{-0.2}, Direct{2.1}};
    const double x = 0.83;
    const CmpnOperator cm = cmpn_operator(comp, Direct{x});
    REQUIRE(cm.layout.total_qubits == 2);

    // H^- form plus interference reproduces the CPC exactly.
    Circuit with_interference = cm.circuit;
    with_interference.add(GateApplication::h(cm.layout.measured_qubit));
    const CpcOperator cpc = cpc_operator(2, Direct{x}, -0.2, 2.1);
    CHECK(max_amp_diff(with_interference.run_from_zero(), cpc.circuit.run_from_zero()) <
          kTolStructural);

    const double p = measure_probabilities(with_interference.run_from_zero(),
                                           {cm.layout.measured_qubit})[0];
    const double nu =
        (1.0 + std::cos(2.0 * x - 0.2)) / 4.0 + (1.0 + std::cos(2.0 * x + 2.1)) / 4.0;
    CHECK(p == doctest::Approx(nu).epsilon(1e-12));
}

TEST_CASE("steerable registers swept match the closed form") {
    // 2-qubit steerable r: all four grid values produce distinct nu curves.
    QCoSampSpec spec;
    spec.components.push_back({Direct{1.0}, Steerable{2}, Direct{0.4}});
    spec.tree = TreeNode::make_leaf(0);
    spec.argument = Direct{0.9};

    for (std::uint64_t rbits = 0; rbits < 4; ++rbits) {
        AssembleOptions opts;
        opts.register_inits.push_back({0, 'r', rbits});
        const AssembledOperator op = assemble(spec, opts);
        const double r = decode_phase_bits(rbits, 2);
        const double nu =
            (1.0 + std::cos(0.9 + r)) / 4.0 + (1.0 + std::cos(0.9 + 0.4)) / 4.0;
        CHECK(p_zero(op) == doctest::Approx(nu).epsilon(1e-12));
    }
}

TEST_CASE("steerable fixed to a basis value equals direct encoding") {
    Rng rng(404);
    for (int t = 0; t < 8; ++t) {
        const long long n = rng.next_u64() % 4; // includes n = 0
        const std::uint64_t rbits = rng.next_u64() % 8;
        const std::uint64_t xbits = rng.next_u64() % 8;
        const double r = decode_phase_bits(rbits, 3);
        const double x = decode_phase_bits(xbits, 3);
        const double s = -kPi + 2.0 * kPi * rng.next_double();

        QCoSampSpec steer;
        steer.components.push_back({Steerable{2}, Steerable{3}, Direct{s}});
        steer.tree = TreeNode::make_leaf(0);
        steer.argument = Steerable{3};
        AssembleOptions opts;
        opts.register_inits.push_back({0, 'n', static_cast<std::uint64_t>(n)});
        opts.register_inits.push_back({0, 'r', rbits});
        opts.argument_basis_value = xbits;
        const AssembledOperator sop = assemble(steer, opts);

        QCoSampSpec direct;
        direct.components.push_back({Direct{static_cast<double>(n)}, Direct{r}, Direct{s}});
        direct.tree = TreeNode::make_leaf(0);
        direct.argument = Direct{x};
        const AssembledOperator dop = assemble(direct);

        // Compare ancilla amplitudes: project the steerable state onto the
        // fixed register values.
        const StateVector ss = sop.circuit.run_from_zero();
        const StateVector ds = dop.circuit.run_from_zero();
        // Register bits occupy the high qubits; ancillae the last two.
        const int shift = 2;
        std::uint64_t reg_idx = 0;
        // n-register qubits 0-1 (weight 2^k at listed position k).
        for (int k = 0; k < 2; ++k) {
            if ((static_cast<std::uint64_t>(n) >> k) & 1u) {
                reg_idx |= std::uint64_t{1} << (sop.layout.total_qubits - 1 -
                                                 sop.layout.components[0].n_register[k]);
            }
        }
        for (int j = 0; j < 3; ++j) {
            if ((rbits >> (3 - 1 - j)) & 1u) {
                reg_idx |= std::uint64_t{1} << (sop.layout.total_qubits - 1 -
                                                 sop.layout.components[0].r_register[j]);
            }
            if ((xbits >> (3 - 1 - j)) & 1u) {
                reg_idx |= std::uint64_t{1} << (sop.layout.total_qubits - 1 -
                                                 sop.layout.x_register[j]);
            }
        }
        for (std::uint64_t anc = 0; anc < 4; ++anc) {
            const cplx steer_amp = ss.amp(reg_idx | (anc << 0));
            const cplx direct_amp = ds.amp(anc);
            CHECK(std::abs(steer_amp - direct_amp) < kTolStructural);
        }
        (void)shift;
    }
}

TEST_CASE("connection block pattern") {
    // CON(CMP1, CMP2): 16 coordinates, blocks of four are all of type
    // o**o or *oo* (unit / single-phase).
    QCoSampSpec spec = direct_spec({{1, 0.3, -0.8}, {2, 1.1, 0.2}}, 0.77);
    RegisterLayout layout = make_register_layout(spec);
    Circuit c(layout.total_qubits);
    SubtreeBlock l = leaf_block(c, spec, layout, 0);
    SubtreeBlock r = leaf_block(c, spec, layout, 1);
    SubtreeBlock merged = connect(c, spec, layout, l, r);
    REQUIRE(merged.tags.size() == 16);

    const StateVector s = c.run_from_zero();
    const double unit = 0.25; // 1/sqrt(16)
    int units = 0, phases = 0;
    for (std::uint64_t i = 0; i < 16; ++i) {
        const cplx a = s.amp(i) / unit;
        if (std::abs(a - 1.0) < 1e-12) {
            ++units;
            CHECK(merged.tags[i].unit);
        } else {
            CHECK(std::abs(std::abs(a) - 1.0) < 1e-12);
            CHECK_FALSE(merged.tags[i].unit);
            ++phases;
        }
    }
    CHECK(units == 8);
    CHECK(phases == 8);

    // Block types: four-coordinate blocks are o**o or *oo*.
    for (int block = 0; block < 4; ++block) {
        const bool u0 = merged.tags[block * 4 + 0].unit;
        const bool u1 = merged.tags[block * 4 + 1].unit;
        const bool u2 = merged.tags[block * 4 + 2].unit;
        const bool u3 = merged.tags[block * 4 + 3].unit;
        const bool type_a = u0 && !u1 && !u2 && u3; // o**o
        const bool type_b = !u0 && u1 && u2 && !u3; // *oo*
        CHECK((type_a || type_b));
    }
}

TEST_CASE("second-level connection: 256 coordinates classified") {
    QCoSampSpec spec =
        direct_spec({{1, 0.3, -0.8}, {2, 1.1, 0.2}, {3, -0.5, 0.9}, {4, 2.0, -2.4}}, 0.31);
    RegisterLayout layout = make_register_layout(spec);
    Circuit c(layout.total_qubits);
    SubtreeBlock b01 = connect(c, spec, layout, leaf_block(c, spec, layout, 0),
                               leaf_block(c, spec, layout, 1));
    SubtreeBlock b23 = connect(c, spec, layout, leaf_block(c, spec, layout, 2),
                               leaf_block(c, spec, layout, 3));
    SubtreeBlock root = connect(c, spec, layout, b01, b23);
    REQUIRE(root.tags.size() == 256);

    const StateVector s = c.run_from_zero();
    const double unit = 1.0 / 16.0;
    for (std::uint64_t i = 0; i < 256; ++i) {
        const cplx a = s.amp(i) / unit;
        CHECK(std::abs(std::abs(a) - 1.0) < 1e-12);
        if (root.tags[i].unit) CHECK(std::abs(a - 1.0) < 1e-12);
    }
    for (int block = 0; block < 64; ++block) {
        const bool u0 = root.tags[block * 4 + 0].unit;
        const bool u1 = root.tags[block * 4 + 1].unit;
        const bool u2 = root.tags[block * 4 + 2].unit;
        const bool u3 = root.tags[block * 4 + 3].unit;
        CHECK(((u0 && !u1 && !u2 && u3) || (!u0 && u1 && u2 && !u3)));
    }

    CHECK_THROWS_AS(connect(c, spec, layout, b01, b01), std::invalid_argument);
}

TEST_CASE("un-computation completeness: no doubled frequencies") {
    // Phase-gradient classification across an x sweep: every coordinate's
    // phase slope is one of {0, +-n_i}; a residual cross term would show up
    // as 2n or n_i + n_j.
    const std::vector<std::array<double, 3>> comps = {{1, 0.5, -0.3}, {3, -1.2, 0.7}};
    const double dx = 1e-4;
    QCoSampSpec at_x = direct_spec(comps, 0.4);
    QCoSampSpec at_xdx = direct_spec(comps, 0.4 + dx);
    RegisterLayout layout = make_register_layout(at_x);

    Circuit c0(layout.total_qubits), c1(layout.total_qubits);
    auto build = [&](Circuit& c, const QCoSampSpec& sp) {
        return connect(c, sp, layout, leaf_block(c, sp, layout, 0), leaf_block(c, sp, layout, 1));
    };
    build(c0, at_x);
    build(c1, at_xdx);
    const StateVector s0 = c0.run_from_zero();
    const StateVector s1 = c1.run_from_zero();
    for (std::uint64_t i = 0; i < s0.dim(); ++i) {
        const double slope =
            std::remainder(std::arg(s1.amp(i)) - std::arg(s0.amp(i)), 2.0 * kPi) / dx;
        const double rounded = std::round(slope);
        CHECK(std::abs(slope - rounded) < 1e-6);
        const double mag = std::abs(rounded);
        CHECK((mag == 0.0 || mag == 1.0 || mag == 3.0)); // component frequencies only
    }
}

TEST_CASE("assemble: balanced two components match mu exactly") {
    Rng rng(1234);
    for (int t = 0; t < 10; ++t) {
        const double x = -kPi + 2.0 * kPi * rng.next_double();
        QCoSampSpec spec = direct_spec({{1, 0.3, -0.8}, {2, 1.1, 0.2}}, x);
        const AssembledOperator op = assemble(spec);
        CHECK(p_zero(op) == doctest::Approx(closed_form_mu(spec, x)).epsilon(1e-12));
    }
}

TEST_CASE("assemble: single component saturates at the peak") {
    QCoSampSpec spec = direct_spec({{1, 0, 0}}, 0.0);
    const AssembledOperator op = assemble(spec);
    CHECK(p_zero(op) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eleven-leaf shape: depths, weights and the leaf-length lemma") {
    // Depths {1, 3 x 2, 5 x 8}: inverse lengths 1/2 + 2/8 + 8/32 = 1 and
    // per-component factors 1/8, 1/32, 1/128.
    auto perfect3 = [&](int base) {
        auto l0 = TreeNode::make_node(TreeNode::make_leaf(base + 0), TreeNode::make_leaf(base + 1));
        auto l1 = TreeNode::make_node(TreeNode::make_leaf(base + 2), TreeNode::make_leaf(base + 3));
        auto l2 = TreeNode::make_node(TreeNode::make_leaf(base + 4), TreeNode::make_leaf(base + 5));
        auto l3 = TreeNode::make_node(TreeNode::make_leaf(base + 6), TreeNode::make_leaf(base + 7));
        return TreeNode::make_node(TreeNode::make_node(std::move(l0), std::move(l1)),
                                   TreeNode::make_node(std::move(l2), std::move(l3)));
    };
    QCoSampSpec spec;
    for (int i = 0; i < 11; ++i) {
        spec.components.push_back({Direct{1.0}, Direct{0.0}, Direct{0.0}});
    }
    auto mid = TreeNode::make_node(
        TreeNode::make_node(TreeNode::make_leaf(1), TreeNode::make_leaf(2)), perfect3(3));
    spec.tree = TreeNode::make_node(TreeNode::make_leaf(0), std::move(mid));
    spec.argument = Direct{0.0};

    const auto depths = spec.depths();
    CHECK(depths[0] == 1);
    CHECK(depths[1] == 3);
    CHECK(depths[2] == 3);
    for (int i = 3; i < 11; ++i) CHECK(depths[i] == 5);
    CHECK(tree_sum_check(spec));

    const NormalizationInfo norm = normalization(spec);
    CHECK(norm.L[0] == doctest::Approx(8.0));
    CHECK(norm.L[1] == doctest::Approx(32.0));
    CHECK(norm.L[3] == doctest::Approx(128.0));
    CHECK(closed_form_mu(spec, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assemble: unbalanced three-leaf circuit matches the closed form") {
    // Depths {1, 2, 2}: L = {8, 16, 16}.
    QCoSampSpec spec;
    spec.components.push_back({Direct{1.0}, Direct{0.3}, Direct{-0.4}});
    spec.components.push_back({Direct{2.0}, Direct{1.2}, Direct{0.1}});
    spec.components.push_back({Direct{3.0}, Direct{-2.0}, Direct{0.8}});
    spec.tree = TreeNode::make_node(
        TreeNode::make_leaf(0),
        TreeNode::make_node(TreeNode::make_leaf(1), TreeNode::make_leaf(2)));
    Rng rng(99);
    for (int t = 0; t < 5; ++t) {
        const double x = -kPi + 2.0 * kPi * rng.next_double();
        spec.argument = Direct{x};
        const AssembledOperator op = assemble(spec);
        CHECK(normalization(spec).L[0] == doctest::Approx(8.0));
        CHECK(normalization(spec).L[1] == doctest::Approx(16.0));
        CHECK(p_zero(op) == doctest::Approx(closed_form_mu(spec, x)).epsilon(1e-12));
    }
}

TEST_CASE("normalization factors") {
    QCoSampSpec balanced4 =
        direct_spec({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}}, 0.0);
    const NormalizationInfo n4 = normalization(balanced4);
    for (double L : n4.L) CHECK(L == doctest::Approx(16.0));
    CHECK(n4.balanced);

    QCoSampSpec single = direct_spec({{1, 0, 0}}, 0.0);
    CHECK(normalization(single).L[0] == doctest::Approx(4.0));
}

TEST_CASE("tree sum check") {
    QCoSampSpec perfect8 = direct_spec(
        {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}},
        0.0);
    CHECK(tree_sum_check(perfect8));

    // One-child nodes are unrepresentable by construction.
    CHECK_THROWS_AS(TreeNode::make_node(TreeNode::make_leaf(0), nullptr), SchemaError);
}

TEST_CASE("oracle equivalence over random small specs") {
    Rng rng(555);
    for (int t = 0; t < 40; ++t) {
        const int leaves = 1 + static_cast<int>(rng.next_u64() % 3);
        std::vector<std::array<double, 3>> comps;
        for (int i = 0; i < leaves; ++i) {
            comps.push_back({static_cast<double>(1 + rng.next_u64() % 4),
                             -kPi + 2.0 * kPi * rng.next_double(),
                             -kPi + 2.0 * kPi * rng.next_double()});
        }
        const double x = -kPi + 2.0 * kPi * rng.next_double();
        QCoSampSpec spec = direct_spec(comps, x);
        const AssembledOperator op = assemble(spec);
        CHECK(p_zero(op) == doctest::Approx(closed_form_mu(spec, x)).epsilon(1e-9));

        // Output correctness: P(0) + P(1) = 1.
        const StateVector s = op.circuit.run_from_zero();
        const auto p = measure_probabilities(s, {op.layout.measured_qubit});
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("compose_2d") {
    QCoSampSpec a = direct_spec({{1, 0, 0}}, 0.0);
    QCoSampSpec b = direct_spec({{1, 0, 0}}, 0.0);
    const Composed2D both = compose_2d(a, b);
    const StateVector s = both.circuit.run_from_zero();
    const auto p = measure_probabilities(s, {both.measured_a, both.measured_b});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(808);
    for (int t = 0; t < 5; ++t) {
        const double x1 = -kPi + 2.0 * kPi * rng.next_double();
        const double x2 = -kPi + 2.0 * kPi * rng.next_double();
        QCoSampSpec sa = direct_spec({{2, 0.4, -1.0}}, x1);
        QCoSampSpec sb = direct_spec({{3, -0.9, 0.2}}, x2);
        const Composed2D c = compose_2d(sa, sb);
        const auto pp = measure_probabilities(c.circuit.run_from_zero(),
                                              {c.measured_a, c.measured_b});
        CHECK(pp[0] == doctest::Approx(closed_form_mu(sa, x1) * closed_form_mu(sb, x2))
                           .epsilon(1e-12));
    }

    // One operand at a zero of its mu.
    QCoSampSpec za = direct_spec({{1, 0, 0}}, kPi); // mu(pi) = 0 for r = s = 0... n=1
    QCoSampSpec zb = direct_spec({{1, 0, 0}}, 0.0);
    const Composed2D z = compose_2d(za, zb);
    const auto zp = measure_probabilities(z.circuit.run_from_zero(),
                                          {z.measured_a, z.measured_b});
    CHECK(zp[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spec serialization round trip") {
    QCoSampSpec spec;
    spec.components.push_back({Direct{2.0}, Direct{-0.2}, Direct{2.1}});
    spec.components.push_back({Steerable{2}, Direct{0.5}, Steerable{3}});
    spec.tree = TreeNode::make_node(TreeNode::make_leaf(0), TreeNode::make_leaf(1));
    spec.argument = ConstantData{{0.1, 0.2, 0.3}, 2};

    const std::string text = spec_to_json_text(spec);
    const QCoSampSpec parsed = spec_from_json_text(text);
    CHECK(spec_to_json_text(parsed) == text);

    CHECK_THROWS_AS(spec_from_json_text("not json"), SchemaError);
    CHECK_THROWS_AS(spec_from_json_text("{\"components\": []}"), SchemaError);
    // Leaf indices must cover the components exactly.
    CHECK_THROWS_AS(
        spec_from_json_text(
            R"({"components": [{"n":1,"r":0,"s":0},{"n":2,"r":0,"s":0}], "tree": [0,0]})"),
        SchemaError);
}

TEST_CASE("desk-scale guardrail names the offending register") {
    QCoSampSpec spec;
    spec.components.push_back({Steerable{12}, Steerable{12}, Steerable{12}});
    spec.tree = TreeNode::make_leaf(0);
    spec.argument = Direct{0.0};
    try {
        assemble(spec);
        FAIL("guardrail did not trigger");
    } catch (const GuardrailError& e) {
        CHECK(std::string(e.what()).find("register") != std::string::npos);
    }
}
