#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qcosamp/circuit.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp::test {

using Matrix = std::vector<std::vector<cplx>>;

/// Dense unitary of a circuit, column by column. Test oracle only; keep it
/// to a few qubits.
inline Matrix dense_matrix(const Circuit& c) {
    const std::uint64_t dim = std::uint64_t{1} << c.qubit_count();
    Matrix m(dim, std::vector<cplx>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
        const StateVector out = c.run(new_basis_state(c.qubit_count(), col));
        for (std::uint64_t row = 0; row < dim; ++row) m[row][col] = out.amp(row);
    }
    return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix out(n, std::vector<cplx>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    }
    return out;
}

inline Matrix dagger(const Matrix& a) {
    const std::size_t n = a.size();
    Matrix out(n, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[i][j] = std::conj(a[j][i]);
    }
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            m = std::max(m, std::abs(a[i][j] - b[i][j]));
        }
    }
    return m;
}

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<cplx>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline double max_amp_diff(const StateVector& a, const StateVector& b) {
    double m = 0.0;
    for (std::uint64_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.amp(i) - b.amp(i)));
    return m;
}

/// Random circuit over the primitive gate set, for norm-preservation style
/// properties.
inline Circuit random_circuit(Rng& rng, int qubits, int gates) {
    Circuit c(qubits);
    for (int g = 0; g < gates; ++g) {
        const int target = static_cast<int>(rng.next_u64() % qubits);
        const int kind = static_cast<int>(rng.next_u64() % 5);
        std::vector<int> controls;
        if (qubits > 1 && rng.next_u64() % 2 == 0) {
            const int ctrl = static_cast<int>(rng.next_u64() % qubits);
            if (ctrl != target) controls.push_back(ctrl);
        }
        switch (kind) {
            case 0: c.add(GateApplication::h(target, controls)); break;
            case 1: c.add(GateApplication::x(target, controls)); break;
            case 2: c.add(GateApplication::z(target, controls)); break;
            case 3:
                c.add(GateApplication::phase(-kPi + 2.0 * kPi * rng.next_double(), target,
                                             controls));
                break;
            default: {
                if (qubits < 2) {
                    c.add(GateApplication::z(target));
                    break;
                }
                // Random two-qubit transposition as an ordering operator.
                const int q2 = (target + 1) % qubits;
                c.add(ordering_operator({{0, 3}, {3, 0}}, {std::min(target, q2),
                                                           std::max(target, q2)}));
                break;
            }
        }
    }
    return c;
}

} // namespace qcosamp::test
