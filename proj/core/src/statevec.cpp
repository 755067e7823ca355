#include "qcosamp/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcosamp/errors.hpp"

namespace qcosamp {

StateVector::StateVector(int qubit_count)
    : qubit_count_(qubit_count), amps_(std::uint64_t{1} << qubit_count) {
    if (qubit_count < 1 || qubit_count > 30) {
        throw std::out_of_range("qubit_count must be in [1, 30], got " +
                                std::to_string(qubit_count));
    }
}

StateVector::StateVector(int qubit_count, std::vector<cplx> amplitudes)
    : StateVector(qubit_count) {
    if (amplitudes.size() != dim()) {
        throw std::invalid_argument("amplitude array length must be 2^qubit_count");
    }
    amps_ = std::move(amplitudes);
}

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s;
}

void StateVector::check_normalized(double tol) const {
    if (std::abs(norm_sq() - 1.0) > tol) {
        throw NumericError("state norm drifted to " + std::to_string(norm_sq()));
    }
}

StateVector StateVector::tensor(const StateVector& other) const {
    StateVector out(qubit_count_ + other.qubit_count_);
    const std::uint64_t od = other.dim();
    for (std::uint64_t i = 0; i < dim(); ++i) {
        if (amps_[i] == cplx{0.0, 0.0}) continue;
        for (std::uint64_t j = 0; j < od; ++j) {
            out.amp(i * od + j) = amps_[i] * other.amp(j);
        }
    }
    return out;
}

StateVector new_basis_state(int qubit_count, std::uint64_t basis_index) {
    StateVector s(qubit_count);
    if (basis_index >= s.dim()) {
        throw std::out_of_range("basis_index " + std::to_string(basis_index) +
                                " out of range for " + std::to_string(qubit_count) +
                                " qubits");
    }
    s.amp(basis_index) = 1.0;
    return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    // One warm-up step decorrelates nearby stream indices.
    splitmix64(s);
    return Rng(s);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<double> measure_probabilities(const StateVector& state,
                                          const std::vector<int>& measured_qubits) {
    if (measured_qubits.empty()) {
        throw std::invalid_argument("measured qubit set must not be empty");
    }
    const int q = state.qubit_count();
    for (int m : measured_qubits) {
        if (m < 0 || m >= q) throw std::out_of_range("measured qubit out of range");
    }
    const int mcount = static_cast<int>(measured_qubits.size());
    std::vector<double> probs(std::uint64_t{1} << mcount, 0.0);
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amp(i));
        if (p == 0.0) continue;
        std::uint64_t outcome = 0;
        for (int k = 0; k < mcount; ++k) {
            const int bitpos = q - 1 - measured_qubits[k];
            outcome = (outcome << 1) | ((i >> bitpos) & 1u);
        }
        probs[outcome] += p;
    }
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > kTolStructural) {
        throw NumericError("measurement probabilities sum to " + std::to_string(total));
    }
    return probs;
}

Histogram sample(const StateVector& state, const std::vector<int>& measured_qubits,
                 std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be >= 1");
    }
    const std::vector<double> probs = measure_probabilities(state, measured_qubits);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    Histogram h;
    h.shots = shots;
    h.seed = seed;
    Rng rng = Rng::stream(seed, 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t outcome =
            static_cast<std::uint64_t>(std::distance(cdf.begin(), it));
        ++h.counts[outcome];
    }
    return h;
}

} // namespace qcosamp
