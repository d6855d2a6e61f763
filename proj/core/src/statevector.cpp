// Copyright 2026 The qattr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qattr/statevector.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "qattr/error.hpp"
#include "qattr/rng.hpp"

namespace qattr {

NearOverflowSingularity::NearOverflowSingularity(double overflow_amplitude, double alpha)
    : Error(ErrorKind::Numerical,
            "NEAR_OVERFLOW_SINGULARITY: overflow amplitude " +
                std::to_string(overflow_amplitude) +
                (alpha >= 0.0 ? " at alpha=" + std::to_string(alpha) : std::string{})),
      overflow_amplitude_(overflow_amplitude),
      alpha_(alpha) {}

void throw_invalid(const std::string &message) {
    throw Error(ErrorKind::InvalidArgument, message);
}

namespace {

void check_width(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw_invalid("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
    }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    check_width(n_qubits);
    amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, double tolerance) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || !std::has_single_bit(dim)) {
        throw_invalid("amplitude vector length " + std::to_string(dim) +
                      " is not a power of two >= 2");
    }
    const int n = std::countr_zero(dim);
    check_width(n);
    double norm = 0.0;
    for (const auto &a : amplitudes) norm += std::norm(a);
    if (std::abs(norm - 1.0) > tolerance) {
        throw_invalid("amplitude vector not normalized (norm^2 = " + std::to_string(norm) + ")");
    }
    return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::from_real(std::span<const double> amplitudes, double tolerance) {
    return from_amplitudes(std::vector<Complex>(amplitudes.begin(), amplitudes.end()), tolerance);
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto &a : amplitudes_) s += std::norm(a);
    return s;
}

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::S_DAG: return "S_DAG";
        case GateKind::RX: return "RX";
        case GateKind::RZ: return "RZ";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CONTROLLED_UNITARY: return "CONTROLLED_UNITARY";
    }
    return "?";
}

Gate Gate::with_control(int qubit, int trigger) const {
    Gate g = *this;
    g.controls.push_back({qubit, trigger});
    return g;
}

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::RX:
        case GateKind::RZ:
            g.angle = -angle;
            break;
        case GateKind::S_DAG:
            // S is not a native kind; carry it as a payload.
            g.kind = GateKind::CONTROLLED_UNITARY;
            g.payload = target_matrix().adjoint();
            break;
        case GateKind::CONTROLLED_UNITARY:
            g.payload = payload->adjoint();
            break;
        default:
            break;
    }
    return g;
}

Matrix Gate::target_matrix() const {
    const Complex i{0.0, 1.0};
    Matrix m(2, 2);
    switch (kind) {
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            m << r, r, r, -r;
            return m;
        }
        case GateKind::X:
        case GateKind::CNOT:
            m << 0, 1, 1, 0;
            return m;
        case GateKind::Y:
            m << 0, -i, i, 0;
            return m;
        case GateKind::Z:
            m << 1, 0, 0, -1;
            return m;
        case GateKind::S_DAG:
            m << 1, 0, 0, -i;
            return m;
        case GateKind::RX: {
            const double c = std::cos(angle / 2), s = std::sin(angle / 2);
            m << c, -i * s, -i * s, c;
            return m;
        }
        case GateKind::RZ:
            m << std::exp(-i * (angle / 2)), 0, 0, std::exp(i * (angle / 2));
            return m;
        case GateKind::CONTROLLED_UNITARY:
            return *payload;
    }
    return m;
}

void Gate::validate(int n_qubits) const {
    if (targets.empty()) throw_invalid(to_string(kind) + " gate has no targets");
    if (kind != GateKind::CONTROLLED_UNITARY && targets.size() != 1) {
        throw_invalid(to_string(kind) + " gate must have exactly one target");
    }
    if (kind == GateKind::CNOT && controls.empty()) {
        throw_invalid("CNOT gate needs a control");
    }
    std::vector<int> used;
    for (int t : targets) used.push_back(t);
    for (const auto &c : controls) {
        if (c.trigger != 0 && c.trigger != 1) throw_invalid("control trigger must be 0 or 1");
        used.push_back(c.qubit);
    }
    for (int q : used) {
        if (q < 0 || q >= n_qubits) {
            throw_invalid("qubit index " + std::to_string(q) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
        }
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
        throw_invalid("gate targets and controls overlap");
    }
    if (kind == GateKind::CONTROLLED_UNITARY) {
        if (!payload) throw_invalid("CONTROLLED_UNITARY without payload");
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << targets.size());
        if (payload->rows() != dim || payload->cols() != dim) {
            throw_invalid("unitary payload has wrong dimension");
        }
        const Matrix defect = payload->adjoint() * (*payload) - Matrix::Identity(dim, dim);
        if (defect.cwiseAbs().maxCoeff() > 1e-10) throw_invalid("unitary payload is not unitary");
    }
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) { check_width(n_qubits); }

Circuit &Circuit::add(Gate gate) {
    gate.validate(n_qubits_);
    gates_.push_back(std::move(gate));
    return *this;
}

Circuit &Circuit::append(const Circuit &other) {
    if (other.n_qubits() > n_qubits_) throw_invalid("appended circuit is wider than target");
    for (const auto &g : other.gates()) gates_.push_back(g);
    return *this;
}

Circuit Circuit::inverse() const {
    Circuit out(n_qubits_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->inverse());
    return out;
}

Circuit Circuit::controlled(int qubit, int trigger, int n_total) const {
    const Control c{qubit, trigger};
    return controlled(std::span<const Control>(&c, 1), n_total < 0 ? n_qubits_ : n_total);
}

Circuit Circuit::controlled(std::span<const Control> controls, int n_total) const {
    if (n_total < n_qubits_) throw_invalid("controlled circuit cannot shrink the register");
    Circuit out(n_total);
    for (const auto &g : gates_) {
        Gate cg = g;
        for (const auto &c : controls) cg.controls.push_back(c);
        out.add(std::move(cg));
    }
    return out;
}

Circuit Circuit::widened(int n_total) const {
    if (n_total < n_qubits_) throw_invalid("cannot narrow a circuit");
    Circuit out(n_total);
    out.gates_ = gates_;
    return out;
}

namespace {

std::array<Complex, 4> single_qubit_kernel(const Gate &gate) {
    const Complex i{0.0, 1.0};
    switch (gate.kind) {
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {r, r, r, -r};
        }
        case GateKind::X:
        case GateKind::CNOT:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y:
            return {0.0, -i, i, 0.0};
        case GateKind::Z:
            return {1.0, 0.0, 0.0, -1.0};
        case GateKind::S_DAG:
            return {1.0, 0.0, 0.0, -i};
        case GateKind::RX: {
            const double c = std::cos(gate.angle / 2), s = std::sin(gate.angle / 2);
            return {c, -i * s, -i * s, c};
        }
        case GateKind::RZ:
            return {std::polar(1.0, -gate.angle / 2), 0.0, 0.0, std::polar(1.0, gate.angle / 2)};
        case GateKind::CONTROLLED_UNITARY: {
            const Matrix &u = *gate.payload;
            return {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
        }
    }
    return {1.0, 0.0, 0.0, 1.0};
}

// Gates held by a Circuit were validated on insertion.
void apply_unchecked(StateVector &state, const Gate &gate) {
    const int n = state.n_qubits();
    auto amp = state.data();
    const std::size_t dim = amp.size();

    std::size_t cmask = 0, cval = 0;
    for (const auto &c : gate.controls) {
        cmask |= qubit_mask(n, c.qubit);
        if (c.trigger) cval |= qubit_mask(n, c.qubit);
    }

    if (gate.targets.size() == 1) {
        const std::size_t tbit = qubit_mask(n, gate.targets[0]);
        const auto [m00, m01, m10, m11] = single_qubit_kernel(gate);
        const std::size_t low = tbit - 1;
        for (std::size_t j = 0; j < dim / 2; ++j) {
            const std::size_t i = ((j & ~low) << 1) | (j & low);
            if ((i & cmask) != cval) continue;
            const Complex a0 = amp[i], a1 = amp[i | tbit];
            amp[i] = m00 * a0 + m01 * a1;
            amp[i | tbit] = m10 * a0 + m11 * a1;
        }
        return;
    }

    // Multi-target dense payload: gather each 2^t block, multiply, scatter.
    const Matrix &u = *gate.payload;
    const std::size_t t = gate.targets.size();
    const std::size_t block = std::size_t{1} << t;
    std::vector<std::size_t> offsets(block, 0);
    std::size_t tmask = 0;
    for (std::size_t j = 0; j < block; ++j) {
        for (std::size_t b = 0; b < t; ++b) {
            if (j & (std::size_t{1} << (t - 1 - b))) offsets[j] |= qubit_mask(n, gate.targets[b]);
        }
    }
    for (int q : gate.targets) tmask |= qubit_mask(n, q);

    std::vector<Complex> in(block), out(block);
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & tmask) || (i & cmask) != cval) continue;
        for (std::size_t j = 0; j < block; ++j) in[j] = amp[i | offsets[j]];
        for (std::size_t r = 0; r < block; ++r) {
            Complex acc{0.0, 0.0};
            for (std::size_t c = 0; c < block; ++c) {
                acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
            }
            out[r] = acc;
        }
        for (std::size_t j = 0; j < block; ++j) amp[i | offsets[j]] = out[j];
    }
}

}  // namespace

void apply_gate_in_place(StateVector &state, const Gate &gate) {
    gate.validate(state.n_qubits());
    apply_unchecked(state, gate);
}

StateVector apply_gate(StateVector state, const Gate &gate) {
    apply_gate_in_place(state, gate);
    return state;
}

void run_circuit_in_place(const Circuit &circuit, StateVector &state) {
    if (circuit.n_qubits() != state.n_qubits()) {
        throw_invalid("circuit width " + std::to_string(circuit.n_qubits()) +
                      " does not match state width " + std::to_string(state.n_qubits()));
    }
    for (const auto &g : circuit.gates()) apply_unchecked(state, g);
}

StateVector run_circuit(const Circuit &circuit, StateVector initial) {
    run_circuit_in_place(circuit, initial);
    return initial;
}

namespace {

void check_subset(int n, std::span<const int> qubits) {
    if (qubits.empty()) throw_invalid("empty qubit subset");
    std::vector<int> sorted(qubits.begin(), qubits.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw_invalid("duplicate qubit in subset");
    }
    if (sorted.front() < 0 || sorted.back() >= n) throw_invalid("qubit subset out of range");
}

}  // namespace

std::vector<double> marginal_distribution(const StateVector &state,
                                          std::span<const int> qubits) {
    const int n = state.n_qubits();
    check_subset(n, qubits);
    const std::size_t w = qubits.size();
    std::vector<double> probs(std::size_t{1} << w, 0.0);
    const auto amp = state.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        std::size_t t = 0;
        for (std::size_t b = 0; b < w; ++b) {
            t = (t << 1) | ((i & qubit_mask(n, qubits[b])) ? 1u : 0u);
        }
        probs[t] += std::norm(amp[i]);
    }
    return probs;
}

double measure_probability(const StateVector &state, std::span<const int> qubits,
                           std::string_view outcome) {
    if (outcome.size() != qubits.size()) {
        throw_invalid("outcome length does not match qubit subset");
    }
    std::size_t t = 0;
    for (char c : outcome) {
        if (c != '0' && c != '1') throw_invalid("outcome must contain only '0'/'1'");
        t = (t << 1) | static_cast<std::size_t>(c - '0');
    }
    return std::clamp(marginal_distribution(state, qubits)[t], 0.0, 1.0);
}

std::vector<std::uint64_t> sample_distribution(std::span<const double> probabilities,
                                               std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw_invalid("shots must be >= 1");
    Rng rng = make_rng(seed);
    std::vector<std::uint64_t> counts(probabilities.size(), 0);
    // Conditional binomial decomposition of the multinomial.
    double remaining_mass = 1.0;
    std::uint64_t remaining = shots;
    for (std::size_t t = 0; t < probabilities.size() && remaining > 0; ++t) {
        const double p = std::max(0.0, probabilities[t]);
        if (t + 1 == probabilities.size() || remaining_mass <= p) {
            counts[t] = remaining;
            remaining = 0;
            break;
        }
        const double q = std::clamp(p / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        counts[t] = draw(rng);
        remaining -= counts[t];
        remaining_mass -= p;
    }
    return counts;
}

std::string outcome_bits(std::size_t value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int b = 0; b < width; ++b) {
        if (value & (std::size_t{1} << (width - 1 - b))) s[static_cast<std::size_t>(b)] = '1';
    }
    return s;
}

Histogram sample_counts(const StateVector &state, std::span<const int> qubits,
                        std::uint64_t shots, std::uint64_t seed) {
    const auto probs = marginal_distribution(state, qubits);
    const auto counts = sample_distribution(probs, shots, seed);
    Histogram h;
    for (std::size_t t = 0; t < counts.size(); ++t) {
        if (counts[t] > 0) h[outcome_bits(t, static_cast<int>(qubits.size()))] = counts[t];
    }
    return h;
}

}  // namespace qattr
