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

/**
 * @file statevector.hpp
 * Dense statevector simulator.
 *
 * Bit ordering: basis index k corresponds to the bitstring b_k read with
 * qubit 0 as the MOST significant bit. For n qubits, qubit q lives at bit
 * position (n - 1 - q) of the index. Every module uses this convention; see
 * `qubit_mask`.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qattr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 16;
inline constexpr double kNormTolerance = 1e-10;

/// Index mask of qubit `q` in an `n_qubits` register (qubit 0 is the MSB).
constexpr std::size_t qubit_mask(int n_qubits, int q) noexcept {
    return std::size_t{1} << (n_qubits - 1 - q);
}

class StateVector {
   public:
    /// |0...0> on `n_qubits` qubits.
    explicit StateVector(int n_qubits);

    /// Takes ownership of `amplitudes`; length must be a power of two and the
    /// norm must be 1 within `tolerance`.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes,
                                       double tolerance = kNormTolerance);
    static StateVector from_real(std::span<const double> amplitudes,
                                 double tolerance = kNormTolerance);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    const Complex &operator[](std::size_t k) const { return amplitudes_[k]; }

    double norm_squared() const noexcept;

    /// Raw access for gate kernels. Callers must keep the state unitary.
    std::span<Complex> data() noexcept { return amplitudes_; }

   private:
    StateVector(int n_qubits, std::vector<Complex> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

    int n_qubits_;
    std::vector<Complex> amplitudes_;
};

enum class GateKind {
    H,
    X,
    Y,
    Z,
    S_DAG,
    RX,
    RZ,
    CNOT,
    CONTROLLED_UNITARY,
};

std::string to_string(GateKind kind);

struct Control {
    int qubit;
    int trigger;  // 0 or 1

    friend bool operator==(const Control &, const Control &) = default;
};

/// A gate with an arbitrary list of controls. Every kind may carry extra
/// controls; CNOT is stored as X on `targets[0]` with one control.
/// CONTROLLED_UNITARY carries a dense payload acting on `targets`, where
/// targets[0] is the most significant qubit of the payload's index.
struct Gate {
    GateKind kind;
    std::vector<int> targets;
    std::vector<Control> controls;
    double angle = 0.0;
    std::optional<Matrix> payload;

    static Gate h(int q) { return {GateKind::H, {q}, {}, 0.0, {}}; }
    static Gate x(int q) { return {GateKind::X, {q}, {}, 0.0, {}}; }
    static Gate y(int q) { return {GateKind::Y, {q}, {}, 0.0, {}}; }
    static Gate z(int q) { return {GateKind::Z, {q}, {}, 0.0, {}}; }
    static Gate s_dag(int q) { return {GateKind::S_DAG, {q}, {}, 0.0, {}}; }
    static Gate rx(int q, double theta) { return {GateKind::RX, {q}, {}, theta, {}}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, {}, theta, {}}; }
    static Gate cnot(int control, int target) {
        return {GateKind::CNOT, {target}, {{control, 1}}, 0.0, {}};
    }
    static Gate unitary(std::vector<int> targets, Matrix u) {
        return {GateKind::CONTROLLED_UNITARY, std::move(targets), {}, 0.0, std::move(u)};
    }

    /// Copy with one more control appended.
    Gate with_control(int qubit, int trigger) const;
    /// The inverse gate (same controls).
    Gate inverse() const;
    /// The 2x2 (or payload) matrix acting on the targets, ignoring controls.
    Matrix target_matrix() const;

    /// Throws if indices are out of range, overlapping, or the payload is not
    /// unitary.
    void validate(int n_qubits) const;
};

class Circuit {
   public:
    explicit Circuit(int n_qubits);

    int n_qubits() const noexcept { return n_qubits_; }
    const std::vector<Gate> &gates() const noexcept { return gates_; }
    std::size_t size() const noexcept { return gates_.size(); }
    bool empty() const noexcept { return gates_.empty(); }

    /// Validates then appends.
    Circuit &add(Gate gate);
    /// Appends every gate of `other`, which must not use more qubits.
    Circuit &append(const Circuit &other);

    /// Reversed order, each gate inverted.
    Circuit inverse() const;
    /// Every gate gets an extra control on `qubit` with `trigger`. The result
    /// lives on `n_total` qubits (defaults to the current width).
    Circuit controlled(int qubit, int trigger, int n_total = -1) const;
    /// Every gate gets the given controls.
    Circuit controlled(std::span<const Control> controls, int n_total) const;
    /// Same gates on a wider register.
    Circuit widened(int n_total) const;

   private:
    int n_qubits_;
    std::vector<Gate> gates_;
};

void apply_gate_in_place(StateVector &state, const Gate &gate);
StateVector apply_gate(StateVector state, const Gate &gate);
StateVector run_circuit(const Circuit &circuit, StateVector initial);
void run_circuit_in_place(const Circuit &circuit, StateVector &state);

/// Probability that measuring `qubits` yields `outcome` (one '0'/'1' per
/// qubit, in the order given).
double measure_probability(const StateVector &state, std::span<const int> qubits,
                           std::string_view outcome);

/// Full marginal distribution over `qubits`; entry t is the probability of
/// the outcome whose bitstring (qubits[0] first) reads as integer t.
std::vector<double> marginal_distribution(const StateVector &state,
                                          std::span<const int> qubits);

using Histogram = std::map<std::string, std::uint64_t>;

/// Draws `shots` measurements of `qubits` from the exact marginal.
/// Deterministic for a fixed seed.
Histogram sample_counts(const StateVector &state, std::span<const int> qubits,
                        std::uint64_t shots, std::uint64_t seed);

/// Multinomial draw from an explicit distribution. Entry t of the result
/// counts outcome t.
std::vector<std::uint64_t> sample_distribution(std::span<const double> probabilities,
                                               std::uint64_t shots, std::uint64_t seed);

std::string outcome_bits(std::size_t value, int width);

}  // namespace qattr
