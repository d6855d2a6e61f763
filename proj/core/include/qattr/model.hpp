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
 * @file model.hpp
 * Parameterized quantum classifier: hardware-efficient ansatz U(theta), a
 * Pauli-string observable O and an optional tanh head.
 *
 * F(x; theta) = <x| U^dagger O U |x>.
 *
 * Ansatz layout per layer: RX(theta) on every qubit, RZ(theta) on every
 * qubit, then the CNOT chain 0->1, 1->2, ..., (n-2)->(n-1). Within layer l,
 * theta[2nl + q] drives RX on qubit q and theta[2nl + n + q] drives RZ.
 */
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qattr/encoding.hpp"
#include "qattr/statevector.hpp"

namespace qattr {

struct AnsatzSpec {
    int n_qubits = 1;
    int n_layers = 0;

    int parameter_count() const noexcept { return 2 * n_qubits * n_layers; }
    /// 2nL rotations + (n-1)L CNOTs.
    int gate_count() const noexcept { return (3 * n_qubits - 1) * n_layers; }
};

enum class Pauli { I, X, Y, Z };

/// A product of Paulis, e.g. "Z0" or "X1Z3". Hermitian and unitary.
class ObservableSpec {
   public:
    ObservableSpec() : ObservableSpec(parse("Z0")) {}
    explicit ObservableSpec(std::map<int, Pauli> terms);

    static ObservableSpec parse(const std::string &text);
    std::string to_string() const;

    const std::map<int, Pauli> &terms() const noexcept { return terms_; }
    int max_qubit() const;
    /// The Pauli gates of O on an `n_qubits` register.
    Circuit circuit(int n_qubits) const;

    friend bool operator==(const ObservableSpec &, const ObservableSpec &) = default;

   private:
    std::map<int, Pauli> terms_;
};

enum class Activation { NONE, TANH };

std::string to_string(Activation a);
Activation activation_from_string(const std::string &s);
double activate(Activation a, double f);
/// d activate / dF at pre-activation value `f`.
double activation_derivative(Activation a, double f);

struct QuantumModel {
    AnsatzSpec ansatz;
    std::vector<double> theta;
    ObservableSpec observable;
    Activation activation = Activation::TANH;
    EncodingMode encoding;

    /// Throws on inconsistent widths or parameter count.
    void validate() const;
};

Circuit build_ansatz_circuit(const AnsatzSpec &spec, std::span<const double> theta);

struct ModelOutput {
    double expectation;  // F, pre-activation
    double output;       // activated
};

/// <psi|O|psi> for a Pauli string.
double pauli_expectation(const ObservableSpec &observable, const StateVector &state);

ModelOutput evaluate(const QuantumModel &model, const EncodedInput &input);
/// F for an arbitrary (possibly complex) input state, amplitude models only.
double evaluate_state(const QuantumModel &model, const StateVector &input);

/// Gates realizing U^dagger O U in application order: U, then O, then U^dagger.
Circuit conjugated_observable_circuit(const QuantumModel &model);

/// The dense Hermitian matrix U^dagger O U, column j obtained by simulating
/// the conjugated circuit on |b_j>.
Matrix conjugated_observable_matrix(const QuantumModel &model);

/// F(x) = x^T Re(M) x for real amplitude vectors; M from
/// `conjugated_observable_matrix`. Cheap batch evaluation.
class BatchEvaluator {
   public:
    explicit BatchEvaluator(const QuantumModel &model);
    double expectation(std::span<const double> amplitudes) const;

   private:
    Eigen::MatrixXd real_operator_;
};

struct Classification {
    int label;  // -1 or +1
    double score;
};

Classification classify(const QuantumModel &model, std::span<const double> raw_features);
int label_from_score(double score) noexcept;

}  // namespace qattr
