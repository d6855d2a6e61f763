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

#pragma once

#include <map>
#include <random>

#include "oracles.hpp"
#include "qattr/model.hpp"

namespace fixture {

/// Random amplitude-overflow model with a random single or two-qubit observable.
inline qattr::QuantumModel random_model(int n, int layers, std::mt19937_64 &rng,
                                        qattr::Activation act = qattr::Activation::TANH) {
    qattr::QuantumModel m;
    m.ansatz = {n, layers};
    m.theta = oracle::random_angles(static_cast<std::size_t>(2 * n * layers), rng);
    std::uniform_int_distribution<int> q(0, n - 1), p(0, 2);
    std::map<int, qattr::Pauli> terms;
    const qattr::Pauli kinds[] = {qattr::Pauli::X, qattr::Pauli::Y, qattr::Pauli::Z};
    terms[q(rng)] = kinds[p(rng)];
    if (n > 1 && p(rng) == 0) terms[q(rng)] = kinds[p(rng)];
    m.observable = qattr::ObservableSpec(terms);
    m.activation = act;
    m.encoding.kind = qattr::EncodingKind::AMPLITUDE_OVERFLOW;
    m.encoding.n_qubits = n;
    return m;
}

/// The same observable as a dense oracle matrix.
inline oracle::Mat observable_matrix(const qattr::QuantumModel &m) {
    std::map<int, char> terms;
    for (const auto &[q, p] : m.observable.terms()) {
        terms[q] = p == qattr::Pauli::X ? 'X' : p == qattr::Pauli::Y ? 'Y' : 'Z';
    }
    return oracle::pauli_string(m.ansatz.n_qubits, terms);
}

inline oracle::Mat dense_conjugated(const qattr::QuantumModel &m) {
    return oracle::conjugated(oracle::ansatz(m.ansatz.n_qubits, m.ansatz.n_layers, m.theta),
                              observable_matrix(m));
}

}  // namespace fixture
