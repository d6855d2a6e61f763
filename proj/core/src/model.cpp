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

#include "qattr/model.hpp"

#include <cctype>
#include <cmath>

#include "qattr/error.hpp"

namespace qattr {

ObservableSpec::ObservableSpec(std::map<int, Pauli> terms) {
    for (const auto &[q, p] : terms) {
        if (q < 0) throw_invalid("negative qubit in observable");
        if (p != Pauli::I) terms_.emplace(q, p);
    }
    if (terms_.empty()) throw_invalid("observable needs at least one non-identity Pauli");
}

ObservableSpec ObservableSpec::parse(const std::string &text) {
    std::map<int, Pauli> terms;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Pauli p;
        switch (std::toupper(static_cast<unsigned char>(c))) {
            case 'I': p = Pauli::I; break;
            case 'X': p = Pauli::X; break;
            case 'Y': p = Pauli::Y; break;
            case 'Z': p = Pauli::Z; break;
            default: throw Error(ErrorKind::Config, "bad observable '" + text + "'");
        }
        ++i;
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) throw Error(ErrorKind::Config, "observable term without qubit index in '" + text + "'");
        const int q = std::stoi(text.substr(i, j - i));
        if (terms.count(q)) throw Error(ErrorKind::Config, "qubit repeated in observable '" + text + "'");
        terms[q] = p;
        i = j;
    }
    try {
        return ObservableSpec(std::move(terms));
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, e.what());
    }
}

std::string ObservableSpec::to_string() const {
    std::string s;
    for (const auto &[q, p] : terms_) {
        s += p == Pauli::X ? 'X' : p == Pauli::Y ? 'Y' : 'Z';
        s += std::to_string(q);
    }
    return s;
}

int ObservableSpec::max_qubit() const { return terms_.rbegin()->first; }

Circuit ObservableSpec::circuit(int n_qubits) const {
    Circuit c(n_qubits);
    for (const auto &[q, p] : terms_) {
        switch (p) {
            case Pauli::X: c.add(Gate::x(q)); break;
            case Pauli::Y: c.add(Gate::y(q)); break;
            case Pauli::Z: c.add(Gate::z(q)); break;
            case Pauli::I: break;
        }
    }
    return c;
}

std::string to_string(Activation a) { return a == Activation::TANH ? "tanh" : "none"; }

Activation activation_from_string(const std::string &s) {
    if (s == "tanh") return Activation::TANH;
    if (s == "none") return Activation::NONE;
    throw Error(ErrorKind::Config, "unknown activation '" + s + "'");
}

double activate(Activation a, double f) { return a == Activation::TANH ? std::tanh(f) : f; }

double activation_derivative(Activation a, double f) {
    if (a == Activation::NONE) return 1.0;
    const double t = std::tanh(f);
    return 1.0 - t * t;
}

void QuantumModel::validate() const {
    if (ansatz.n_qubits < 1 || ansatz.n_qubits > kMaxQubits) throw_invalid("bad ansatz width");
    if (ansatz.n_layers < 0) throw_invalid("negative layer count");
    if (static_cast<int>(theta.size()) != ansatz.parameter_count()) {
        throw_invalid("theta has " + std::to_string(theta.size()) + " entries, ansatz needs " +
                      std::to_string(ansatz.parameter_count()));
    }
    if (encoding.n_qubits != ansatz.n_qubits) throw_invalid("encoding width differs from ansatz");
    if (observable.max_qubit() >= ansatz.n_qubits) throw_invalid("observable qubit out of range");
}

Circuit build_ansatz_circuit(const AnsatzSpec &spec, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != spec.parameter_count()) {
        throw_invalid("theta length " + std::to_string(theta.size()) + " does not match ansatz (" +
                      std::to_string(spec.parameter_count()) + ")");
    }
    const int n = spec.n_qubits;
    Circuit c(n);
    for (int l = 0; l < spec.n_layers; ++l) {
        const std::size_t base = static_cast<std::size_t>(2 * n * l);
        for (int q = 0; q < n; ++q) c.add(Gate::rx(q, theta[base + static_cast<std::size_t>(q)]));
        for (int q = 0; q < n; ++q) {
            c.add(Gate::rz(q, theta[base + static_cast<std::size_t>(n + q)]));
        }
        for (int q = 0; q + 1 < n; ++q) c.add(Gate::cnot(q, q + 1));
    }
    return c;
}

double pauli_expectation(const ObservableSpec &observable, const StateVector &state) {
    const StateVector o_psi = run_circuit(observable.circuit(state.n_qubits()), state);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < state.dimension(); ++i) acc += std::conj(state[i]) * o_psi[i];
    return acc.real();
}

double evaluate_state(const QuantumModel &model, const StateVector &input) {
    model.validate();
    if (input.n_qubits() != model.ansatz.n_qubits) throw_invalid("input width mismatch");
    const StateVector out = run_circuit(build_ansatz_circuit(model.ansatz, model.theta), input);
    return pauli_expectation(model.observable, out);
}

ModelOutput evaluate(const QuantumModel &model, const EncodedInput &input) {
    model.validate();
    if (input.mode.kind != model.encoding.kind || input.mode.n_qubits != model.encoding.n_qubits) {
        throw_invalid("input encoding does not match the model encoding");
    }
    double f;
    if (input.mode.kind == EncodingKind::ANGLE) {
        StateVector s(model.ansatz.n_qubits);
        run_circuit_in_place(encode_angle(input.angles, model.ansatz.n_qubits, 1.0), s);
        f = evaluate_state(model, s);
    } else {
        f = evaluate_state(model, StateVector::from_real(input.amplitudes));
    }
    return {f, activate(model.activation, f)};
}

Circuit conjugated_observable_circuit(const QuantumModel &model) {
    model.validate();
    const Circuit u = build_ansatz_circuit(model.ansatz, model.theta);
    Circuit c(model.ansatz.n_qubits);
    c.append(u);
    c.append(model.observable.circuit(model.ansatz.n_qubits));
    c.append(u.inverse());
    return c;
}

Matrix conjugated_observable_matrix(const QuantumModel &model) {
    const Circuit c = conjugated_observable_circuit(model);
    const int n = model.ansatz.n_qubits;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Matrix m(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        StateVector s(n);
        auto d = s.data();
        d[0] = 0.0;
        d[static_cast<std::size_t>(j)] = 1.0;
        run_circuit_in_place(c, s);
        for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = s[static_cast<std::size_t>(i)];
    }
    return m;
}

BatchEvaluator::BatchEvaluator(const QuantumModel &model) {
    if (!model.encoding.is_amplitude()) throw_invalid("batch evaluation needs an amplitude model");
    const Matrix m = conjugated_observable_matrix(model);
    // Symmetrize: the imaginary antisymmetric part drops out of x^T M x.
    real_operator_ = 0.5 * (m.real() + m.real().transpose());
}

double BatchEvaluator::expectation(std::span<const double> amplitudes) const {
    const Eigen::Map<const Eigen::VectorXd> x(amplitudes.data(),
                                              static_cast<Eigen::Index>(amplitudes.size()));
    if (x.size() != real_operator_.rows()) throw_invalid("amplitude vector has wrong length");
    return x.dot(real_operator_ * x);
}

int label_from_score(double score) noexcept { return score < 0.0 ? -1 : 1; }

Classification classify(const QuantumModel &model, std::span<const double> raw_features) {
    const ModelOutput out = evaluate(model, encode(model.encoding, raw_features));
    return {label_from_score(out.output), out.output};
}

}  // namespace qattr
