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

#include "qattr/gradients.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "qattr/error.hpp"
#include "qattr/rng.hpp"

namespace qattr {

std::string to_string(GradientMethod m) {
    switch (m) {
        case GradientMethod::EXACT: return "exact";
        case GradientMethod::HADAMARD_SINGLE: return "hadamard_single";
        case GradientMethod::HADAMARD_MULTI: return "hadamard_multi";
        case GradientMethod::PARAM_SHIFT: return "param_shift";
    }
    return "?";
}

GradientMethod gradient_method_from_string(const std::string &s) {
    if (s == "exact") return GradientMethod::EXACT;
    if (s == "hadamard_single") return GradientMethod::HADAMARD_SINGLE;
    if (s == "hadamard_multi") return GradientMethod::HADAMARD_MULTI;
    if (s == "param_shift") return GradientMethod::PARAM_SHIFT;
    throw Error(ErrorKind::Config, "unknown gradient method '" + s + "'");
}

ShotBudget ShotBudget::shots(std::uint64_t n) {
    if (n == 0) throw_invalid("shot count must be >= 1");
    return ShotBudget{n};
}

std::string ShotBudget::to_string() const {
    return is_exact() ? std::string{"exact"} : std::to_string(shots_);
}

// ---- exact route ----------------------------------------------------------

std::vector<Complex> conjugated_overlaps(const Circuit &observable, const StateVector &x) {
    const StateVector ox = run_circuit(observable, x);
    return {ox.amplitudes().begin(), ox.amplitudes().end()};
}

namespace {

void require_amplitude(const QuantumModel &model) {
    if (!model.encoding.is_amplitude()) {
        throw_invalid("amplitude gradients need an amplitude-encoded model; use "
                      "parameter_shift_gradient for angle inputs");
    }
}

GradientVector overlap_gradient(const QuantumModel &model, const StateVector &x, Part part) {
    require_amplitude(model);
    if (x.n_qubits() != model.ansatz.n_qubits) throw_invalid("input width mismatch");
    const auto g = conjugated_overlaps(conjugated_observable_circuit(model), x);
    GradientVector out;
    out.values.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.values[k] = 2.0 * (part == Part::REAL ? g[k].real() : g[k].imag());
    }
    return out;
}

}  // namespace

GradientVector exact_input_gradient(const QuantumModel &model, const EncodedInput &input) {
    if (!input.mode.is_amplitude()) {
        throw_invalid("exact_input_gradient needs an amplitude-encoded input");
    }
    return overlap_gradient(model, StateVector::from_real(input.amplitudes), Part::REAL);
}

GradientVector exact_input_gradient(const QuantumModel &model, const StateVector &x) {
    return overlap_gradient(model, x, Part::REAL);
}

GradientVector exact_input_gradient_imag(const QuantumModel &model, const StateVector &x) {
    return overlap_gradient(model, x, Part::IMAG);
}

// ---- single-ancilla Hadamard test ------------------------------------------

Circuit hadamard_test_circuit(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                              Part part) {
    const int n = observable.n_qubits();
    if (prep_x.n_qubits() != n) throw_invalid("preparation and observable widths differ");
    if (k >= (std::size_t{1} << n)) throw_invalid("component index out of range");
    const int a = n;
    Circuit c(n + 1);
    c.add(Gate::h(a));
    if (part == Part::IMAG) c.add(Gate::s_dag(a));
    c.append(prep_x.controlled(a, 1, n + 1));
    c.append(basis_state_circuit(k, n).controlled(a, 0, n + 1));
    c.append(observable.controlled(a, 1, n + 1));
    c.add(Gate::h(a));
    return c;
}

double hadamard_test_probability(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                                 Part part) {
    const Circuit c = hadamard_test_circuit(prep_x, k, observable, part);
    const StateVector s = run_circuit(c, StateVector(c.n_qubits()));
    const int a = c.n_qubits() - 1;
    return measure_probability(s, std::span<const int>(&a, 1), "0");
}

double hadamard_test_component(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                               ShotBudget shots, std::uint64_t seed, Part part) {
    const Circuit c = hadamard_test_circuit(prep_x, k, observable, part);
    const StateVector s = run_circuit(c, StateVector(c.n_qubits()));
    const int a = c.n_qubits() - 1;
    double p0;
    if (shots.is_exact()) {
        p0 = measure_probability(s, std::span<const int>(&a, 1), "0");
    } else {
        const Histogram h = sample_counts(s, std::span<const int>(&a, 1), shots.count(), seed);
        const auto it = h.find("0");
        const double zeros = it == h.end() ? 0.0 : static_cast<double>(it->second);
        p0 = zeros / static_cast<double>(shots.count());
    }
    return 4.0 * p0 - 2.0;
}

double hadamard_test_gradient_component(const QuantumModel &model, const EncodedInput &input,
                                        std::size_t k, ShotBudget shots, std::uint64_t seed,
                                        Part part) {
    require_amplitude(model);
    return hadamard_test_component(amplitude_state_preparation_circuit(input), k,
                                   conjugated_observable_circuit(model), shots, seed, part);
}

// ---- multi-ancilla Hadamard test -------------------------------------------

AncillaLinearSystem AncillaLinearSystem::make(int m, std::vector<std::size_t> component_indices,
                                              std::vector<double> probabilities) {
    if (m < 1 || m > kMaxAncillas) {
        throw_invalid("ancilla count " + std::to_string(m) + " outside [1, " +
                      std::to_string(kMaxAncillas) + "]");
    }
    const std::size_t outcomes = std::size_t{1} << m;
    if (component_indices.size() != outcomes - 1) {
        throw_invalid("need exactly 2^m - 1 component indices");
    }
    if (!probabilities.empty() && probabilities.size() != outcomes) {
        throw_invalid("need one probability per ancilla outcome");
    }
    AncillaLinearSystem sys;
    sys.m = m;
    sys.component_indices = std::move(component_indices);
    sys.probabilities = std::move(probabilities);
    const auto dim = static_cast<Eigen::Index>(outcomes);
    sys.sign_matrix.resize(dim, dim);
    for (Eigen::Index t = 0; t < dim; ++t) {
        for (Eigen::Index u = 0; u < dim; ++u) {
            const auto bits = std::popcount(static_cast<std::size_t>(t & u));
            sys.sign_matrix(t, u) = (bits % 2 == 0) ? 1.0 : -1.0;
        }
    }
    return sys;
}

double AncillaLinearSystem::sign(std::size_t t, std::size_t s) const {
    const std::size_t ones = (std::size_t{1} << m) - 1;
    return sign_matrix(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s ^ ones));
}

std::vector<double> AncillaLinearSystem::predicted_probabilities(
    std::span<const double> re_overlaps) const {
    const std::size_t outcomes = std::size_t{1} << m;
    const double scale = 1.0 / static_cast<double>(outcomes * outcomes);
    std::vector<double> p(outcomes);
    for (std::size_t t = 0; t < outcomes; ++t) {
        double acc = static_cast<double>(outcomes);
        for (std::size_t s = 0; s + 1 < outcomes; ++s) acc += 2.0 * sign(t, s) * re_overlaps[s];
        p[t] = scale * acc;
    }
    return p;
}

std::vector<double> AncillaLinearSystem::solve() const {
    const std::size_t outcomes = std::size_t{1} << m;
    if (probabilities.size() != outcomes) throw_invalid("linear system has no probabilities");
    const double scale = 1.0 / static_cast<double>(outcomes * outcomes);
    const auto rows = static_cast<Eigen::Index>(outcomes);
    const auto cols = static_cast<Eigen::Index>(outcomes - 1);
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index t = 0; t < rows; ++t) {
        for (Eigen::Index s = 0; s < cols; ++s) {
            a(t, s) = 2.0 * scale *
                      sign(static_cast<std::size_t>(t), static_cast<std::size_t>(s));
        }
        b(t) = probabilities[static_cast<std::size_t>(t)] - scale * static_cast<double>(outcomes);
    }
    const Eigen::VectorXd g = a.colPivHouseholderQr().solve(b);
    return {g.data(), g.data() + g.size()};
}

Circuit hadamard_multi_circuit(const Circuit &prep_x, std::span<const std::size_t> indices,
                               int m, const Circuit &observable) {
    const int n = observable.n_qubits();
    if (m < 1 || m > kMaxAncillas) throw_invalid("ancilla count out of range");
    if (prep_x.n_qubits() != n) throw_invalid("preparation and observable widths differ");
    const std::size_t slots = (std::size_t{1} << m) - 1;
    if (indices.size() != slots) {
        throw_invalid(std::to_string(m) + " ancillas need exactly " + std::to_string(slots) +
                      " component indices");
    }
    std::set<std::size_t> distinct(indices.begin(), indices.end());
    if (distinct.size() != indices.size()) throw_invalid("duplicate component indices");
    for (auto k : indices) {
        if (k >= (std::size_t{1} << n)) throw_invalid("component index out of range");
    }

    const int total = n + m;
    Circuit c(total);
    for (int j = 0; j < m; ++j) c.add(Gate::h(n + j));
    auto slot_controls = [&](std::size_t s) {
        std::vector<Control> ctl;
        for (int j = 0; j < m; ++j) {
            ctl.push_back({n + j, static_cast<int>((s >> (m - 1 - j)) & 1u)});
        }
        return ctl;
    };
    for (std::size_t s = 0; s < slots; ++s) {
        const auto ctl = slot_controls(s);
        c.append(basis_state_circuit(indices[s], n).controlled(ctl, total));
    }
    const auto ones = slot_controls(slots);
    c.append(prep_x.controlled(ones, total));
    c.append(observable.controlled(ones, total));
    for (int j = 0; j < m; ++j) c.add(Gate::h(n + j));
    return c;
}

std::vector<double> hadamard_multi_distribution(const Circuit &prep_x,
                                                std::span<const std::size_t> indices, int m,
                                                const Circuit &observable, ShotBudget shots,
                                                std::uint64_t seed) {
    const Circuit c = hadamard_multi_circuit(prep_x, indices, m, observable);
    const StateVector s = run_circuit(c, StateVector(c.n_qubits()));
    std::vector<int> ancillas;
    for (int j = 0; j < m; ++j) ancillas.push_back(observable.n_qubits() + j);
    auto probs = marginal_distribution(s, ancillas);
    if (!shots.is_exact()) {
        const auto counts = sample_distribution(probs, shots.count(), seed);
        for (std::size_t t = 0; t < probs.size(); ++t) {
            probs[t] = static_cast<double>(counts[t]) / static_cast<double>(shots.count());
        }
    }
    return probs;
}

std::vector<double> hadamard_multi_components(const Circuit &prep_x,
                                              std::span<const std::size_t> indices, int m,
                                              const Circuit &observable, ShotBudget shots,
                                              std::uint64_t seed) {
    auto probs = hadamard_multi_distribution(prep_x, indices, m, observable, shots, seed);
    const auto sys = AncillaLinearSystem::make(
        m, std::vector<std::size_t>(indices.begin(), indices.end()), std::move(probs));
    auto g = sys.solve();
    for (auto &v : g) v *= 2.0;
    return g;
}

GradientVector hadamard_multi_gradient(const QuantumModel &model, const EncodedInput &input,
                                       std::span<const std::size_t> indices, int m,
                                       ShotBudget shots, std::uint64_t seed) {
    require_amplitude(model);
    GradientVector out;
    out.values = hadamard_multi_components(amplitude_state_preparation_circuit(input), indices, m,
                                           conjugated_observable_circuit(model), shots, seed);
    out.method = GradientMethod::HADAMARD_MULTI;
    out.ancillas = m;
    out.shots = shots;
    out.seed = seed;
    return out;
}

// ---- full gradients --------------------------------------------------------

namespace {

std::vector<double> circuit_gradient(const Circuit &prep_x, const Circuit &observable,
                                     const GradientBackend &backend, std::uint64_t seed) {
    const std::size_t dim = std::size_t{1} << observable.n_qubits();
    std::vector<double> values(dim, 0.0);
    if (backend.method == GradientMethod::HADAMARD_SINGLE) {
        for (std::size_t k = 0; k < dim; ++k) {
            values[k] = hadamard_test_component(prep_x, k, observable, backend.shots,
                                                derive_seed(seed, {k}), Part::REAL);
        }
        return values;
    }
    if (backend.method != GradientMethod::HADAMARD_MULTI) {
        throw_invalid("circuit gradient needs a Hadamard-test backend");
    }
    const int m = backend.ancillas;
    if (m < 1 || m > kMaxAncillas) throw_invalid("ancilla count out of range");
    const std::size_t slots = (std::size_t{1} << m) - 1;
    if (slots > dim) throw_invalid("more ancilla slots than amplitude components");
    std::size_t group = 0;
    for (std::size_t start = 0; start < dim; start += slots, ++group) {
        std::vector<std::size_t> idx;
        for (std::size_t k = start; k < std::min(dim, start + slots); ++k) idx.push_back(k);
        const std::size_t live = idx.size();
        // Pad the last group with components outside it; their values are
        // discarded.
        for (std::size_t k = 0; idx.size() < slots; ++k) {
            if (k < start || k >= start + live) idx.push_back(k);
        }
        const auto g = hadamard_multi_components(prep_x, idx, m, observable, backend.shots,
                                                 derive_seed(seed, {group}));
        for (std::size_t j = 0; j < live; ++j) values[idx[j]] = g[j];
    }
    return values;
}

}  // namespace

GradientVector amplitude_gradient(const QuantumModel &model, const EncodedInput &input,
                                  const GradientBackend &backend, std::uint64_t seed) {
    require_amplitude(model);
    GradientVector out;
    out.method = backend.method;
    out.shots = backend.shots;
    out.seed = seed;
    switch (backend.method) {
        case GradientMethod::EXACT:
            out.values = exact_input_gradient(model, input).values;
            out.shots = ShotBudget::exact();
            break;
        case GradientMethod::HADAMARD_SINGLE:
            out.ancillas = 1;
            out.values = circuit_gradient(amplitude_state_preparation_circuit(input),
                                          conjugated_observable_circuit(model), backend, seed);
            break;
        case GradientMethod::HADAMARD_MULTI:
            out.ancillas = backend.ancillas;
            out.values = circuit_gradient(amplitude_state_preparation_circuit(input),
                                          conjugated_observable_circuit(model), backend, seed);
            break;
        case GradientMethod::PARAM_SHIFT:
            throw_invalid("parameter shift does not apply to amplitude inputs");
    }
    return out;
}

std::vector<double> amplitude_gradient_at(const QuantumModel &model,
                                          std::span<const double> amplitudes,
                                          const GradientBackend &backend, std::uint64_t seed) {
    require_amplitude(model);
    const std::size_t dim = std::size_t{1} << model.ansatz.n_qubits;
    if (amplitudes.size() != dim) throw_invalid("amplitude vector has wrong length");
    double r = 0.0;
    for (double a : amplitudes) r += a * a;
    r = std::sqrt(r);
    if (r == 0.0) return std::vector<double>(dim, 0.0);
    std::vector<double> unit(amplitudes.begin(), amplitudes.end());
    for (auto &a : unit) a /= r;
    std::vector<double> g;
    if (backend.method == GradientMethod::EXACT) {
        g = exact_input_gradient(model, StateVector::from_real(unit)).values;
    } else if (backend.method == GradientMethod::PARAM_SHIFT) {
        throw_invalid("parameter shift does not apply to amplitude inputs");
    } else {
        g = circuit_gradient(amplitude_state_preparation_circuit(unit),
                             conjugated_observable_circuit(model), backend, seed);
    }
    for (auto &v : g) v *= r;
    return g;
}

GradientVector parameter_shift_gradient(const QuantumModel &model, const EncodedInput &input,
                                        std::span<const int> which) {
    model.validate();
    std::vector<int> params(which.begin(), which.end());
    if (params.empty()) {
        for (int i = 0; i < model.ansatz.parameter_count(); ++i) params.push_back(i);
    }
    constexpr double shift = std::numbers::pi / 2;
    GradientVector out;
    out.method = GradientMethod::PARAM_SHIFT;
    out.values.reserve(params.size());
    QuantumModel shifted = model;
    for (int i : params) {
        if (i < 0 || i >= model.ansatz.parameter_count()) {
            throw_invalid("parameter index " + std::to_string(i) + " out of range");
        }
        const auto idx = static_cast<std::size_t>(i);
        shifted.theta[idx] = model.theta[idx] + shift;
        const double plus = evaluate(shifted, input).expectation;
        shifted.theta[idx] = model.theta[idx] - shift;
        const double minus = evaluate(shifted, input).expectation;
        shifted.theta[idx] = model.theta[idx];
        out.values.push_back(0.5 * (plus - minus));
    }
    return out;
}

GradientVector angle_input_gradient(const QuantumModel &model, const EncodedInput &input) {
    if (input.mode.kind != EncodingKind::ANGLE) throw_invalid("angle_input_gradient needs angle input");
    constexpr double shift = std::numbers::pi / 2;
    GradientVector out;
    out.method = GradientMethod::PARAM_SHIFT;
    out.values.assign(input.raw_features.size(), 0.0);
    EncodedInput shifted = input;
    for (std::size_t i = 0; i < input.angles.size(); ++i) {
        shifted.angles[i] = input.angles[i] + shift;
        const double plus = evaluate(model, shifted).expectation;
        shifted.angles[i] = input.angles[i] - shift;
        const double minus = evaluate(model, shifted).expectation;
        shifted.angles[i] = input.angles[i];
        out.values[i] = input.mode.angle_scale * 0.5 * (plus - minus);
    }
    return out;
}

std::vector<double> pixel_space_gradient(const QuantumModel &model,
                                         std::span<const double> raw_features,
                                         const GradientBackend &backend, std::uint64_t seed) {
    const EncodedInput enc = encode(model.encoding, raw_features);
    std::vector<double> out(raw_features.size(), 0.0);
    switch (model.encoding.kind) {
        case EncodingKind::ANGLE: {
            if (backend.method != GradientMethod::PARAM_SHIFT &&
                backend.method != GradientMethod::EXACT) {
                throw_invalid("angle models take parameter-shift input gradients");
            }
            return angle_input_gradient(model, enc).values;
        }
        case EncodingKind::AMPLITUDE_OVERFLOW: {
            const double a_of = enc.overflow_amplitude();
            if (a_of <= kOverflowEpsilon) throw NearOverflowSingularity(a_of);
            const auto g = amplitude_gradient(model, enc, backend, seed).values;
            const double s = overflow_scale(model.encoding.n_qubits);
            const double g_of = g.back();
            const std::size_t used = std::min(raw_features.size(), model.encoding.feature_slots());
            for (std::size_t i = 0; i < used; ++i) {
                out[i] = s * g[i] - (s * s * raw_features[i] / a_of) * g_of;
            }
            return out;
        }
        case EncodingKind::AMPLITUDE_NORMALIZED: {
            const auto g = amplitude_gradient(model, enc, backend, seed).values;
            const std::size_t used = std::min(raw_features.size(), model.encoding.feature_slots());
            double norm = 0.0, proj = 0.0;
            for (std::size_t i = 0; i < used; ++i) norm += raw_features[i] * raw_features[i];
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < used; ++i) proj += enc.amplitudes[i] * g[i];
            for (std::size_t i = 0; i < used; ++i) {
                out[i] = (g[i] - enc.amplitudes[i] * proj) / norm;
            }
            return out;
        }
    }
    return out;
}

}  // namespace qattr
