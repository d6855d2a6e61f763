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

#include "qattr/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qattr/error.hpp"

namespace qattr {

std::size_t EncodingMode::feature_slots() const noexcept {
    const std::size_t dim = std::size_t{1} << n_qubits;
    switch (kind) {
        case EncodingKind::AMPLITUDE_OVERFLOW: return dim - 1;
        case EncodingKind::AMPLITUDE_NORMALIZED: return dim;
        case EncodingKind::ANGLE: return static_cast<std::size_t>(n_qubits);
    }
    return 0;
}

std::string to_string(EncodingKind kind) {
    switch (kind) {
        case EncodingKind::AMPLITUDE_OVERFLOW: return "amplitude_overflow";
        case EncodingKind::AMPLITUDE_NORMALIZED: return "amplitude_normalized";
        case EncodingKind::ANGLE: return "angle";
    }
    return "?";
}

EncodingKind encoding_kind_from_string(const std::string &s) {
    if (s == "amplitude_overflow") return EncodingKind::AMPLITUDE_OVERFLOW;
    if (s == "amplitude_normalized") return EncodingKind::AMPLITUDE_NORMALIZED;
    if (s == "angle") return EncodingKind::ANGLE;
    throw Error(ErrorKind::Config, "unknown encoding kind '" + s + "'");
}

std::string to_string(FitPolicy policy) {
    switch (policy) {
        case FitPolicy::TRUNCATE_LAST: return "truncate_last";
        case FitPolicy::PAD_NEXT_QUBIT: return "pad_next_qubit";
        case FitPolicy::PLAIN_NORMALIZE: return "plain_normalize";
    }
    return "?";
}

FitPolicy fit_policy_from_string(const std::string &s) {
    if (s == "truncate_last") return FitPolicy::TRUNCATE_LAST;
    if (s == "pad_next_qubit") return FitPolicy::PAD_NEXT_QUBIT;
    if (s == "plain_normalize") return FitPolicy::PLAIN_NORMALIZE;
    throw Error(ErrorKind::Config, "unknown fit policy '" + s + "'");
}

double overflow_scale(int n_qubits) {
    return 1.0 / std::sqrt(static_cast<double>((std::size_t{1} << n_qubits) - 1));
}

namespace {

void check_unit_interval(std::span<const double> features) {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (!(features[i] >= 0.0 && features[i] <= 1.0)) {
            throw_invalid("feature " + std::to_string(i) + " = " + std::to_string(features[i]) +
                          " outside [0, 1]");
        }
    }
}

}  // namespace

EncodedInput encode_amplitude_overflow(std::span<const double> features, int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw_invalid("bad qubit count");
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (features.size() > dim - 1) {
        throw_invalid(std::to_string(features.size()) + " features exceed the " +
                      std::to_string(dim - 1) + " overflow-encoding slots");
    }
    check_unit_interval(features);
    const double s = overflow_scale(n_qubits);
    EncodedInput out;
    out.raw_features.assign(features.begin(), features.end());
    out.mode = {EncodingKind::AMPLITUDE_OVERFLOW, n_qubits, FitPolicy::TRUNCATE_LAST, 1.0};
    out.amplitudes.assign(dim, 0.0);
    double used = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        out.amplitudes[i] = s * features[i];
        used += out.amplitudes[i] * out.amplitudes[i];
    }
    out.amplitudes[dim - 1] = std::sqrt(std::max(0.0, 1.0 - used));
    return out;
}

EncodedInput encode_amplitude_normalized(std::span<const double> features, int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw_invalid("bad qubit count");
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (features.size() > dim) {
        throw_invalid(std::to_string(features.size()) + " features exceed " +
                      std::to_string(dim) + " amplitudes");
    }
    double norm = 0.0;
    for (double f : features) norm += f * f;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) {
        throw_invalid("all-zero input cannot be normalized; use a non-degenerate baseline");
    }
    EncodedInput out;
    out.raw_features.assign(features.begin(), features.end());
    out.mode = {EncodingKind::AMPLITUDE_NORMALIZED, n_qubits, FitPolicy::TRUNCATE_LAST, 1.0};
    out.amplitudes.assign(dim, 0.0);
    for (std::size_t i = 0; i < features.size(); ++i) out.amplitudes[i] = features[i] / norm;
    return out;
}

EncodingMode resolve_encoding(EncodingKind kind, std::size_t feature_count, int n_qubits,
                              FitPolicy policy) {
    EncodingMode mode{kind, n_qubits, policy, 1.0};
    if (policy == FitPolicy::PLAIN_NORMALIZE && kind == EncodingKind::AMPLITUDE_OVERFLOW) {
        mode.kind = EncodingKind::AMPLITUDE_NORMALIZED;
    }
    if (policy != FitPolicy::TRUNCATE_LAST) {
        while (mode.feature_slots() < feature_count) {
            if (mode.n_qubits >= kMaxQubits) throw_invalid("feature count exceeds simulator cap");
            ++mode.n_qubits;
        }
    }
    return mode;
}

EncodedInput encode(const EncodingMode &mode, std::span<const double> features) {
    std::span<const double> used = features;
    if (features.size() > mode.feature_slots()) {
        if (mode.fit_policy != FitPolicy::TRUNCATE_LAST) {
            throw_invalid(std::to_string(features.size()) + " features do not fit " +
                          std::to_string(mode.feature_slots()) + " slots");
        }
        used = features.first(mode.feature_slots());
    }
    EncodedInput out;
    switch (mode.kind) {
        case EncodingKind::AMPLITUDE_OVERFLOW:
            out = encode_amplitude_overflow(used, mode.n_qubits);
            break;
        case EncodingKind::AMPLITUDE_NORMALIZED:
            out = encode_amplitude_normalized(used, mode.n_qubits);
            break;
        case EncodingKind::ANGLE:
            out.angles.assign(used.begin(), used.end());
            for (auto &a : out.angles) a *= mode.angle_scale;
            break;
    }
    out.raw_features.assign(features.begin(), features.end());
    out.mode = mode;
    return out;
}

StateVector prepare_basis_state(std::size_t k, int n_qubits) {
    StateVector s(n_qubits);
    if (k >= s.dimension()) {
        throw_invalid("basis index " + std::to_string(k) + " out of range");
    }
    auto d = s.data();
    d[0] = 0.0;
    d[k] = 1.0;
    return s;
}

Circuit basis_state_circuit(std::size_t k, int n_qubits) {
    Circuit c(n_qubits);
    if (k >= (std::size_t{1} << n_qubits)) {
        throw_invalid("basis index " + std::to_string(k) + " out of range");
    }
    for (int q = 0; q < n_qubits; ++q) {
        if (k & qubit_mask(n_qubits, q)) c.add(Gate::x(q));
    }
    return c;
}

Circuit encode_angle(std::span<const double> features, int n_qubits, double scale) {
    if (features.size() > static_cast<std::size_t>(n_qubits)) {
        throw_invalid(std::to_string(features.size()) + " angle features exceed " +
                      std::to_string(n_qubits) + " qubits");
    }
    Circuit c(n_qubits);
    for (std::size_t i = 0; i < features.size(); ++i) {
        c.add(Gate::rx(static_cast<int>(i), scale * features[i]));
    }
    return c;
}

namespace {

// Y rotation from the native set: RY(t) = RZ(pi/2) RX(t) RZ(-pi/2).
void add_ry(Circuit &c, int q, double theta, const std::vector<Control> &controls) {
    constexpr double half_pi = std::numbers::pi / 2;
    std::vector<Gate> seq;
    if (std::abs(theta - std::numbers::pi) < 1e-14) {
        // Acting on a fresh |0>, RY(pi) and X agree.
        seq.push_back(Gate::x(q));
    } else {
        seq.push_back(Gate::rz(q, -half_pi));
        seq.push_back(Gate::rx(q, theta));
        seq.push_back(Gate::rz(q, half_pi));
    }
    for (auto &g : seq) {
        g.controls = controls;
        c.add(std::move(g));
    }
}

}  // namespace

Circuit amplitude_state_preparation_circuit(std::span<const double> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || !std::has_single_bit(dim)) throw_invalid("target length must be 2^n");
    const int n = std::countr_zero(dim);
    double norm = 0.0;
    for (double a : amplitudes) norm += a * a;
    if (std::abs(norm - 1.0) > 1e-10) {
        throw_invalid("state preparation target is not normalized");
    }

    // weight[q][p]: squared norm of the subtree below prefix p at level q.
    std::vector<std::vector<double>> weight(static_cast<std::size_t>(n) + 1);
    weight[static_cast<std::size_t>(n)].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) weight[static_cast<std::size_t>(n)][i] = amplitudes[i] * amplitudes[i];
    for (int q = n - 1; q >= 0; --q) {
        auto &lvl = weight[static_cast<std::size_t>(q)];
        const auto &below = weight[static_cast<std::size_t>(q) + 1];
        lvl.resize(std::size_t{1} << q);
        for (std::size_t p = 0; p < lvl.size(); ++p) lvl[p] = below[2 * p] + below[2 * p + 1];
    }

    constexpr double kZeroWeight = 1e-24;
    Circuit c(n);
    for (int q = 0; q < n; ++q) {
        const auto &parent = weight[static_cast<std::size_t>(q)];
        const auto &child = weight[static_cast<std::size_t>(q) + 1];
        std::vector<std::pair<std::size_t, double>> rotations;
        for (std::size_t p = 0; p < parent.size(); ++p) {
            if (parent[p] <= kZeroWeight) continue;
            double theta;
            if (q == n - 1) {
                theta = 2.0 * std::atan2(amplitudes[2 * p + 1], amplitudes[2 * p]);
            } else {
                theta = 2.0 * std::atan2(std::sqrt(child[2 * p + 1]), std::sqrt(child[2 * p]));
            }
            rotations.emplace_back(p, theta);
        }
        const bool uniform = std::all_of(rotations.begin(), rotations.end(), [&](const auto &r) {
            return r.second == rotations.front().second;
        });
        if (uniform) {
            // Prefixes with zero weight carry no amplitude, so one
            // uncontrolled rotation serves every live prefix.
            if (!rotations.empty() && rotations.front().second != 0.0) {
                add_ry(c, q, rotations.front().second, {});
            }
            continue;
        }
        for (const auto &[p, theta] : rotations) {
            if (theta == 0.0) continue;
            std::vector<Control> controls;
            for (int b = 0; b < q; ++b) {
                controls.push_back({b, static_cast<int>((p >> (q - 1 - b)) & 1u)});
            }
            add_ry(c, q, theta, controls);
        }
    }
    return c;
}

Circuit amplitude_state_preparation_circuit(const EncodedInput &target) {
    if (!target.mode.is_amplitude()) throw_invalid("state preparation needs an amplitude input");
    return amplitude_state_preparation_circuit(target.amplitudes);
}

Circuit preparation_circuit(const EncodedInput &input) {
    if (input.mode.kind == EncodingKind::ANGLE) {
        return encode_angle(input.angles, input.mode.n_qubits, 1.0);
    }
    return amplitude_state_preparation_circuit(input);
}

Matrix state_preparation_unitary(std::span<const Complex> amplitudes) {
    const auto dim = static_cast<Eigen::Index>(amplitudes.size());
    double norm = 0.0;
    for (const auto &a : amplitudes) norm += std::norm(a);
    if (dim < 2 || std::abs(norm - 1.0) > 1e-10) throw_invalid("target is not a normalized state");
    // Modified Gram-Schmidt over (target, e_0, e_1, ...).
    Matrix u = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) u(i, 0) = amplitudes[static_cast<std::size_t>(i)];
    Eigen::Index filled = 1;
    for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Unit(dim, e);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < filled; ++j) v -= u.col(j) * u.col(j).dot(v);
        }
        const double vn = v.norm();
        if (vn < 1e-6) continue;
        u.col(filled++) = v / vn;
    }
    return u;
}

}  // namespace qattr
