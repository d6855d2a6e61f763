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
 * @file encoding.hpp
 * Feature-to-state encoders.
 *
 * AMPLITUDE_OVERFLOW reserves the last basis state (index 2^n - 1) as an
 * overflow slot: pixel i lands on amplitude s * p_i with s = (2^n - 1)^(-1/2),
 * and the overflow amplitude absorbs the remaining norm. A pixel therefore
 * maps to the same amplitude regardless of the rest of the image.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qattr/statevector.hpp"

namespace qattr {

enum class EncodingKind {
    AMPLITUDE_OVERFLOW,
    AMPLITUDE_NORMALIZED,
    ANGLE,
};

/// How to reconcile a feature count with the slots a register offers.
enum class FitPolicy {
    TRUNCATE_LAST,    // drop trailing features that do not fit
    PAD_NEXT_QUBIT,   // grow the register by one qubit
    PLAIN_NORMALIZE,  // switch to AMPLITUDE_NORMALIZED (2^n slots, no overflow)
};

struct EncodingMode {
    EncodingKind kind = EncodingKind::AMPLITUDE_OVERFLOW;
    int n_qubits = 1;
    FitPolicy fit_policy = FitPolicy::TRUNCATE_LAST;
    /// ANGLE only: RX angle applied per unit feature.
    double angle_scale = 1.0;

    bool is_amplitude() const noexcept { return kind != EncodingKind::ANGLE; }
    /// Number of raw features the mode consumes.
    std::size_t feature_slots() const noexcept;
};

std::string to_string(EncodingKind kind);
EncodingKind encoding_kind_from_string(const std::string &s);
std::string to_string(FitPolicy policy);
FitPolicy fit_policy_from_string(const std::string &s);

struct EncodedInput {
    std::vector<double> raw_features;
    EncodingMode mode;
    /// Amplitude modes: length 2^n, unit norm. Empty for ANGLE.
    std::vector<double> amplitudes;
    /// ANGLE mode: one rotation angle per qubit. Empty otherwise.
    std::vector<double> angles;

    /// Overflow slot value (AMPLITUDE_OVERFLOW only).
    double overflow_amplitude() const { return amplitudes.back(); }
};

/// (2^n - 1)^(-1/2).
double overflow_scale(int n_qubits);

EncodedInput encode_amplitude_overflow(std::span<const double> features, int n_qubits);
EncodedInput encode_amplitude_normalized(std::span<const double> features, int n_qubits);

/// Picks the register for `feature_count` features given a requested width
/// and fit policy.
EncodingMode resolve_encoding(EncodingKind kind, std::size_t feature_count, int n_qubits,
                              FitPolicy policy = FitPolicy::TRUNCATE_LAST);

/// Applies the fit policy, then dispatches to the mode's encoder.
EncodedInput encode(const EncodingMode &mode, std::span<const double> features);

StateVector prepare_basis_state(std::size_t k, int n_qubits);
/// V(b_k): X on every qubit whose bit in b_k is 1.
Circuit basis_state_circuit(std::size_t k, int n_qubits);

/// RX(scale * x_i) on qubit i.
Circuit encode_angle(std::span<const double> features, int n_qubits, double scale = 1.0);

/// V(x) with V(x)|0...0> = |x> for a real normalized amplitude vector, built
/// from multiplexed Y rotations (each realized as RZ(pi/2) RX(t) RZ(-pi/2)).
/// The result is valid as a preparation from |0...0> only.
Circuit amplitude_state_preparation_circuit(std::span<const double> amplitudes);
Circuit amplitude_state_preparation_circuit(const EncodedInput &target);

/// The preparation circuit for any encoded input (angle or amplitude).
Circuit preparation_circuit(const EncodedInput &input);

/// Dense unitary whose first column is `amplitudes` (complex allowed).
Matrix state_preparation_unitary(std::span<const Complex> amplitudes);

}  // namespace qattr
