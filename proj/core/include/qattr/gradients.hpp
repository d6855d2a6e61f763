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
 * @file gradients.hpp
 * Input and parameter gradients of F(x; theta) = <x| U^dagger O U |x>.
 *
 * Writing O~ = U^dagger O U and x_k = c_k + i d_k, the amplitude gradient is
 *
 *     dF/dc_k = 2 Re <b_k|O~|x>,    dF/dd_k = 2 Im <b_k|O~|x>.
 *
 * Four routes are provided:
 *  - exact: one statevector pass computes O~|x>, every <b_k| is read off.
 *  - single-ancilla Hadamard test: ancilla in |+>, controlled V(x) on |1>,
 *    controlled V(b_k) on |0>, controlled O~ on |1>, H; then
 *    P(A=0) = (1 + Re <b_k|O~|x>) / 2, and the component is 4 P - 2. An S^dagger
 *    after the first H gives the imaginary part instead.
 *  - m-ancilla Hadamard test: 2^m - 1 components per circuit. With outcome t
 *    and slot s (slot all-ones holds O~|x>),
 *        P(t) = 4^-m (2^m + 2 sum_s (-1)^{popcount((s ^ ones) & t)} Re g_s),
 *    solved by least squares over all 2^m outcomes.
 *  - parameter shift for rotation gates: dF/dtheta = (F(theta + pi/2) - F(theta - pi/2)) / 2.
 *
 * Register layout for the Hadamard circuits: data qubits 0..n-1, ancillas
 * n..n+m-1 (ancilla n is the most significant bit of the slot index).
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qattr/model.hpp"
#include "qattr/statevector.hpp"

namespace qattr {

enum class GradientMethod { EXACT, HADAMARD_SINGLE, HADAMARD_MULTI, PARAM_SHIFT };

std::string to_string(GradientMethod m);
GradientMethod gradient_method_from_string(const std::string &s);

/// Measurement budget per estimated quantity; `exact()` reads probabilities
/// straight from the statevector.
class ShotBudget {
   public:
    static constexpr ShotBudget exact() noexcept { return ShotBudget{0}; }
    static ShotBudget shots(std::uint64_t n);

    bool is_exact() const noexcept { return shots_ == 0; }
    std::uint64_t count() const noexcept { return shots_; }
    std::string to_string() const;

    friend bool operator==(const ShotBudget &, const ShotBudget &) = default;

   private:
    constexpr explicit ShotBudget(std::uint64_t n) noexcept : shots_(n) {}
    std::uint64_t shots_;
};

enum class Part { REAL, IMAG };

struct GradientVector {
    std::vector<double> values;
    GradientMethod method = GradientMethod::EXACT;
    int ancillas = 0;
    ShotBudget shots = ShotBudget::exact();
    std::uint64_t seed = 0;
};

/// Which gradient route to use, with its parameters.
struct GradientBackend {
    GradientMethod method = GradientMethod::EXACT;
    int ancillas = 1;  // HADAMARD_MULTI only
    ShotBudget shots = ShotBudget::exact();
};

// ---- exact route ----------------------------------------------------------

/// <b_k|O~|x> for every k, where `observable` realizes O~.
std::vector<Complex> conjugated_overlaps(const Circuit &observable, const StateVector &x);

/// 2 Re <b_k|O~|x> for all k (amplitude models).
GradientVector exact_input_gradient(const QuantumModel &model, const EncodedInput &input);
/// Real-part gradient for an arbitrary, possibly complex, input state.
GradientVector exact_input_gradient(const QuantumModel &model, const StateVector &x);
/// 2 Im <b_k|O~|x> for all k: gradient with respect to the imaginary parts.
GradientVector exact_input_gradient_imag(const QuantumModel &model, const StateVector &x);

// ---- single-ancilla Hadamard test ------------------------------------------

/// Circuit on n + 1 qubits: ancilla n drives controlled `prep_x` (trigger 1),
/// controlled V(b_k) (trigger 0) and controlled `observable` (trigger 1).
Circuit hadamard_test_circuit(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                              Part part = Part::REAL);

/// Exact P(A = 0) of `hadamard_test_circuit`.
double hadamard_test_probability(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                                 Part part = Part::REAL);

/// 4 P(A = 0) - 2 with P exact or estimated from `shots` samples.
double hadamard_test_component(const Circuit &prep_x, std::size_t k, const Circuit &observable,
                               ShotBudget shots, std::uint64_t seed, Part part = Part::REAL);

/// Model-level convenience: V(x) synthesized from the encoded amplitudes.
double hadamard_test_gradient_component(const QuantumModel &model, const EncodedInput &input,
                                        std::size_t k, ShotBudget shots, std::uint64_t seed,
                                        Part part = Part::REAL);

// ---- multi-ancilla Hadamard test -------------------------------------------

inline constexpr int kMaxAncillas = 4;

/// The linear system relating the 2^m ancilla outcome probabilities to the
/// real parts of the 2^m - 1 overlaps.
struct AncillaLinearSystem {
    int m = 1;
    /// Walsh pattern W(t, u) = (-1)^{popcount(t & u)}; slot s uses column
    /// s ^ (2^m - 1), column 0 carries the normalization term.
    Eigen::MatrixXd sign_matrix;
    std::vector<double> probabilities;
    std::vector<std::size_t> component_indices;

    static AncillaLinearSystem make(int m, std::vector<std::size_t> component_indices,
                                    std::vector<double> probabilities);

    /// Sign of slot `s` in the equation for outcome `t`.
    double sign(std::size_t t, std::size_t s) const;
    /// Outcome distribution implied by the given Re g values.
    std::vector<double> predicted_probabilities(std::span<const double> re_overlaps) const;
    /// Least-squares Re g for each slot.
    std::vector<double> solve() const;
};

Circuit hadamard_multi_circuit(const Circuit &prep_x, std::span<const std::size_t> indices,
                               int m, const Circuit &observable);

/// Outcome distribution over the ancillas, exact or sampled.
std::vector<double> hadamard_multi_distribution(const Circuit &prep_x,
                                                std::span<const std::size_t> indices, int m,
                                                const Circuit &observable, ShotBudget shots,
                                                std::uint64_t seed);

/// 2 Re g_j for each index, from one m-ancilla circuit.
std::vector<double> hadamard_multi_components(const Circuit &prep_x,
                                              std::span<const std::size_t> indices, int m,
                                              const Circuit &observable, ShotBudget shots,
                                              std::uint64_t seed);

/// Model-level convenience; values align with `indices`.
GradientVector hadamard_multi_gradient(const QuantumModel &model, const EncodedInput &input,
                                       std::span<const std::size_t> indices, int m,
                                       ShotBudget shots, std::uint64_t seed);

// ---- full gradients --------------------------------------------------------

/// All 2^n amplitude components through the chosen backend. Per-component
/// (or per-group) seeds are derived from (seed, k).
GradientVector amplitude_gradient(const QuantumModel &model, const EncodedInput &input,
                                  const GradientBackend &backend, std::uint64_t seed);

/// Gradient at an arbitrary real amplitude vector (not necessarily
/// normalized); uses linearity of <b_k|O~|x> in x.
std::vector<double> amplitude_gradient_at(const QuantumModel &model,
                                          std::span<const double> amplitudes,
                                          const GradientBackend &backend, std::uint64_t seed);

/// dF/dtheta_i for the selected parameters (all when `which` is empty).
GradientVector parameter_shift_gradient(const QuantumModel &model, const EncodedInput &input,
                                        std::span<const int> which = {});

/// dF/dfeature for angle models, by shifting the encoding rotations.
GradientVector angle_input_gradient(const QuantumModel &model, const EncodedInput &input);

/// Chain rule from the amplitude (or angle) gradient to raw features. For
/// AMPLITUDE_OVERFLOW:
///     dF/dp_i = s G_i - (s^2 p_i / a_of) G_of.
/// Throws NearOverflowSingularity when a_of <= 1e-9.
std::vector<double> pixel_space_gradient(const QuantumModel &model,
                                         std::span<const double> raw_features,
                                         const GradientBackend &backend, std::uint64_t seed);

inline constexpr double kOverflowEpsilon = 1e-9;

}  // namespace qattr
