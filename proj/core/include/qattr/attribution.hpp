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
 * @file attribution.hpp
 * Integrated gradients along the straight path from a baseline x' to x:
 *
 *     IG_i = (x_i - x'_i) * (1/S) * sum_{t=1..S} g_i(x' + alpha_t (x - x')),
 *     alpha_t = (t - 1/2) / S   (midpoint rule)
 *
 * where g is the gradient of the activated model output.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qattr/gradients.hpp"
#include "qattr/model.hpp"

namespace qattr {

enum class AttributionSpace { PIXEL, AMPLITUDE };

std::string to_string(AttributionSpace s);
AttributionSpace attribution_space_from_string(const std::string &s);

inline constexpr int kDefaultPathSteps = 64;

struct AttributionConfig {
    /// Empty means "use the model's default baseline".
    std::vector<double> baseline;
    int path_steps = kDefaultPathSteps;
    GradientBackend backend;
    std::uint64_t seed = 0;
    AttributionSpace space = AttributionSpace::PIXEL;
};

struct AttributionMap {
    std::vector<double> scores;
    AttributionConfig config;
    double completeness_residual = 0.0;
    double output_at_input = 0.0;
    double output_at_baseline = 0.0;
};

/// Anything with an output and a gradient can be attributed.
class AttributionTarget {
   public:
    virtual ~AttributionTarget() = default;
    virtual std::size_t dimension() const = 0;
    virtual double output(std::span<const double> point) const = 0;
    /// Gradient of `output` at `point`. `seed` drives any sampling.
    virtual std::vector<double> gradient(std::span<const double> point,
                                         std::uint64_t seed) const = 0;
};

/// Raw features -> activated output, gradients through the encoder.
class PixelSpaceTarget final : public AttributionTarget {
   public:
    PixelSpaceTarget(const QuantumModel &model, GradientBackend backend, std::size_t dimension);
    std::size_t dimension() const override { return dimension_; }
    double output(std::span<const double> point) const override;
    std::vector<double> gradient(std::span<const double> point,
                                 std::uint64_t seed) const override;

   private:
    const QuantumModel &model_;
    GradientBackend backend_;
    std::size_t dimension_;
};

/// Amplitude vector -> activated bilinear form x^T O~ x. Defined off the unit
/// sphere so the straight path between two states stays in the domain.
class AmplitudeSpaceTarget final : public AttributionTarget {
   public:
    AmplitudeSpaceTarget(const QuantumModel &model, GradientBackend backend);
    std::size_t dimension() const override;
    double output(std::span<const double> point) const override;
    std::vector<double> gradient(std::span<const double> point,
                                 std::uint64_t seed) const override;

   private:
    double expectation(std::span<const double> point) const;

    const QuantumModel &model_;
    GradientBackend backend_;
    Circuit observable_;
};

/// Blank image for overflow and angle models; a constant image (uniform
/// state) for plain-normalized models, where all-zero is degenerate.
std::vector<double> default_baseline(const QuantumModel &model, std::size_t feature_count);

AttributionMap integrated_gradients(const AttributionTarget &target,
                                    std::span<const double> input,
                                    const AttributionConfig &config);

/// Quantum-model entry point. In AMPLITUDE space, input and baseline are
/// encoded first and scores attach to amplitudes.
AttributionMap integrated_gradients(const QuantumModel &model,
                                    std::span<const double> raw_features,
                                    const AttributionConfig &config);

struct NormalizedScores {
    std::vector<double> values;
    bool all_zero = false;
};

/// Divides by max |score|; an all-zero map is returned unchanged and flagged.
NormalizedScores normalize_for_render(const AttributionMap &map);
NormalizedScores normalize_for_render(std::span<const double> scores);

struct Similarity {
    /// Empty when either vector is zero.
    std::optional<double> cosine;
    double rank_overlap_topk = 0.0;
};

/// max(4, ceil(10% of the feature count)), capped at the feature count.
std::size_t top_k_count(std::size_t feature_count);

Similarity attribution_similarity(std::span<const double> a, std::span<const double> b);
Similarity attribution_similarity(const AttributionMap &a, const AttributionMap &b);

/// Share of total |score| held by the top-k features (k from `top_k_count`).
double top_k_mass(std::span<const double> scores);

}  // namespace qattr
