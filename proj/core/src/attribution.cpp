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

#include "qattr/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qattr/error.hpp"
#include "qattr/rng.hpp"

namespace qattr {

std::string to_string(AttributionSpace s) {
    return s == AttributionSpace::PIXEL ? "pixel" : "amplitude";
}

AttributionSpace attribution_space_from_string(const std::string &s) {
    if (s == "pixel") return AttributionSpace::PIXEL;
    if (s == "amplitude") return AttributionSpace::AMPLITUDE;
    throw Error(ErrorKind::Config, "unknown attribution space '" + s + "'");
}

PixelSpaceTarget::PixelSpaceTarget(const QuantumModel &model, GradientBackend backend,
                                   std::size_t dimension)
    : model_(model), backend_(backend), dimension_(dimension) {}

double PixelSpaceTarget::output(std::span<const double> point) const {
    return evaluate(model_, encode(model_.encoding, point)).output;
}

std::vector<double> PixelSpaceTarget::gradient(std::span<const double> point,
                                               std::uint64_t seed) const {
    const double f = evaluate(model_, encode(model_.encoding, point)).expectation;
    auto g = pixel_space_gradient(model_, point, backend_, seed);
    const double d = activation_derivative(model_.activation, f);
    for (auto &v : g) v *= d;
    return g;
}

AmplitudeSpaceTarget::AmplitudeSpaceTarget(const QuantumModel &model, GradientBackend backend)
    : model_(model), backend_(backend), observable_(conjugated_observable_circuit(model)) {
    if (!model.encoding.is_amplitude()) throw_invalid("amplitude space needs an amplitude model");
}

std::size_t AmplitudeSpaceTarget::dimension() const {
    return std::size_t{1} << model_.ansatz.n_qubits;
}

double AmplitudeSpaceTarget::expectation(std::span<const double> point) const {
    if (point.size() != dimension()) throw_invalid("amplitude point has wrong length");
    double r2 = 0.0;
    for (double a : point) r2 += a * a;
    if (r2 == 0.0) return 0.0;
    const double r = std::sqrt(r2);
    std::vector<double> unit(point.begin(), point.end());
    for (auto &a : unit) a /= r;
    const auto g = conjugated_overlaps(observable_, StateVector::from_real(unit));
    double f = 0.0;
    for (std::size_t k = 0; k < unit.size(); ++k) f += unit[k] * g[k].real();
    return r2 * f;
}

double AmplitudeSpaceTarget::output(std::span<const double> point) const {
    return activate(model_.activation, expectation(point));
}

std::vector<double> AmplitudeSpaceTarget::gradient(std::span<const double> point,
                                                   std::uint64_t seed) const {
    auto g = amplitude_gradient_at(model_, point, backend_, seed);
    const double d = activation_derivative(model_.activation, expectation(point));
    for (auto &v : g) v *= d;
    return g;
}

std::vector<double> default_baseline(const QuantumModel &model, std::size_t feature_count) {
    if (model.encoding.kind == EncodingKind::AMPLITUDE_NORMALIZED) {
        return std::vector<double>(feature_count, 1.0);
    }
    return std::vector<double>(feature_count, 0.0);
}

AttributionMap integrated_gradients(const AttributionTarget &target,
                                    std::span<const double> input,
                                    const AttributionConfig &config) {
    if (config.path_steps < 1) throw_invalid("path_steps must be >= 1");
    const std::size_t d = target.dimension();
    if (input.size() != d) throw_invalid("input dimension does not match the target");
    if (config.baseline.size() != d) throw_invalid("baseline dimension does not match the input");

    const std::span<const double> base(config.baseline);
    const auto steps = static_cast<std::size_t>(config.path_steps);
    std::vector<double> mean_grad(d, 0.0);
    std::vector<double> point(d);
    for (std::size_t t = 1; t <= steps; ++t) {
        const double alpha = (static_cast<double>(t) - 0.5) / static_cast<double>(steps);
        for (std::size_t i = 0; i < d; ++i) point[i] = base[i] + alpha * (input[i] - base[i]);
        std::vector<double> g;
        try {
            g = target.gradient(point, derive_seed(config.seed, {t}));
        } catch (const NearOverflowSingularity &e) {
            throw NearOverflowSingularity(e.overflow_amplitude(), alpha);
        }
        for (std::size_t i = 0; i < d; ++i) mean_grad[i] += g[i];
    }

    AttributionMap map;
    map.config = config;
    map.scores.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        map.scores[i] = (input[i] - base[i]) * (mean_grad[i] / static_cast<double>(steps));
    }
    map.output_at_input = target.output(input);
    map.output_at_baseline = target.output(base);
    double total = 0.0;
    for (double s : map.scores) total += s;
    map.completeness_residual =
        std::abs(total - (map.output_at_input - map.output_at_baseline));
    return map;
}

AttributionMap integrated_gradients(const QuantumModel &model,
                                    std::span<const double> raw_features,
                                    const AttributionConfig &config) {
    AttributionConfig cfg = config;
    if (cfg.baseline.empty()) cfg.baseline = default_baseline(model, raw_features.size());
    if (cfg.baseline.size() != raw_features.size()) {
        throw_invalid("baseline dimension does not match the input");
    }
    for (std::size_t i = 0; i < raw_features.size(); ++i) {
        if (!(raw_features[i] >= 0.0 && raw_features[i] <= 1.0) ||
            !(cfg.baseline[i] >= 0.0 && cfg.baseline[i] <= 1.0)) {
            throw_invalid("features and baseline must lie in [0, 1]");
        }
    }

    if (cfg.space == AttributionSpace::PIXEL) {
        const PixelSpaceTarget target(model, cfg.backend, raw_features.size());
        return integrated_gradients(target, raw_features, cfg);
    }

    const AmplitudeSpaceTarget target(model, cfg.backend);
    const auto x = encode(model.encoding, raw_features).amplitudes;
    AttributionConfig amp_cfg = cfg;
    amp_cfg.baseline = encode(model.encoding, cfg.baseline).amplitudes;
    AttributionMap map = integrated_gradients(target, x, amp_cfg);
    map.config = cfg;
    return map;
}

NormalizedScores normalize_for_render(std::span<const double> scores) {
    NormalizedScores out;
    out.values.assign(scores.begin(), scores.end());
    double peak = 0.0;
    for (double s : scores) peak = std::max(peak, std::abs(s));
    if (peak == 0.0) {
        out.all_zero = true;
        return out;
    }
    for (auto &v : out.values) v /= peak;
    return out;
}

NormalizedScores normalize_for_render(const AttributionMap &map) {
    return normalize_for_render(map.scores);
}

std::size_t top_k_count(std::size_t feature_count) {
    const auto tenth = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(feature_count)));
    return std::min(feature_count, std::max<std::size_t>(4, tenth));
}

namespace {

std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(scores[a]) > std::abs(scores[b]);
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

Similarity attribution_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw_invalid("attribution maps differ in dimension");
    Similarity out;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na > 0.0 && nb > 0.0) out.cosine = dot / (std::sqrt(na) * std::sqrt(nb));
    const std::size_t k = top_k_count(a.size());
    if (k == 0) return out;
    const auto ta = top_k_indices(a, k);
    const auto tb = top_k_indices(b, k);
    std::vector<std::size_t> shared;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(shared));
    out.rank_overlap_topk = static_cast<double>(shared.size()) / static_cast<double>(k);
    return out;
}

Similarity attribution_similarity(const AttributionMap &a, const AttributionMap &b) {
    return attribution_similarity(a.scores, b.scores);
}

double top_k_mass(std::span<const double> scores) {
    double total = 0.0;
    for (double s : scores) total += std::abs(s);
    if (total == 0.0) return 0.0;
    const auto top = top_k_indices(scores, top_k_count(scores.size()));
    double mass = 0.0;
    for (auto i : top) mass += std::abs(scores[i]);
    return mass / total;
}

}  // namespace qattr
