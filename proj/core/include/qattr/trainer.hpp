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
 * @file trainer.hpp
 * Full-batch training of binary classifiers with loss
 *
 *     L(theta) = (1/N) sum_j (tanh F(x_j; theta) - y_j)^2,   y_j in {-1, +1},
 *
 * minimized by SPSA or by gradient descent with parameter-shift gradients.
 * Also hosts the random-parameter generators used for null models.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qattr/model.hpp"
#include "qattr/rng.hpp"

namespace qattr {

struct Example {
    std::vector<double> features;
    int label = 1;  // -1 or +1
};

enum class Optimizer { SPSA, GD_PARAM_SHIFT };
std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string &s);

enum class NullKind { UNIFORM_0_PI, GAUSSIAN_0_HALFPI, STUDENT_T_NU2 };
std::string to_string(NullKind k);
NullKind null_kind_from_string(const std::string &s);

inline constexpr NullKind kAllNullKinds[] = {NullKind::UNIFORM_0_PI, NullKind::GAUSSIAN_0_HALFPI,
                                             NullKind::STUDENT_T_NU2};

struct NullDistribution {
    NullKind kind = NullKind::UNIFORM_0_PI;
    std::uint64_t seed = 0;
};

double sample_null_value(NullKind kind, Rng &rng);
std::vector<double> sample_parameters(std::size_t count, const NullDistribution &dist);

/// `prototype` fixes everything but theta (observable, activation, encoding).
QuantumModel sample_null_model(const AnsatzSpec &spec, const NullDistribution &dist,
                               const QuantumModel &prototype);
QuantumModel sample_null_model(const AnsatzSpec &spec, const NullDistribution &dist);

/// a_k = a / (k + A)^alpha, c_k = c / k^gamma for k = 1, 2, ...
struct SpsaGains {
    double a = 0.2;
    double c = 0.1;
    double A = 50.0;
    double alpha = 0.602;
    double gamma = 0.101;

    double step(int k) const;
    double perturbation(int k) const;
};

struct TrainConfig {
    Optimizer optimizer = Optimizer::SPSA;
    int max_iters = 1000;
    double learning_rate = 0.1;  // GD_PARAM_SHIFT
    SpsaGains spsa;
    NullKind init = NullKind::UNIFORM_0_PI;
    std::optional<std::vector<double>> resume_theta;
    std::uint64_t seed = 0;

    void validate() const;
};

struct HistoryEntry {
    int iteration = 0;
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    QuantumModel model;  // best-loss theta
    double best_loss = 0.0;
    int best_iteration = 0;
    std::vector<HistoryEntry> history;
};

/// Evaluates F for a whole batch at arbitrary theta. Amplitude models reduce
/// to x^T Re(O~) x with O~ built once per theta.
class BatchObjective {
   public:
    BatchObjective(const QuantumModel &prototype, std::span<const Example> batch);

    std::size_t size() const noexcept { return labels_.size(); }
    std::vector<double> expectations(std::span<const double> theta) const;
    double loss(std::span<const double> theta) const;
    double accuracy(std::span<const double> theta) const;
    /// dL/dtheta by the parameter-shift rule on every parameter.
    std::vector<double> loss_gradient(std::span<const double> theta) const;

   private:
    QuantumModel prototype_;
    std::vector<int> labels_;
    Eigen::MatrixXd amplitudes_;  // one row per sample (amplitude models)
    std::vector<EncodedInput> encoded_;  // angle models
};

double loss(const QuantumModel &model, std::span<const Example> batch);
double evaluate_accuracy(const QuantumModel &model, std::span<const Example> samples);

/// Called after every iteration with the entry just recorded.
using TrainCallback = std::function<void(const HistoryEntry &)>;

/// Zero iterations return the initial model. Throws Numerical if the loss
/// becomes non-finite.
TrainResult train(const QuantumModel &initial, std::span<const Example> batch,
                  const TrainConfig &config, const TrainCallback &callback = {});

/// Initial theta for `config`: resume_theta when set, else drawn from
/// `config.init` with a seed derived from `config.seed`.
std::vector<double> initial_parameters(const AnsatzSpec &spec, const TrainConfig &config);

struct SpsaResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Generic SPSA on f; keeps the best iterate seen.
SpsaResult spsa_minimize(const std::function<double(std::span<const double>)> &f,
                         std::vector<double> x0, int iterations, const SpsaGains &gains,
                         std::uint64_t seed);

}  // namespace qattr
