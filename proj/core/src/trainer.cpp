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

#include "qattr/trainer.hpp"

#include <cmath>
#include <numbers>

#include "qattr/error.hpp"

namespace qattr {

std::string to_string(Optimizer o) { return o == Optimizer::SPSA ? "spsa" : "gd_param_shift"; }

Optimizer optimizer_from_string(const std::string &s) {
    if (s == "spsa") return Optimizer::SPSA;
    if (s == "gd_param_shift") return Optimizer::GD_PARAM_SHIFT;
    throw Error(ErrorKind::Config, "unknown optimizer '" + s + "'");
}

std::string to_string(NullKind k) {
    switch (k) {
        case NullKind::UNIFORM_0_PI:
            return "uniform_0_pi";
        case NullKind::GAUSSIAN_0_HALFPI:
            return "gaussian_0_halfpi";
        case NullKind::STUDENT_T_NU2:
            return "student_t_nu2";
    }
    return "?";
}

NullKind null_kind_from_string(const std::string &s) {
    for (auto k : kAllNullKinds) {
        if (to_string(k) == s) return k;
    }
    throw Error(ErrorKind::Config, "unknown null distribution '" + s + "'");
}

namespace {

// Draws are built from raw 64-bit words so they do not depend on the
// standard library's distribution implementations.
double unit_open_closed(Rng &rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
}

double unit_closed_open(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng &rng) {
    const double u1 = unit_open_closed(rng);
    const double u2 = unit_closed_open(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double sample_null_value(NullKind kind, Rng &rng) {
    switch (kind) {
        case NullKind::UNIFORM_0_PI:
            return std::numbers::pi * unit_closed_open(rng);
        case NullKind::GAUSSIAN_0_HALFPI:
            return 0.5 * std::numbers::pi * standard_normal(rng);
        case NullKind::STUDENT_T_NU2: {
            // Z / sqrt(V / 2) with V ~ chi^2_2 = -2 ln U.
            const double z = standard_normal(rng);
            const double v = -2.0 * std::log(unit_open_closed(rng));
            return z / std::sqrt(v / 2.0);
        }
    }
    return 0.0;
}

std::vector<double> sample_parameters(std::size_t count, const NullDistribution &dist) {
    Rng rng = make_rng(dist.seed);
    std::vector<double> out(count);
    for (auto &v : out) v = sample_null_value(dist.kind, rng);
    return out;
}

QuantumModel sample_null_model(const AnsatzSpec &spec, const NullDistribution &dist,
                               const QuantumModel &prototype) {
    if (spec.n_qubits < 1 || spec.n_layers < 0) throw_invalid("invalid ansatz spec");
    QuantumModel m = prototype;
    m.ansatz = spec;
    m.theta = sample_parameters(static_cast<std::size_t>(spec.parameter_count()), dist);
    m.validate();
    return m;
}

QuantumModel sample_null_model(const AnsatzSpec &spec, const NullDistribution &dist) {
    QuantumModel proto;
    proto.encoding.n_qubits = spec.n_qubits;
    return sample_null_model(spec, dist, proto);
}

double SpsaGains::step(int k) const { return a / std::pow(k + A, alpha); }
double SpsaGains::perturbation(int k) const { return c / std::pow(static_cast<double>(k), gamma); }

void TrainConfig::validate() const {
    if (max_iters < 0) throw Error(ErrorKind::Config, "max_iters must be >= 0");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning_rate must be positive");
    if (!(spsa.a > 0.0)) throw Error(ErrorKind::Config, "spsa.a must be positive");
    if (!(spsa.c > 0.0)) throw Error(ErrorKind::Config, "spsa.c must be positive");
    if (!(spsa.A >= 0.0)) throw Error(ErrorKind::Config, "spsa.A must be non-negative");
    if (!(spsa.alpha > 0.0) || !(spsa.gamma > 0.0)) {
        throw Error(ErrorKind::Config, "spsa exponents must be positive");
    }
}

BatchObjective::BatchObjective(const QuantumModel &prototype, std::span<const Example> batch)
    : prototype_(prototype) {
    if (batch.empty()) throw_invalid("empty batch");
    labels_.reserve(batch.size());
    for (const auto &e : batch) {
        if (e.label != 1 && e.label != -1) throw_invalid("labels must be -1 or +1");
        labels_.push_back(e.label);
    }
    if (prototype.encoding.is_amplitude()) {
        const std::size_t dim = std::size_t{1} << prototype.ansatz.n_qubits;
        amplitudes_.resize(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < batch.size(); ++j) {
            const auto enc = encode(prototype.encoding, batch[j].features);
            if (enc.amplitudes.size() != dim) throw_invalid("encoding width does not match ansatz");
            for (std::size_t k = 0; k < dim; ++k) {
                amplitudes_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                    enc.amplitudes[k];
            }
        }
    } else {
        encoded_.reserve(batch.size());
        for (const auto &e : batch) encoded_.push_back(encode(prototype.encoding, e.features));
    }
}

std::vector<double> BatchObjective::expectations(std::span<const double> theta) const {
    QuantumModel m = prototype_;
    m.theta.assign(theta.begin(), theta.end());
    std::vector<double> f(size());
    if (prototype_.encoding.is_amplitude() && amplitudes_.rows() < amplitudes_.cols()) {
        // Fewer samples than amplitudes: simulating each one is cheaper than
        // forming the 2^n x 2^n operator.
        m.validate();
        const Circuit ansatz = build_ansatz_circuit(m.ansatz, m.theta);
        std::vector<double> row(static_cast<std::size_t>(amplitudes_.cols()));
        for (Eigen::Index j = 0; j < amplitudes_.rows(); ++j) {
            Eigen::Map<Eigen::RowVectorXd>(row.data(), amplitudes_.cols()) = amplitudes_.row(j);
            StateVector s = StateVector::from_real(row);
            run_circuit_in_place(ansatz, s);
            f[static_cast<std::size_t>(j)] = pauli_expectation(m.observable, s);
        }
    } else if (prototype_.encoding.is_amplitude()) {
        const Eigen::MatrixXd op = conjugated_observable_matrix(m).real();
        const Eigen::MatrixXd projected = amplitudes_ * op;
        for (Eigen::Index j = 0; j < amplitudes_.rows(); ++j) {
            f[static_cast<std::size_t>(j)] = projected.row(j).dot(amplitudes_.row(j));
        }
    } else {
        m.validate();
        const int n = m.ansatz.n_qubits;
        const Circuit ansatz = build_ansatz_circuit(m.ansatz, m.theta);
        for (std::size_t j = 0; j < encoded_.size(); ++j) {
            StateVector s(n);
            run_circuit_in_place(encode_angle(encoded_[j].angles, n, 1.0), s);
            run_circuit_in_place(ansatz, s);
            f[j] = pauli_expectation(m.observable, s);
        }
    }
    return f;
}

double BatchObjective::loss(std::span<const double> theta) const {
    const auto f = expectations(theta);
    double total = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = activate(prototype_.activation, f[j]) - labels_[j];
        total += r * r;
    }
    return total / static_cast<double>(f.size());
}

double BatchObjective::accuracy(std::span<const double> theta) const {
    const auto f = expectations(theta);
    std::size_t correct = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (label_from_score(activate(prototype_.activation, f[j])) == labels_[j]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(f.size());
}

std::vector<double> BatchObjective::loss_gradient(std::span<const double> theta) const {
    const auto f = expectations(theta);
    std::vector<double> weight(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double out = activate(prototype_.activation, f[j]);
        weight[j] = 2.0 * (out - labels_[j]) * activation_derivative(prototype_.activation, f[j]) /
                    static_cast<double>(f.size());
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    std::vector<double> grad(theta.size(), 0.0);
    constexpr double kShift = std::numbers::pi / 2.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        shifted[i] = theta[i] + kShift;
        const auto plus = expectations(shifted);
        shifted[i] = theta[i] - kShift;
        const auto minus = expectations(shifted);
        shifted[i] = theta[i];
        for (std::size_t j = 0; j < f.size(); ++j) grad[i] += weight[j] * 0.5 * (plus[j] - minus[j]);
    }
    return grad;
}

double loss(const QuantumModel &model, std::span<const Example> batch) {
    return BatchObjective(model, batch).loss(model.theta);
}

double evaluate_accuracy(const QuantumModel &model, std::span<const Example> samples) {
    if (samples.empty()) throw_invalid("cannot evaluate accuracy on an empty set");
    return BatchObjective(model, samples).accuracy(model.theta);
}

std::vector<double> initial_parameters(const AnsatzSpec &spec, const TrainConfig &config) {
    const auto count = static_cast<std::size_t>(spec.parameter_count());
    if (config.resume_theta) {
        if (config.resume_theta->size() != count) {
            throw Error(ErrorKind::Config, "resume_theta has " +
                                               std::to_string(config.resume_theta->size()) +
                                               " values, ansatz needs " + std::to_string(count));
        }
        return *config.resume_theta;
    }
    return sample_parameters(count, {config.init, derive_seed(config.seed, {0x1417})});
}

namespace {

void check_finite(double value, int iteration) {
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::Numerical,
                    "loss became non-finite at iteration " + std::to_string(iteration));
    }
}

// One SPSA step in place; returns nothing, the caller evaluates the new point.
void spsa_step(const std::function<double(std::span<const double>)> &f, std::vector<double> &x,
               int k, const SpsaGains &gains, Rng &rng) {
    const double ak = gains.step(k);
    const double ck = gains.perturbation(k);
    std::vector<double> delta(x.size());
    for (auto &d : delta) d = (rng() >> 63) ? 1.0 : -1.0;
    std::vector<double> probe(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) probe[i] = x[i] + ck * delta[i];
    const double fp = f(probe);
    for (std::size_t i = 0; i < x.size(); ++i) probe[i] = x[i] - ck * delta[i];
    const double fm = f(probe);
    check_finite(fp, k);
    check_finite(fm, k);
    const double diff = (fp - fm) / (2.0 * ck);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= ak * diff / delta[i];
}

}  // namespace

SpsaResult spsa_minimize(const std::function<double(std::span<const double>)> &f,
                         std::vector<double> x0, int iterations, const SpsaGains &gains,
                         std::uint64_t seed) {
    Rng rng = make_rng(seed);
    SpsaResult best{x0, f(x0), 0};
    check_finite(best.value, 0);
    std::vector<double> x = std::move(x0);
    for (int k = 1; k <= iterations; ++k) {
        spsa_step(f, x, k, gains, rng);
        const double v = f(x);
        check_finite(v, k);
        if (v < best.value) best = {x, v, k};
    }
    best.iterations = iterations;
    return best;
}

TrainResult train(const QuantumModel &initial, std::span<const Example> batch,
                  const TrainConfig &config, const TrainCallback &callback) {
    config.validate();
    initial.validate();
    const BatchObjective objective(initial, batch);

    TrainResult result;
    result.model = initial;
    std::vector<double> theta = initial.theta;

    auto record = [&](int iteration) {
        const auto f = objective.expectations(theta);
        double total = 0.0;
        std::size_t correct = 0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double out = activate(initial.activation, f[j]);
            const int y = j < batch.size() ? batch[j].label : 0;
            total += (out - y) * (out - y);
            if (label_from_score(out) == y) ++correct;
        }
        HistoryEntry entry{iteration, total / static_cast<double>(f.size()),
                           static_cast<double>(correct) / static_cast<double>(f.size())};
        check_finite(entry.loss, iteration);
        result.history.push_back(entry);
        if (iteration == 0 || entry.loss < result.best_loss) {
            result.best_loss = entry.loss;
            result.best_iteration = iteration;
            result.model.theta = theta;
        }
        if (callback) callback(entry);
    };

    record(0);
    const auto f = [&](std::span<const double> t) { return objective.loss(t); };
    Rng rng = make_rng(derive_seed(config.seed, {0x5959}));
    for (int k = 1; k <= config.max_iters; ++k) {
        if (config.optimizer == Optimizer::SPSA) {
            spsa_step(f, theta, k, config.spsa, rng);
        } else {
            const auto g = objective.loss_gradient(theta);
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= config.learning_rate * g[i];
        }
        record(k);
    }
    return result;
}

}  // namespace qattr
