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

#include "qattr/statevector.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qattr/error.hpp"

using namespace qattr;

namespace {

std::vector<Complex> random_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> nd;
    std::vector<Complex> v(dim);
    double norm = 0;
    for (auto &a : v) {
        a = {nd(rng), nd(rng)};
        norm += std::norm(a);
    }
    for (auto &a : v) a /= std::sqrt(norm);
    return v;
}

oracle::Vec to_vec(const StateVector &s) {
    oracle::Vec v(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t i = 0; i < s.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

// Dense matrix of a multi-target payload with controls, by index arithmetic.
oracle::Mat dense_payload(int n, const std::vector<int> &targets, const oracle::Mat &u,
                          const std::vector<std::pair<int, int>> &ctl) {
    const std::size_t dim = std::size_t{1} << n;
    oracle::Mat out = oracle::Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const int w = static_cast<int>(targets.size());
    for (std::size_t col = 0; col < dim; ++col) {
        bool active = true;
        for (auto [q, t] : ctl) active = active && oracle::bit(col, n, q) == t;
        if (!active) {
            out(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) = 1.0;
            continue;
        }
        std::size_t sub = 0, cleared = col;
        for (int b = 0; b < w; ++b) {
            sub = (sub << 1) | static_cast<std::size_t>(oracle::bit(col, n, targets[b]));
            cleared &= ~(std::size_t{1} << (n - 1 - targets[b]));
        }
        for (std::size_t r = 0; r < (std::size_t{1} << w); ++r) {
            std::size_t row = cleared;
            for (int b = 0; b < w; ++b) {
                if ((r >> (w - 1 - b)) & 1u) row |= std::size_t{1} << (n - 1 - targets[b]);
            }
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
                u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(sub));
        }
    }
    return out;
}

oracle::Mat dense_gate(int n, const Gate &g) {
    std::vector<std::pair<int, int>> ctl;
    for (const auto &c : g.controls) ctl.emplace_back(c.qubit, c.trigger);
    oracle::Mat u;
    switch (g.kind) {
        case GateKind::H: u = oracle::hadamard(); break;
        case GateKind::X:
        case GateKind::CNOT: u = oracle::pauli_x(); break;
        case GateKind::Y: u = oracle::pauli_y(); break;
        case GateKind::Z: u = oracle::pauli_z(); break;
        case GateKind::S_DAG: u = oracle::s_dag(); break;
        case GateKind::RX: u = oracle::rx(g.angle); break;
        case GateKind::RZ: u = oracle::rz(g.angle); break;
        case GateKind::CONTROLLED_UNITARY: return dense_payload(n, g.targets, *g.payload, ctl);
    }
    return oracle::controlled(n, g.targets[0], u, ctl);
}

Gate random_gate(int n, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> kind(0, 8), qubit(0, n - 1), coin(0, 1);
    std::uniform_real_distribution<double> angle(-oracle::kPi, oracle::kPi);
    const int t = qubit(rng);
    Gate g = Gate::h(t);
    switch (kind(rng)) {
        case 0: g = Gate::h(t); break;
        case 1: g = Gate::x(t); break;
        case 2: g = Gate::y(t); break;
        case 3: g = Gate::z(t); break;
        case 4: g = Gate::s_dag(t); break;
        case 5: g = Gate::rx(t, angle(rng)); break;
        case 6: g = Gate::rz(t, angle(rng)); break;
        case 7: {
            int c = qubit(rng);
            while (c == t) c = qubit(rng);
            g = Gate::cnot(c, t);
            break;
        }
        default: g = Gate::unitary({t}, oracle::random_unitary(2, rng)); break;
    }
    if (n > 2 && coin(rng)) {
        int c = qubit(rng);
        while (c == t || (!g.controls.empty() && c == g.controls[0].qubit)) c = qubit(rng);
        g = g.with_control(c, coin(rng));
    }
    return g;
}

}  // namespace

TEST(StateVector, StartsInAllZero) {
    StateVector s(3);
    EXPECT_EQ(s.dimension(), 8u);
    EXPECT_EQ(s[0], Complex(1.0));
    for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(s[k], Complex(0.0));
}

TEST(StateVector, RejectsBadWidthAndNorm) {
    EXPECT_THROW(StateVector(0), Error);
    EXPECT_THROW(StateVector(kMaxQubits + 1), Error);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), Error);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), Error);
}

TEST(StateVector, HadamardOnZero) {
    const auto s = apply_gate(StateVector(1), Gate::h(0));
    EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(StateVector, BellPairFromCnot) {
    const double r = 1 / std::sqrt(2.0);
    auto s = StateVector::from_amplitudes({r, 0, r, 0});  // (|00> + |10>)/sqrt2
    s = apply_gate(s, Gate::cnot(0, 1));
    EXPECT_NEAR(s[0].real(), r, 1e-15);
    EXPECT_NEAR(std::abs(s[1]), 0, 1e-15);
    EXPECT_NEAR(std::abs(s[2]), 0, 1e-15);
    EXPECT_NEAR(s[3].real(), r, 1e-15);
}

TEST(StateVector, XOnQubitZeroSetsMostSignificantBit) {
    Circuit c(3);
    c.add(Gate::x(0));
    const auto s = run_circuit(c, StateVector(3));
    EXPECT_EQ(s[4], Complex(1.0));
}

TEST(StateVector, EmptyCircuitIsIdentity) {
    std::mt19937_64 rng(3);
    const auto amps = random_state(16, rng);
    const auto s = run_circuit(Circuit(4), StateVector::from_amplitudes(amps));
    for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(s[k], amps[k]);
}

TEST(StateVector, ControlledTwoQubitPayloadMatchesDense) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const oracle::Mat u = oracle::random_unitary(4, rng);
        const auto amps = random_state(8, rng);
        const Gate g = Gate::unitary({2, 0}, u).with_control(1, trial % 2);
        const auto got = to_vec(apply_gate(StateVector::from_amplitudes(amps), g));
        oracle::Vec in(8);
        for (int i = 0; i < 8; ++i) in(i) = amps[static_cast<std::size_t>(i)];
        const oracle::Vec want = dense_payload(3, {2, 0}, u, {{1, trial % 2}}) * in;
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(StateVector, RandomCircuitsMatchDenseProductChain) {
    std::mt19937_64 rng(2026);
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 3; ++trial) {
            Circuit c(n);
            const std::size_t dim = std::size_t{1} << n;
            oracle::Mat m = oracle::Mat::Identity(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
            for (int i = 0; i < 20; ++i) {
                const Gate g = random_gate(n, rng);
                c.add(g);
                m = dense_gate(n, g) * m;
            }
            const auto amps = random_state(dim, rng);
            const auto out = run_circuit(c, StateVector::from_amplitudes(amps));
            oracle::Vec in(static_cast<Eigen::Index>(dim));
            for (std::size_t i = 0; i < dim; ++i) in(static_cast<Eigen::Index>(i)) = amps[i];
            EXPECT_LT((to_vec(out) - m * in).cwiseAbs().maxCoeff(), 1e-9) << "n=" << n;
            EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
        }
    }
}

TEST(StateVector, InverseCircuitUndoes) {
    std::mt19937_64 rng(5);
    Circuit c(4);
    for (int i = 0; i < 30; ++i) c.add(random_gate(4, rng));
    const auto amps = random_state(16, rng);
    const auto back = run_circuit(c.inverse(), run_circuit(c, StateVector::from_amplitudes(amps)));
    for (std::size_t k = 0; k < 16; ++k) EXPECT_LT(std::abs(back[k] - amps[k]), 1e-12);
}

TEST(StateVector, ControlTriggerLeavesOtherBranchUntouched) {
    for (std::size_t k = 0; k < 8; ++k) {
        StateVector basis = StateVector::from_amplitudes([&] {
            std::vector<Complex> v(8, 0.0);
            v[k] = 1.0;
            return v;
        }());
        const int control_bit = oracle::bit(k, 3, 0);
        // Trigger opposite to the control value: nothing happens.
        const auto same = apply_gate(basis, Gate::x(2).with_control(0, 1 - control_bit));
        EXPECT_EQ(same[k], Complex(1.0));
        // Matching trigger flips the target.
        const auto flipped = apply_gate(basis, Gate::x(2).with_control(0, control_bit));
        EXPECT_EQ(flipped[k ^ 1u], Complex(1.0));
    }
}

TEST(StateVector, GateValidation) {
    StateVector s(2);
    EXPECT_THROW(apply_gate(s, Gate::x(2)), Error);
    EXPECT_THROW(apply_gate(s, Gate::cnot(1, 1)), Error);
    oracle::Mat bad(2, 2);
    bad << 1, 1, 0, 1;
    EXPECT_THROW(apply_gate(s, Gate::unitary({0}, bad)), Error);
    Circuit c(2);
    EXPECT_THROW(c.add(Gate::x(-1)), Error);
}

TEST(Measurement, SimpleOutcomes) {
    const int q0[] = {0};
    EXPECT_DOUBLE_EQ(measure_probability(StateVector(1), q0, "0"), 1.0);
    const auto plus = apply_gate(StateVector(1), Gate::h(0));
    EXPECT_NEAR(measure_probability(plus, q0, "0"), 0.5, 1e-15);
    EXPECT_THROW(measure_probability(plus, q0, "01"), Error);
    const int dup[] = {0, 0};
    EXPECT_THROW(measure_probability(StateVector(2), dup, "00"), Error);
}

TEST(Measurement, MarginalMatchesEnumeration) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto amps = random_state(8, rng);
        const auto s = StateVector::from_amplitudes(amps);
        const int q1[] = {1};
        for (int outcome = 0; outcome < 2; ++outcome) {
            double want = 0;
            for (std::size_t k = 0; k < 8; ++k) {
                if (oracle::bit(k, 3, 1) == outcome) want += std::norm(amps[k]);
            }
            EXPECT_NEAR(measure_probability(s, q1, outcome ? "1" : "0"), want, 1e-14);
        }
        const int q20[] = {2, 0};
        const auto marg = marginal_distribution(s, q20);
        for (std::size_t t = 0; t < 4; ++t) {
            double want = 0;
            for (std::size_t k = 0; k < 8; ++k) {
                const std::size_t read = static_cast<std::size_t>(oracle::bit(k, 3, 2) * 2 +
                                                                  oracle::bit(k, 3, 0));
                if (read == t) want += std::norm(amps[k]);
            }
            EXPECT_NEAR(marg[t], want, 1e-14);
        }
    }
}

TEST(Sampling, DeterministicOutcome) {
    const int q0[] = {0};
    const auto h = sample_counts(StateVector(1), q0, 100, 42);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h.at("0"), 100u);
    EXPECT_THROW(sample_counts(StateVector(1), q0, 0, 42), Error);
}

TEST(Sampling, FairCoinWithinThreeSigma) {
    const int q0[] = {0};
    const auto plus = apply_gate(StateVector(1), Gate::h(0));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto h = sample_counts(plus, q0, 1'000'000, seed);
        const double f = static_cast<double>(h.count("0") ? h.at("0") : 0) / 1e6;
        EXPECT_NEAR(f, 0.5, 0.002);
    }
}

TEST(Sampling, FixedSeedRepeats) {
    std::mt19937_64 rng(1);
    const auto s = StateVector::from_amplitudes(random_state(8, rng));
    const int qs[] = {0, 1, 2};
    EXPECT_EQ(sample_counts(s, qs, 1000, 9), sample_counts(s, qs, 1000, 9));
}

TEST(Sampling, FrequenciesWithinFourSigma) {
    std::mt19937_64 rng(77);
    const int qs[] = {0, 2};
    constexpr double shots = 1e5;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = StateVector::from_amplitudes(random_state(8, rng));
        const auto h = sample_counts(s, qs, static_cast<std::uint64_t>(shots), 1000 + trial);
        std::uint64_t total = 0;
        for (const auto &[bits, count] : h) total += count;
        EXPECT_EQ(total, static_cast<std::uint64_t>(shots));
        for (int t = 0; t < 4; ++t) {
            const std::string bits = outcome_bits(static_cast<std::size_t>(t), 2);
            const double p = measure_probability(s, qs, bits);
            const double f = static_cast<double>(h.count(bits) ? h.at(bits) : 0) / shots;
            EXPECT_LE(std::abs(f - p), 4 * std::sqrt(p * (1 - p) / shots) + 1e-12) << bits;
        }
    }
}
