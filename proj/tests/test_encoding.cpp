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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qattr/error.hpp"

using namespace qattr;

namespace {

double sum_squares(const std::vector<double> &v) {
    double s = 0;
    for (double a : v) s += a * a;
    return s;
}

}  // namespace

TEST(OverflowEncoding, BlankImageIsOverflowBasisState) {
    const std::vector<double> zeros(3, 0.0);
    const auto e = encode_amplitude_overflow(zeros, 2);
    EXPECT_EQ(e.amplitudes, (std::vector<double>{0, 0, 0, 1}));
}

TEST(OverflowEncoding, SaturatedImageLeavesNoOverflow) {
    const std::vector<double> ones(3, 1.0);
    const auto e = encode_amplitude_overflow(ones, 2);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.amplitudes[i], 1 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(e.overflow_amplitude(), 0.0, 1e-7);
}

TEST(OverflowEncoding, ArithmeticExample) {
    const std::vector<double> f = {0.5, 0.25, 0.0};
    const auto e = encode_amplitude_overflow(f, 2);
    // Direct arithmetic: s^2 = 1/3, so the used mass is (0.25 + 0.0625)/3.
    EXPECT_NEAR(e.overflow_amplitude(), std::sqrt(1 - (0.25 + 0.0625) / 3), 1e-15);
    EXPECT_NEAR(e.amplitudes[0], 0.5 / std::sqrt(3.0), 1e-15);
}

TEST(OverflowEncoding, Errors) {
    const std::vector<double> too_many(4, 0.5);
    EXPECT_THROW(encode_amplitude_overflow(too_many, 2), Error);
    const std::vector<double> out_of_range = {1.5};
    EXPECT_THROW(encode_amplitude_overflow(out_of_range, 2), Error);
    const std::vector<double> negative = {-0.1};
    EXPECT_THROW(encode_amplitude_overflow(negative, 2), Error);
}

TEST(OverflowEncoding, PixelAmplitudeDoesNotDependOnOtherPixels) {
    std::mt19937_64 rng(4);
    auto a = oracle::random_pixels(15, rng);
    auto b = oracle::random_pixels(15, rng);
    b[3] = a[3];
    const auto ea = encode_amplitude_overflow(a, 4), eb = encode_amplitude_overflow(b, 4);
    EXPECT_EQ(ea.amplitudes[3], eb.amplitudes[3]);
    const auto na = encode_amplitude_normalized(a, 4), nb = encode_amplitude_normalized(b, 4);
    EXPECT_NE(na.amplitudes[3], nb.amplitudes[3]);
}

TEST(OverflowEncoding, OverflowDecreasesAsAnyPixelGrows) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = oracle::random_pixels(7, rng);
        for (auto &v : p) v *= 0.9;
        const auto i = static_cast<std::size_t>(trial % 7);
        const double before = encode_amplitude_overflow(p, 3).overflow_amplitude();
        p[i] += 0.05;
        const double after = encode_amplitude_overflow(p, 3).overflow_amplitude();
        EXPECT_LT(after, before);
    }
}

TEST(NormalizedEncoding, Examples) {
    const std::vector<double> f = {3, 4};
    const auto e = encode_amplitude_normalized(f, 1);
    EXPECT_NEAR(e.amplitudes[0], 0.6, 1e-15);
    EXPECT_NEAR(e.amplitudes[1], 0.8, 1e-15);

    std::vector<double> basis(8, 0.0);
    basis[5] = 7;
    EXPECT_EQ(encode_amplitude_normalized(basis, 3).amplitudes[5], 1.0);

    const std::vector<double> zeros(4, 0.0);
    EXPECT_THROW(encode_amplitude_normalized(zeros, 2), Error);

    std::mt19937_64 rng(1);
    const auto r = oracle::random_pixels(16, rng);
    EXPECT_NEAR(sum_squares(encode_amplitude_normalized(r, 4).amplitudes), 1.0, 1e-12);
}

TEST(Encoding, EveryEncoderOutputIsNormalized) {
    std::mt19937_64 rng(21);
    for (int n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto dim = std::size_t{1} << n;
            const auto p = oracle::random_pixels(dim - 1, rng);
            EXPECT_NEAR(sum_squares(encode_amplitude_overflow(p, n).amplitudes), 1.0, 1e-10);
            EXPECT_NEAR(sum_squares(encode_amplitude_normalized(p, n).amplitudes), 1.0, 1e-10);
        }
    }
}

TEST(Encoding, FitPolicies) {
    const auto trunc = resolve_encoding(EncodingKind::AMPLITUDE_OVERFLOW, 64, 6);
    EXPECT_EQ(trunc.n_qubits, 6);
    EXPECT_EQ(trunc.feature_slots(), 63u);
    const auto pad =
        resolve_encoding(EncodingKind::AMPLITUDE_OVERFLOW, 64, 6, FitPolicy::PAD_NEXT_QUBIT);
    EXPECT_EQ(pad.n_qubits, 7);
    const auto plain =
        resolve_encoding(EncodingKind::AMPLITUDE_OVERFLOW, 64, 6, FitPolicy::PLAIN_NORMALIZE);
    EXPECT_EQ(plain.kind, EncodingKind::AMPLITUDE_NORMALIZED);
    EXPECT_EQ(plain.n_qubits, 6);

    std::vector<double> img(64, 0.5);
    img[63] = 1.0;
    const auto e = encode(trunc, img);
    EXPECT_EQ(e.amplitudes.size(), 64u);
    EXPECT_EQ(e.raw_features.size(), 64u);
    EXPECT_NEAR(e.amplitudes[62], 0.5 / std::sqrt(63.0), 1e-15);
    EXPECT_NEAR(e.overflow_amplitude(), std::sqrt(1 - 63 * 0.25 / 63), 1e-12);

    for (auto kind : {FitPolicy::TRUNCATE_LAST, FitPolicy::PAD_NEXT_QUBIT, FitPolicy::PLAIN_NORMALIZE}) {
        EXPECT_EQ(fit_policy_from_string(to_string(kind)), kind);
    }
    EXPECT_THROW(fit_policy_from_string("nope"), Error);
}

TEST(BasisState, IndexingConvention) {
    EXPECT_EQ(prepare_basis_state(0, 3)[0], Complex(1.0));
    const auto s = prepare_basis_state(5, 3);
    EXPECT_EQ(s[5], Complex(1.0));
    // 5 = 101: X on qubits 0 and 2 (qubit 0 is the most significant bit).
    const auto c = basis_state_circuit(5, 3);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.gates()[0].targets[0], 0);
    EXPECT_EQ(c.gates()[1].targets[0], 2);
    EXPECT_EQ(run_circuit(c, StateVector(3))[5], Complex(1.0));
    EXPECT_EQ(basis_state_circuit(7, 3).size(), 3u);
    EXPECT_THROW(prepare_basis_state(8, 3), Error);
}

TEST(AngleEncoding, Examples) {
    const std::vector<double> zeros(3, 0.0);
    const auto c = encode_angle(zeros, 3);
    EXPECT_EQ(c.size(), 3u);
    for (std::size_t k = 1; k < 8; ++k) EXPECT_EQ(run_circuit(c, StateVector(3))[k], Complex(0.0));

    const std::vector<double> pi = {oracle::kPi};
    const auto s = run_circuit(encode_angle(pi, 1), StateVector(1));
    EXPECT_NEAR(std::norm(s[1]), 1.0, 1e-15);
    EXPECT_NEAR(s[1].imag(), -1.0, 1e-15);

    const std::vector<double> eight(8, 0.25);
    EXPECT_EQ(encode_angle(eight, 8).n_qubits(), 8);
    EXPECT_THROW(encode_angle(eight, 7), Error);
}

TEST(StatePreparation, BasisTargetReducesToXPattern) {
    std::vector<double> t(8, 0.0);
    t[6] = 1.0;
    const auto c = amplitude_state_preparation_circuit(t);
    for (const auto &g : c.gates()) {
        EXPECT_EQ(g.kind, GateKind::X);
        EXPECT_TRUE(g.controls.empty());
    }
    EXPECT_EQ(run_circuit(c, StateVector(3))[6], Complex(1.0));
}

TEST(StatePreparation, EqualSuperpositionIsOneYRotation) {
    const std::vector<double> t = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
    const auto c = amplitude_state_preparation_circuit(t);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c.gates()[1].kind, GateKind::RX);
    EXPECT_NEAR(c.gates()[1].angle, oracle::kPi / 2, 1e-15);
    const auto s = run_circuit(c, StateVector(1));
    EXPECT_NEAR(s[0].real(), t[0], 1e-15);
    EXPECT_NEAR(s[1].real(), t[1], 1e-15);
}

TEST(StatePreparation, RandomTargetsAreReproduced) {
    std::mt19937_64 rng(99);
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            auto t = oracle::random_unit_real(std::size_t{1} << n, rng);
            if (trial % 4 == 0) {
                // Sparse targets exercise the dead-prefix branches.
                for (std::size_t i = 0; i < t.size(); i += 3) t[i] = 0;
                double norm = std::sqrt(sum_squares(t));
                for (auto &a : t) a /= norm;
            }
            const auto s = run_circuit(amplitude_state_preparation_circuit(t), StateVector(n));
            double err = 0;
            for (std::size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(s[i] - t[i]));
            ASSERT_LE(err, 1e-8) << "n=" << n << " trial=" << trial;
        }
    }
}

TEST(StatePreparation, OverflowInputsAreReproduced) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto e = encode_amplitude_overflow(oracle::random_pixels(15, rng), 4);
        const auto s = run_circuit(preparation_circuit(e), StateVector(4));
        for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(s[i].real(), e.amplitudes[i], 1e-10);
    }
    const std::vector<double> not_normalized = {0.5, 0.5};
    EXPECT_THROW(amplitude_state_preparation_circuit(not_normalized), Error);
}

TEST(StatePreparation, ComplexUnitaryFirstColumn) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<Complex> v(8);
    double norm = 0;
    for (auto &a : v) {
        a = {nd(rng), nd(rng)};
        norm += std::norm(a);
    }
    for (auto &a : v) a /= std::sqrt(norm);
    const Matrix u = state_preparation_unitary(v);
    EXPECT_LT((u.adjoint() * u - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < 8; ++i) EXPECT_LT(std::abs(u(i, 0) - v[static_cast<std::size_t>(i)]), 1e-12);
}
