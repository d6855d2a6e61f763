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

#include <benchmark/benchmark.h>

#include <random>

#include "qattr/attribution.hpp"
#include "qattr/gradients.hpp"
#include "qattr/trainer.hpp"

using namespace qattr;

namespace {

QuantumModel model_of(int n, int layers) {
    QuantumModel m;
    m.ansatz = {n, layers};
    m.encoding = resolve_encoding(EncodingKind::AMPLITUDE_OVERFLOW, (std::size_t{1} << n) - 1, n);
    m.observable = ObservableSpec::parse("Z0");
    m.theta = sample_parameters(static_cast<std::size_t>(m.ansatz.parameter_count()), {NullKind::UNIFORM_0_PI, 1});
    return m;
}

std::vector<double> pixels(std::size_t count) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    std::vector<double> p(count);
    for (auto &v : p) v = u(rng);
    return p;
}

}  // namespace

static void BM_RotationGate(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    StateVector s(n);
    const Gate g = Gate::rx(n / 2, 0.3);
    for (auto _ : state) {
        apply_gate_in_place(s, g);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_RotationGate)->DenseRange(4, 16, 4);

static void BM_Cnot(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    StateVector s(n);
    const Gate g = Gate::cnot(0, n - 1);
    for (auto _ : state) {
        apply_gate_in_place(s, g);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_Cnot)->DenseRange(4, 16, 4);

static void BM_ExactGradient(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto m = model_of(n, 8);
    const auto e = encode(m.encoding, pixels((std::size_t{1} << n) - 1));
    for (auto _ : state) benchmark::DoNotOptimize(exact_input_gradient(m, e));
}
BENCHMARK(BM_ExactGradient)->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);

static void BM_HadamardComponent(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto m = model_of(n, 8);
    const auto e = encode(m.encoding, pixels((std::size_t{1} << n) - 1));
    const Circuit prep = amplitude_state_preparation_circuit(e);
    const Circuit obs = conjugated_observable_circuit(m);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(hadamard_test_component(prep, 1, obs, ShotBudget::shots(500), ++seed));
}
BENCHMARK(BM_HadamardComponent)->DenseRange(3, 7, 2)->Unit(benchmark::kMicrosecond);

static void BM_IntegratedGradients(benchmark::State &state) {
    const auto m = model_of(6, 6);
    const auto x = pixels(63);
    AttributionConfig cfg;
    cfg.path_steps = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrated_gradients(m, x, cfg));
}
BENCHMARK(BM_IntegratedGradients)->Arg(16)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
