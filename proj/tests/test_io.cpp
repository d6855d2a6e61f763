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

#include "qattr/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <functional>

#include "fixtures.hpp"
#include "qattr/error.hpp"

using namespace qattr;
namespace fs = std::filesystem;

namespace {

std::string config_error_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "no exception";
    return "";
}

}  // namespace

TEST(Json, ModelRoundTrip) {
    std::mt19937_64 rng(501);
    auto m = fixture::random_model(4, 3, rng);
    m.theta[2] = 0.1 + 0.2;  // not representable in short decimal
    m.encoding.fit_policy = FitPolicy::PLAIN_NORMALIZE;
    const auto back = model_from_json(Json::parse(model_to_json(m).dump()));
    EXPECT_EQ(back.theta, m.theta);
    EXPECT_EQ(back.observable, m.observable);
    EXPECT_EQ(back.ansatz.n_layers, 3);
    EXPECT_EQ(back.encoding.fit_policy, FitPolicy::PLAIN_NORMALIZE);
    EXPECT_EQ(model_to_json(back).dump(), model_to_json(m).dump());
}

TEST(Json, ModelFieldNames) {
    QuantumModel m;
    m.ansatz = {2, 1};
    m.theta = {0, 1, 2, 3};
    m.encoding.n_qubits = 2;
    const auto j = model_to_json(m);
    EXPECT_EQ(j.at("ansatz").at("n_qubits"), 2);
    EXPECT_EQ(j.at("observable"), "Z0");
    EXPECT_EQ(j.at("activation"), "tanh");
    EXPECT_TRUE(j.at("encoding").contains("kind"));
    auto with_meta = j;
    with_meta["metadata"] = {{"seed", 3}, {"dataset", "x"}, {"accuracy", 0.5}};
    EXPECT_NO_THROW(model_from_json(with_meta));
}

TEST(Json, UnknownFieldsAreNamed) {
    QuantumModel m;
    m.ansatz = {2, 1};
    m.theta = {0, 1, 2, 3};
    m.encoding.n_qubits = 2;
    auto j = model_to_json(m);
    j["colour"] = 1;
    EXPECT_NE(config_error_of([&] { model_from_json(j); }).find("'colour'"), std::string::npos);
    j = model_to_json(m);
    j["ansatz"]["depth"] = 3;
    EXPECT_NE(config_error_of([&] { model_from_json(j); }).find("'ansatz.depth'"), std::string::npos);
    j = model_to_json(m);
    j.erase("theta");
    EXPECT_NE(config_error_of([&] { model_from_json(j); }).find("'theta'"), std::string::npos);
    j = model_to_json(m);
    j["theta"] = "many";
    config_error_of([&] { model_from_json(j); });
    j = model_to_json(m);
    j["theta"].push_back(1.0);
    config_error_of([&] { model_from_json(j); });
}

TEST(Json, BackendRoundTrip) {
    for (const GradientBackend b : {GradientBackend{}, GradientBackend{GradientMethod::HADAMARD_MULTI, 3, ShotBudget::shots(500)},
                                    GradientBackend{GradientMethod::HADAMARD_SINGLE, 1, ShotBudget::shots(10)}}) {
        const auto back = backend_from_json(backend_to_json(b));
        EXPECT_EQ(back.method, b.method);
        EXPECT_EQ(back.ancillas, b.ancillas);
        EXPECT_EQ(back.shots, b.shots);
    }
    EXPECT_EQ(backend_to_json({}).at("shots"), "exact");
    config_error_of([] { backend_from_json(Json{{"shots", 0}}); });
    config_error_of([] { backend_from_json(Json::parse(R"({"shots": 0})")); });
    config_error_of([] { backend_from_json(Json{{"method", "magic"}}); });
}

TEST(Json, TaskRoundTrip) {
    DatasetSpec spec;
    spec.seed = 12;
    spec.subsample_per_class = 4;
    const auto task = make_task(spec, generate_bars_and_stripes(4));
    const TaskFile file{spec, task};
    const auto j = task_to_json(file);
    const auto back = task_from_json(Json::parse(j.dump()));
    EXPECT_EQ(task_to_json(back).dump(), j.dump());
    EXPECT_EQ(back.task.train.size(), task.train.size());
    EXPECT_EQ(back.spec.subsample_per_class, 4u);
    EXPECT_EQ(back.task.test[0].pixels, task.test[0].pixels);
}

TEST(Json, DatasetSpecDefaultsAndErrors) {
    const auto nist = dataset_spec_from_json(Json{{"name", "nist8x8"}});
    EXPECT_EQ(nist.class_pair.first, "0");
    EXPECT_EQ(nist.image_side, 8);
    EXPECT_NE(config_error_of([] { dataset_spec_from_json(Json{{"name", "cifar"}}); }).find("'dataset.name'"), std::string::npos);
    EXPECT_NE(config_error_of([] { dataset_spec_from_json(Json{{"classes", 2}}); }).find("'dataset.classes'"), std::string::npos);
}

TEST(Json, AttributionRoundTrip) {
    AttributionMap m;
    m.scores = {0.25, -1.0 / 3.0, 0.0};
    m.completeness_residual = 1e-9;
    m.output_at_input = 0.7;
    m.output_at_baseline = -0.2;
    m.config.baseline = {0, 0, 0};
    m.config.path_steps = 17;
    m.config.backend = {GradientMethod::HADAMARD_MULTI, 2, ShotBudget::shots(100)};
    m.config.seed = 99;
    m.config.space = AttributionSpace::AMPLITUDE;
    const auto j = attribution_to_json(m);
    EXPECT_TRUE(j.contains("residual"));
    const auto back = attribution_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.scores, m.scores);
    EXPECT_EQ(back.config.seed, 99u);
    EXPECT_EQ(attribution_to_json(back).dump(), j.dump());
}

TEST(Files, ReadWrite) {
    const fs::path dir = fs::temp_directory_path() / "qattr_io_test";
    fs::remove_all(dir);
    const Json j{{"a", 1}, {"b", {1.5, 2.5}}};
    write_json_file(dir / "nested" / "x.json", j);
    EXPECT_EQ(read_json_file(dir / "nested" / "x.json"), j);
    std::ifstream in(dir / "nested" / "x.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text.back(), '\n');
    write_text_file(dir / "bad.json", "{not json");
    EXPECT_EQ(config_error_of([&] { read_json_file(dir / "bad.json"); }).empty(), false);
    try {
        read_json_file(dir / "missing.json");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    fs::remove_all(dir);
}

TEST(Heatmap, ColorEndpoints) {
    EXPECT_EQ(diverging_color(-1.0), (Rgb{255, 0, 0}));
    EXPECT_EQ(diverging_color(0.0), (Rgb{255, 255, 255}));
    EXPECT_EQ(diverging_color(1.0), (Rgb{0, 0, 255}));
    EXPECT_EQ(diverging_color(0.5), (Rgb{128, 128, 255}));
    EXPECT_EQ(diverging_color(-0.5), (Rgb{255, 128, 128}));
    EXPECT_EQ(diverging_color(3.0), (Rgb{0, 0, 255}));
}

TEST(Heatmap, Layout) {
    const std::vector<double> scores = {2.0, -4.0, 0.0, 1.0};
    const std::vector<double> raw = {0.0, 1.0, 0.5, 0.25};
    const auto img = render_heatmap(scores, raw, 2, 3);
    EXPECT_EQ(img.width, 15);
    EXPECT_EQ(img.height, 6);
    auto at = [&](int x, int y) { return img.pixels[static_cast<std::size_t>(y * img.width + x)]; };
    EXPECT_EQ(at(0, 0), (Rgb{128, 128, 255}));  // 2 / 4 = 0.5
    EXPECT_EQ(at(3, 0), (Rgb{255, 0, 0}));
    EXPECT_EQ(at(2, 5), (Rgb{255, 255, 255}));
    EXPECT_EQ(at(6, 2), (Rgb{255, 255, 255}));  // gap column
    EXPECT_EQ(at(9, 0), (Rgb{0, 0, 0}));
    EXPECT_EQ(at(12, 0), (Rgb{255, 255, 255}));
    EXPECT_EQ(at(14, 5), (Rgb{64, 64, 64}));

    const std::vector<double> zero(4, 0.0);
    const auto blank = render_heatmap(zero, raw, 2, 1);
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) EXPECT_EQ(blank.pixels[static_cast<std::size_t>(y * blank.width + x)], (Rgb{255, 255, 255}));
    }
}

TEST(Heatmap, PpmBytes) {
    Image img;
    img.width = 2;
    img.height = 1;
    img.pixels = {Rgb{1, 2, 3}, Rgb{255, 0, 10}};
    EXPECT_EQ(encode_ppm(img), std::string("P6\n2 1\n255\n\x01\x02\x03\xff\x00\x0a", 17));
}
