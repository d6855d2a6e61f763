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

// Drives the qattr binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "qattr/attribution.hpp"
#include "qattr/io.hpp"
#include "support.hpp"

using namespace qattr;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QATTR_TEST_DATA_DIR;

struct Outcome {
    int code = -1;
    std::string err;
};

class Cli : public ::testing::Test {
   protected:
    Cli() : dir_(::testing::UnitTest::GetInstance()->current_test_info()->name()) {}

    fs::path at(const std::string &rel) const { return dir_.path() / rel; }

    Outcome run(const std::string &args) const {
        const auto err = at("stderr.txt");
        const std::string cmd = std::string(QATTR_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, support::read_bytes(err)};
    }

    void ok(const std::string &args) const {
        const Outcome r = run(args);
        ASSERT_EQ(r.code, 0) << args << "\n" << r.err;
    }

    std::string mnist_flags() const {
        return "--images " + (kData / "mnist5k-images-idx3-ubyte.gz").string() + " --labels " +
               (kData / "mnist5k-labels-idx1-ubyte.gz").string();
    }

    /// Small B&S task plus a briefly trained model under `prefix`.
    void bars_model(const std::string &prefix) const {
        ok("generate-data --dataset bars_and_stripes --image-side 4 --out " + at(prefix + "data").string());
        ok("train --data " + at(prefix + "data/samples.json").string() + " --max-iters 60 --seed 7 --out " +
           at(prefix + "train").string());
    }

    support::TempDir dir_;
};

Json error_of(const Outcome &r) { return Json::parse(r.err).at("error"); }

}  // namespace

TEST_F(Cli, GenerateBarsAndStripes) {
    ok("generate-data --dataset bars_and_stripes --image-side 4 --out " + at("d").string());
    const TaskFile f = task_from_json(read_json_file(at("d/samples.json")));
    EXPECT_EQ(f.task.train.size() + f.task.test.size(), 28u);
    const Json m = read_json_file(at("d/manifest.json"));
    EXPECT_EQ(m.at("command"), "generate-data");
    EXPECT_EQ(m.at("config").at("dataset").at("image_side"), 4);
    EXPECT_TRUE(fs::exists(at("d/timing.txt")));
}

TEST_F(Cli, GenerateNistFromIdx) {
    ok("generate-data --dataset nist8x8 --image-side 8 --classes 3,4 " + mnist_flags() + " --out " + at("n").string());
    const TaskFile f = task_from_json(read_json_file(at("n/samples.json")));
    ASSERT_FALSE(f.task.train.empty());
    for (const auto &s : f.task.train) {
        ASSERT_EQ(s.pixels.size(), 64u);
        ASSERT_TRUE(s.source_class == "3" || s.source_class == "4");
    }
}

TEST_F(Cli, ExitCodes) {
    Outcome r = run("generate-data --dataset nist8x8 --image-side 8 --images /no/such --labels /no/such --out " +
                at("x").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(error_of(r).at("kind"), "io");

    support::write_bytes(at("bad.json"), R"({"dataset": {"name": "bars_and_stripes"}, "colour": 1})");
    r = run("generate-data --config " + at("bad.json").string() + " --out " + at("x").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(error_of(r).at("message").get<std::string>().find("'colour'"), std::string::npos);

    support::write_bytes(at("bad2.json"), R"({"data": "x.json", "optimizer": {"spsa": {"gamma": "fast"}}})");
    r = run("train --config " + at("bad2.json").string() + " --out " + at("x").string());
    EXPECT_EQ(r.code, 3);  // the data file is read first

    r = run("train --out " + at("x").string());
    EXPECT_EQ(r.code, 2);
    r = run("frobnicate");
    EXPECT_EQ(r.code, 2);
    r = run("train --data a --dataset b --out " + at("x").string());
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, InvalidNestedFieldIsNamed) {
    bars_model("");
    support::write_bytes(at("bad.json"), R"({"optimizer": {"spsa": {"gamma": "fast"}}})");
    const Outcome r =
        run("train --config " + at("bad.json").string() + " --data " + at("data/samples.json").string() + " --out x");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(error_of(r).at("message").get<std::string>().find("optimizer.spsa.gamma"), std::string::npos);
}

TEST_F(Cli, RerunsAreByteIdentical) {
    for (const char *d : {"a", "b"}) {
        ok(std::string("generate-data --dataset bars_and_stripes --image-side 4 --seed 5 --out ") + at(d).string());
    }
    EXPECT_EQ(support::read_bytes(at("a/samples.json")), support::read_bytes(at("b/samples.json")));
    EXPECT_EQ(support::read_bytes(at("a/manifest.json")), support::read_bytes(at("b/manifest.json")));

    const std::string train = "train --data " + at("a/samples.json").string() + " --max-iters 60 --seed 7 --out ";
    ok(train + at("t1").string());
    ok(train + at("t2").string());
    for (const char *f : {"model.json", "manifest.json"}) {
        EXPECT_EQ(support::read_bytes(at("t1") / f), support::read_bytes(at("t2") / f)) << f;
    }
    // Another seed gives another theta.
    ok("train --data " + at("a/samples.json").string() + " --max-iters 60 --seed 8 --out " + at("t3").string());
    EXPECT_NE(read_json_file(at("t3/model.json")).at("theta"), read_json_file(at("t1/model.json")).at("theta"));
}

TEST_F(Cli, ResolvedConfigReplays) {
    bars_model("");
    // Feeding the manifest's resolved config back in reproduces the model.
    support::write_bytes(at("replay.json"), read_json_file(at("train/manifest.json")).at("config").dump());
    ok("train --config " + at("replay.json").string() + " --out " + at("replay").string());
    EXPECT_EQ(support::read_bytes(at("replay/model.json")), support::read_bytes(at("train/model.json")));

    // Same for attribute, whose resolved config spells the baseline "default".
    ok("attribute --data " + at("data/samples.json").string() + " --model " + at("train/model.json").string() +
       " --indices 1 --out " + at("attr").string());
    support::write_bytes(at("attr.json"), read_json_file(at("attr/manifest.json")).at("config").dump());
    ok("attribute --config " + at("attr.json").string() + " --out " + at("attr2").string());
    EXPECT_EQ(support::read_bytes(at("attr2/attributions/test-1.json")),
              support::read_bytes(at("attr/attributions/test-1.json")));
}

TEST_F(Cli, AttributeMatchesLibraryCall) {
    ok("generate-data --dataset nist8x8 --image-side 8 --classes 3,4 " + mnist_flags() + " --out " + at("n").string());
    ok("train --data " + at("n/samples.json").string() + " --qubits 6 --max-iters 30 --out " + at("t").string());
    ok("attribute --data " + at("n/samples.json").string() + " --model " + at("t/model.json").string() +
       " --indices 0,5 --method exact --seed 11 --out " + at("a").string());

    const QuantumModel model = model_from_json(read_json_file(at("t/model.json")));
    const TaskFile data = task_from_json(read_json_file(at("n/samples.json")));
    for (int idx : {0, 5}) {
        const auto &x = data.task.test[static_cast<std::size_t>(idx)].pixels;
        AttributionConfig cfg;
        cfg.baseline = default_baseline(model, x.size());
        cfg.seed = 11;
        const AttributionMap want = integrated_gradients(model, x, cfg);
        const std::string stem = "a/attributions/test-" + std::to_string(idx);
        const AttributionMap got = attribution_from_json(read_json_file(at(stem + ".json")));
        EXPECT_EQ(got.scores, want.scores);
        EXPECT_EQ(got.completeness_residual, want.completeness_residual);
        // P6 heatmap: header then (2 * 8 + 1) * 16 square pixels.
        const std::string ppm = support::read_bytes(at(stem + ".ppm"));
        EXPECT_EQ(ppm.rfind("P6\n272 128\n255\n", 0), 0u);
        EXPECT_EQ(ppm.size(), std::string("P6\n272 128\n255\n").size() + 272u * 128u * 3u);
    }
}

TEST_F(Cli, Gradcheck) {
    bars_model("");
    ok("gradcheck --data " + at("data/samples.json").string() + " --model " + at("train/model.json").string() +
       " --shots exact,500 --ancillas 1,2 --seed 3 --out " + at("g").string());
    const Json report = read_json_file(at("g/gradcheck.json"));
    const Json &checks = report.at("samples").at(0).at("checks");
    ASSERT_EQ(checks.size(), 4u);
    for (const auto &c : checks) {
        if (c.at("shots") == "exact") {
            EXPECT_LE(c.at("max_component_error").get<double>(), 1e-8);
            EXPECT_NEAR(c.at("ig_cosine").get<double>(), 1.0, 1e-12);
            EXPECT_LE(c.at("max_difference_vs_single_ancilla").get<double>(), 1e-9);
        } else {
            // Pinned from the first run of this configuration.
            const double pinned = c.at("ancillas") == 1 ? 0.9991 : 0.9968;
            EXPECT_GE(c.at("ig_cosine").get<double>(), pinned) << c.dump();
        }
    }
}

TEST_F(Cli, NullModelProducesThreeImageSets) {
    bars_model("");
    const std::string args = "null-model --data " + at("data/samples.json").string() + " --model " +
                             at("train/model.json").string() + " --indices 0,1 --seed 2 --out ";
    ok(args + at("n1").string());
    ok(args + at("n2").string());
    const Json report = read_json_file(at("n1/null_report.json"));
    ASSERT_EQ(report.at("nulls").size(), 3u);
    for (const auto &n : report.at("nulls")) {
        const fs::path d = at("n1/nulls") / n.at("distribution").get<std::string>();
        EXPECT_TRUE(fs::exists(d / "test-0.ppm"));
        EXPECT_TRUE(fs::exists(d / "test-1.ppm"));
        EXPECT_TRUE(fs::exists(d / "model.json"));
    }
    EXPECT_EQ(support::read_bytes(at("n1/null_report.json")), support::read_bytes(at("n2/null_report.json")));
}

TEST_F(Cli, EvaluateMatchesTrainingReport) {
    bars_model("");
    ok("evaluate --data " + at("data/samples.json").string() + " --model " + at("train/model.json").string() +
       " --out " + at("e").string());
    const Json ev = read_json_file(at("e/evaluation.json"));
    const Json meta = read_json_file(at("train/model.json")).at("metadata");
    EXPECT_EQ(ev.at("train").at("accuracy"), meta.at("accuracy").at("train"));
    EXPECT_EQ(ev.at("test").at("accuracy"), meta.at("accuracy").at("test"));
}

TEST_F(Cli, SingularityExitsWithAlpha) {
    // Every pixel lit leaves no overflow amplitude.
    DatasetSpec spec;
    spec.image_side = 2;
    spec.class_pair = {"bars", "stripes"};
    Task task;
    task.train = {{{0.2, 0.0, 0.0, 0.0}, 1, "bars", 0}, {{0.0, 0.2, 0.0, 0.0}, -1, "stripes", 1}};
    task.test = {{{1.0, 1.0, 1.0, 1.0}, 1, "bars", 2}};
    write_json_file(at("s.json"), task_to_json({spec, task}));
    ok("train --data " + at("s.json").string() + " --qubits 2 --max-iters 0 --out " + at("t").string());
    // A saturated baseline keeps the whole path on the singular set; the
    // first midpoint of a two-step rule sits at alpha = 1/4.
    support::write_bytes(at("c.json"), R"({"attribution": {"baseline": [1, 1, 1, 1], "path_steps": 2}})");
    const Outcome r = run("attribute --config " + at("c.json").string() + " --data " + at("s.json").string() +
                          " --model " + at("t/model.json").string() + " --out " + at("a").string());
    ASSERT_EQ(r.code, 4) << r.err;
    const Json err = error_of(r);
    EXPECT_EQ(err.at("kind"), "near_overflow_singularity");
    EXPECT_EQ(err.at("alpha").get<double>(), 0.25);
    EXPECT_LT(err.at("overflow_amplitude").get<double>(), 1e-6);
}
