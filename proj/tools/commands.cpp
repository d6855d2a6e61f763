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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "qattr/attribution.hpp"
#include "qattr/datasets.hpp"
#include "qattr/error.hpp"
#include "qattr/gradients.hpp"
#include "qattr/trainer.hpp"
#include "schema.hpp"

#ifndef QATTR_VERSION
#define QATTR_VERSION "0.0.0"
#endif

namespace qattr::cli {

namespace fs = std::filesystem;

namespace {

// ---- output bookkeeping -----------------------------------------------------

class Outputs {
   public:
    Outputs(const Invocation &inv) : inv_(inv), start_(std::chrono::steady_clock::now()) {}

    void json(const std::string &rel, const Json &j) {
        write_json_file(inv_.out / rel, j);
        files_.push_back(rel);
    }

    void ppm(const std::string &rel, const Image &img) {
        write_ppm(inv_.out / rel, img);
        files_.push_back(rel);
    }

    /// manifest.json holds only replayable content so reruns are
    /// byte-identical; wall time goes to timing.txt beside it.
    void manifest(const Json &resolved, Json extra) {
        Json m{{"format", "qattr-manifest/1"},
               {"command", inv_.command},
               {"version", QATTR_VERSION},
               {"config", resolved}};
        for (auto &[k, v] : extra.items()) m[k] = std::move(v);
        m["outputs"] = files_;
        write_json_file(inv_.out / "manifest.json", m);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char buf[64];
        std::snprintf(buf, sizeof buf, "wall_time_seconds %.3f\n", seconds);
        write_text_file(inv_.out / "timing.txt", buf);
    }

   private:
    const Invocation &inv_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> files_;
};

// ---- data -------------------------------------------------------------------

int expected_side(const std::string &dataset) {
    if (dataset == "nist8x8") return 8;
    if (dataset == "mnist" || dataset == "fashion_mnist") return 28;
    return -1;
}

TaskFile build_task(const DatasetSpec &spec, Section &root) {
    std::vector<LabeledSample> raw;
    if (spec.name == "bars_and_stripes") {
        if (root.has("source")) root.fail("source", "bars_and_stripes is generated, not loaded");
        if (spec.image_side < 2 || spec.image_side > 12) {
            throw Error(ErrorKind::Config, "field 'dataset.image_side': must lie in [2, 12]");
        }
        raw = generate_bars_and_stripes(spec.image_side);
    } else {
        if (spec.image_side != expected_side(spec.name)) {
            throw Error(ErrorKind::Config, "field 'dataset.image_side': " + spec.name + " images are " +
                                               std::to_string(expected_side(spec.name)) + " pixels wide");
        }
        if (!root.has("source")) root.fail("source", "missing (needs images and labels IDX paths)");
        Section src = root.child("source", {"images", "labels"});
        const auto images = src.text("images", std::nullopt);
        const auto labels = src.text("labels", std::nullopt);
        root.adopt("source", src);
        const IdxImages idx = load_idx(images, labels);
        if (idx.rows != 28 || idx.cols != 28) {
            throw Error(ErrorKind::Config, "field 'source.images': expected 28x28 images, found " +
                                               std::to_string(idx.rows) + "x" + std::to_string(idx.cols));
        }
        raw = idx.samples;
        if (spec.name == "nist8x8") {
            for (auto &s : raw) s.pixels = downscale_to_8x8(s.pixels);
        }
    }
    return {spec, make_task(spec, raw)};
}

DatasetSpec resolve_dataset(Section &root) {
    DatasetSpec spec = dataset_spec_from_json(root.raw("dataset"));
    root.copy("dataset", dataset_spec_to_json(spec));
    return spec;
}

/// Either `data` (a samples file written by generate-data) or an inline
/// `dataset` plus `source`.
TaskFile resolve_data(Section &root) {
    const bool from_file = root.has("data");
    if (from_file == root.has("dataset")) {
        root.fail("data", "give exactly one of 'data' (a samples file) or 'dataset'");
    }
    if (from_file) {
        if (root.has("source")) root.fail("source", "only valid together with 'dataset'");
        const auto path = root.text("data", std::nullopt);
        TaskFile f = task_from_json(read_json_file(path));
        const auto cells = static_cast<std::size_t>(f.spec.image_side * f.spec.image_side);
        for (const auto *part : {&f.task.train, &f.task.test}) {
            for (const auto &s : *part) {
                if (s.pixels.size() != cells) {
                    throw Error(ErrorKind::Config, path + ": sample " + std::to_string(s.id) +
                                                       " does not match image_side");
                }
            }
        }
        return f;
    }
    return build_task(resolve_dataset(root), root);
}

// ---- features and models ----------------------------------------------------

enum class Features { PIXELS, ROW_COLUMN_MEANS };

Features features_from_string(const std::string &s) {
    return s == "row_column_means" ? Features::ROW_COLUMN_MEANS : Features::PIXELS;
}

std::string to_string(Features f) { return f == Features::PIXELS ? "pixels" : "row_column_means"; }

std::vector<double> features_of(Features f, const LabeledSample &s, int side) {
    return f == Features::PIXELS ? s.pixels : row_column_means(s.pixels, side);
}

std::vector<Example> examples_of(const std::vector<LabeledSample> &samples, Features f, int side) {
    std::vector<Example> out;
    out.reserve(samples.size());
    for (const auto &s : samples) out.push_back({features_of(f, s, side), s.label});
    return out;
}

struct LoadedModel {
    QuantumModel model;
    Features features = Features::PIXELS;
};

LoadedModel load_model(const std::string &path) {
    const Json j = read_json_file(path);
    LoadedModel out;
    try {
        out.model = model_from_json(j);
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, path + ": " + e.what());
    }
    if (j.contains("metadata") && j.at("metadata").contains("features")) {
        out.features = features_from_string(j.at("metadata").at("features").get<std::string>());
    }
    return out;
}

int auto_qubits(EncodingKind kind, std::size_t features) {
    if (kind == EncodingKind::ANGLE) return static_cast<int>(features);
    int n = 1;
    while ((std::size_t{1} << n) < features) ++n;
    return n;
}

void check_width(const LoadedModel &m, std::size_t feature_count, const std::string &path) {
    const auto &enc = m.model.encoding;
    const bool fits = enc.kind == EncodingKind::ANGLE
                          ? feature_count == static_cast<std::size_t>(enc.n_qubits)
                          : (feature_count <= enc.feature_slots() ||
                             enc.fit_policy == FitPolicy::TRUNCATE_LAST);
    if (!fits) {
        throw Error(ErrorKind::Config, path + ": model expects a different feature count than the data (" +
                                           std::to_string(feature_count) + ")");
    }
}

// ---- shared config sections ---------------------------------------------------

struct Selection {
    std::string split;
    std::vector<std::size_t> indices;
};

Selection resolve_samples(Section &root, const Task &task) {
    Section sel = root.child("samples", {"split", "indices"});
    Selection out;
    out.split = sel.choice("split", "test", {"train", "test"});
    const auto &pool = out.split == "train" ? task.train : task.test;
    if (sel.has("indices")) {
        const Json &arr = sel.raw("indices");
        if (!arr.is_array() || arr.empty()) sel.fail("indices", "expected a non-empty array of integers");
        for (const auto &v : arr) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                sel.fail("indices", "expected non-negative integers");
            }
            out.indices.push_back(v.get<std::size_t>());
        }
    } else {
        out.indices = {0};
    }
    for (auto i : out.indices) {
        if (i >= pool.size()) {
            sel.fail("indices", "index " + std::to_string(i) + " out of range for split '" + out.split +
                                    "' (" + std::to_string(pool.size()) + " samples)");
        }
    }
    sel.copy("indices", out.indices);
    root.adopt("samples", sel);
    return out;
}

ShotBudget resolve_shots(Section &s, std::string_view name, const Json &value) {
    if (value.is_string() && value.get<std::string>() == "exact") return ShotBudget::exact();
    if (value.is_number_integer() && value.get<std::int64_t>() > 0) {
        return ShotBudget::shots(value.get<std::uint64_t>());
    }
    s.fail(name, "expected \"exact\" or a positive integer");
}

Json shots_json(ShotBudget b) {
    return b.is_exact() ? Json("exact") : Json(b.count());
}

GradientBackend resolve_backend(Section &parent) {
    Section b = parent.child("backend", {"method", "ancillas", "shots"});
    GradientBackend out;
    out.method = gradient_method_from_string(
        b.choice("method", "exact", {"exact", "hadamard_single", "hadamard_multi", "param_shift"}));
    out.ancillas = static_cast<int>(b.integer("ancillas", 1, 1, kMaxAncillas));
    out.shots = b.has("shots") ? resolve_shots(b, "shots", b.raw("shots")) : ShotBudget::exact();
    b.copy("shots", shots_json(out.shots));
    parent.adopt("backend", b);
    return out;
}

struct AttributionSettings {
    AttributionConfig config;
    bool default_baseline = true;
    int scale = 16;
};

AttributionSettings resolve_attribution(Section &root, std::uint64_t seed) {
    Section a = root.child("attribution", {"path_steps", "backend", "space", "baseline", "scale"});
    AttributionSettings out;
    out.config.path_steps = static_cast<int>(a.integer("path_steps", kDefaultPathSteps, 1, 1 << 20));
    out.config.backend = resolve_backend(a);
    out.config.space = attribution_space_from_string(a.choice("space", "pixel", {"pixel", "amplitude"}));
    const bool named_default = a.has("baseline") && a.raw("baseline") == Json("default");
    if (a.has("baseline") && !named_default) {
        out.config.baseline = a.numbers("baseline");
        out.default_baseline = false;
    } else {
        a.copy("baseline", "default");
    }
    out.scale = static_cast<int>(a.integer("scale", 16, 1, 256));
    out.config.seed = seed;
    root.adopt("attribution", a);
    return out;
}

/// Attributes one sample and writes <stem>.json plus <stem>.ppm when the
/// features are pixels.
AttributionMap attribute_one(const QuantumModel &model, Features features, const LabeledSample &s,
                             int side, const AttributionSettings &settings, const std::string &stem,
                             Outputs &outputs, Json &record) {
    const auto x = features_of(features, s, side);
    AttributionConfig cfg = settings.config;
    if (settings.default_baseline) cfg.baseline = default_baseline(model, x.size());
    if (cfg.baseline.size() != x.size()) {
        throw Error(ErrorKind::Config, "field 'attribution.baseline': expected " +
                                           std::to_string(x.size()) + " values");
    }
    const AttributionMap map = integrated_gradients(model, x, cfg);
    outputs.json(stem + ".json", attribution_to_json(map));
    record = Json{{"id", s.id},
                  {"label", s.label},
                  {"source_class", s.source_class},
                  {"attribution", stem + ".json"},
                  {"residual", map.completeness_residual},
                  {"top_k_mass", top_k_mass(map.scores)}};
    if (features == Features::PIXELS) {
        std::vector<double> shown = map.scores;
        if (cfg.space == AttributionSpace::AMPLITUDE) {
            shown.resize(std::min(shown.size(), model.encoding.feature_slots()));
        }
        outputs.ppm(stem + ".ppm", render_heatmap(shown, s.pixels, side, settings.scale));
        record["heatmap"] = stem + ".ppm";
    } else {
        record["heatmap"] = nullptr;
    }
    return map;
}

const LabeledSample &pick(const Task &task, const Selection &sel, std::size_t i) {
    return (sel.split == "train" ? task.train : task.test)[sel.indices[i]];
}

std::string stem_of(const Selection &sel, std::size_t i) {
    return sel.split + "-" + std::to_string(sel.indices[i]);
}

}  // namespace

// ---- generate-data ------------------------------------------------------------

int run_generate_data(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"dataset", "source"});
    if (!root.has("dataset")) root.fail("dataset", "missing");
    const TaskFile file = build_task(resolve_dataset(root), root);
    outputs.json("samples.json", task_to_json(file));
    outputs.manifest(root.out(), Json{{"counts", {{"train", file.task.train.size()},
                                                  {"test", file.task.test.size()}}}});
    return 0;
}

// ---- train --------------------------------------------------------------------

int run_train(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"data", "dataset", "source", "model", "optimizer", "seed"});
    const TaskFile data = resolve_data(root);
    const std::uint64_t seed = root.u64("seed", 0);
    const int side = data.spec.image_side;

    Section ms = root.child("model", {"n_qubits", "n_layers", "encoding", "fit_policy", "angle_scale",
                                      "observable", "activation", "features"});
    const Features features =
        features_from_string(ms.choice("features", "pixels", {"pixels", "row_column_means"}));
    const auto train_set = examples_of(data.task.train, features, side);
    const auto test_set = examples_of(data.task.test, features, side);
    if (train_set.empty()) root.fail("dataset", "the split leaves no training samples");
    const std::size_t feature_count = train_set.front().features.size();

    const EncodingKind kind = encoding_kind_from_string(
        ms.choice("encoding", "amplitude_overflow", {"amplitude_overflow", "amplitude_normalized", "angle"}));
    const FitPolicy fit = fit_policy_from_string(
        ms.choice("fit_policy", "truncate_last", {"truncate_last", "pad_next_qubit", "plain_normalize"}));
    const int n = ms.has("n_qubits") ? static_cast<int>(ms.integer("n_qubits", std::nullopt, 1, kMaxQubits))
                                     : auto_qubits(kind, feature_count);
    ms.copy("n_qubits", n);
    if (kind == EncodingKind::ANGLE && static_cast<std::size_t>(n) != feature_count) {
        ms.fail("n_qubits", "angle encoding needs one qubit per feature (" + std::to_string(feature_count) + ")");
    }
    QuantumModel model;
    model.ansatz = {0, static_cast<int>(ms.integer("n_layers", 8, 0, 256))};
    model.encoding = resolve_encoding(kind, feature_count, n, fit);
    model.encoding.angle_scale = ms.number("angle_scale", kind == EncodingKind::ANGLE ? std::numbers::pi : 1.0);
    model.ansatz.n_qubits = model.encoding.n_qubits;
    const auto obs = ms.text("observable", "Z0");
    try {
        model.observable = ObservableSpec::parse(obs);
    } catch (const Error &e) {
        ms.fail("observable", e.what());
    }
    model.activation = activation_from_string(ms.choice("activation", "tanh", {"tanh", "none"}));
    root.adopt("model", ms);

    Section os = root.child("optimizer", {"kind", "max_iters", "learning_rate", "spsa", "init", "resume"});
    TrainConfig tc;
    tc.seed = seed;
    tc.optimizer = optimizer_from_string(os.choice("kind", "spsa", {"spsa", "gd_param_shift"}));
    tc.max_iters = static_cast<int>(os.integer("max_iters", 1000, 0, 100000000));
    tc.learning_rate = os.number("learning_rate", 0.1);
    if (!(tc.learning_rate > 0.0)) os.fail("learning_rate", "must be positive");
    Section ss = os.child("spsa", {"a", "c", "A", "alpha", "gamma"});
    tc.spsa.a = ss.number("a", tc.spsa.a);
    tc.spsa.c = ss.number("c", tc.spsa.c);
    tc.spsa.A = ss.number("A", tc.spsa.A);
    tc.spsa.alpha = ss.number("alpha", tc.spsa.alpha);
    tc.spsa.gamma = ss.number("gamma", tc.spsa.gamma);
    for (const char *k : {"a", "c", "alpha", "gamma"}) {
        if (!(ss.out().at(k).get<double>() > 0.0)) ss.fail(k, "must be positive");
    }
    if (tc.spsa.A < 0.0) ss.fail("A", "must be non-negative");
    os.adopt("spsa", ss);
    tc.init = null_kind_from_string(
        os.choice("init", "uniform_0_pi", {"uniform_0_pi", "gaussian_0_halfpi", "student_t_nu2"}));
    if (const auto resume = os.optional_text("resume")) {
        const LoadedModel prior = load_model(*resume);
        if (prior.model.theta.size() != static_cast<std::size_t>(model.ansatz.parameter_count())) {
            os.fail("resume", "model has " + std::to_string(prior.model.theta.size()) +
                                  " parameters, this ansatz needs " +
                                  std::to_string(model.ansatz.parameter_count()));
        }
        tc.resume_theta = prior.model.theta;
    }
    root.adopt("optimizer", os);

    model.theta = initial_parameters(model.ansatz, tc);
    const TrainResult result = train(model, train_set, tc);
    const double train_acc = evaluate_accuracy(result.model, train_set);
    const Json test_acc = test_set.empty() ? Json(nullptr) : Json(evaluate_accuracy(result.model, test_set));

    Json model_json = model_to_json(result.model);
    model_json["metadata"] = Json{{"seed", seed},
                                  {"dataset", dataset_spec_to_json(data.spec)},
                                  {"features", to_string(features)},
                                  {"accuracy", {{"train", train_acc}, {"test", test_acc}}}};
    outputs.json("model.json", model_json);

    Json history = Json::array();
    for (const auto &h : result.history) {
        history.push_back({{"iteration", h.iteration}, {"loss", h.loss}, {"accuracy", h.accuracy}});
    }
    Json extra{{"seed", seed},
               {"optimizer_note", tc.optimizer == Optimizer::SPSA
                                      ? "SPSA stands in for COBYLA (derivative-free); gains a/(k+A)^alpha, c/k^gamma"
                                      : "full-batch gradient descent with parameter-shift gradients"},
               {"best_iteration", result.best_iteration},
               {"best_loss", result.best_loss},
               {"final", {{"train_accuracy", train_acc}, {"test_accuracy", test_acc}}},
               {"history", std::move(history)}};
    outputs.manifest(root.out(), std::move(extra));
    return 0;
}

// ---- evaluate -----------------------------------------------------------------

int run_evaluate(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"model", "data", "dataset", "source"});
    const auto path = root.text("model", std::nullopt);
    const LoadedModel lm = load_model(path);
    const TaskFile data = resolve_data(root);
    Json report = Json::object();
    for (const char *split : {"train", "test"}) {
        const auto &pool = std::string(split) == "train" ? data.task.train : data.task.test;
        const auto ex = examples_of(pool, lm.features, data.spec.image_side);
        if (ex.empty()) {
            report[split] = {{"count", 0}, {"accuracy", nullptr}, {"loss", nullptr}};
            continue;
        }
        check_width(lm, ex.front().features.size(), path);
        report[split] = {{"count", ex.size()},
                         {"accuracy", evaluate_accuracy(lm.model, ex)},
                         {"loss", loss(lm.model, ex)}};
    }
    outputs.json("evaluation.json", report);
    outputs.manifest(root.out(), Json{{"evaluation", report}});
    return 0;
}

// ---- attribute ----------------------------------------------------------------

int run_attribute(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"model", "data", "dataset", "source", "samples", "attribution", "seed"});
    const auto path = root.text("model", std::nullopt);
    const LoadedModel lm = load_model(path);
    const TaskFile data = resolve_data(root);
    const Selection sel = resolve_samples(root, data.task);
    const std::uint64_t seed = root.u64("seed", 0);
    const AttributionSettings settings = resolve_attribution(root, seed);

    Json records = Json::array();
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
        const auto &s = pick(data.task, sel, i);
        check_width(lm, features_of(lm.features, s, data.spec.image_side).size(), path);
        Json rec;
        attribute_one(lm.model, lm.features, s, data.spec.image_side, settings,
                      "attributions/" + stem_of(sel, i), outputs, rec);
        rec["split"] = sel.split;
        rec["index"] = sel.indices[i];
        records.push_back(std::move(rec));
    }
    outputs.manifest(root.out(), Json{{"samples", records}});
    return 0;
}

// ---- gradcheck ----------------------------------------------------------------

int run_gradcheck(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"model", "data", "dataset", "source", "samples", "shots", "ancillas",
                                  "path_steps", "seed"});
    const auto path = root.text("model", std::nullopt);
    const LoadedModel lm = load_model(path);
    if (!lm.model.encoding.is_amplitude()) {
        root.fail("model", "gradcheck compares amplitude-gradient estimators; angle models use parameter shift");
    }
    const TaskFile data = resolve_data(root);
    const Selection sel = resolve_samples(root, data.task);

    std::vector<ShotBudget> shots;
    if (root.has("shots")) {
        const Json &arr = root.raw("shots");
        if (!arr.is_array() || arr.empty()) root.fail("shots", "expected a non-empty array");
        for (const auto &v : arr) shots.push_back(resolve_shots(root, "shots", v));
    } else {
        shots = {ShotBudget::shots(10), ShotBudget::shots(100), ShotBudget::shots(500)};
    }
    Json shots_out = Json::array();
    for (auto s : shots) shots_out.push_back(shots_json(s));
    root.copy("shots", shots_out);

    std::vector<int> ancillas;
    if (root.has("ancillas")) {
        const Json &arr = root.raw("ancillas");
        if (!arr.is_array() || arr.empty()) root.fail("ancillas", "expected a non-empty array");
        for (const auto &v : arr) {
            if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > kMaxAncillas) {
                root.fail("ancillas", "entries must lie in [1, " + std::to_string(kMaxAncillas) + "]");
            }
            ancillas.push_back(v.get<int>());
        }
    } else {
        ancillas = {1, 2};
    }
    root.copy("ancillas", ancillas);
    const int steps = static_cast<int>(root.integer("path_steps", 16, 1, 1 << 20));
    const std::uint64_t seed = root.u64("seed", 0);
    const auto dim = std::size_t{1} << lm.model.ansatz.n_qubits;
    for (int m : ancillas) {
        if ((std::size_t{1} << m) - 1 > dim) root.fail("ancillas", "more ancilla slots than amplitudes");
    }

    bool all_pass = true;
    Json samples = Json::array();
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
        const auto &s = pick(data.task, sel, i);
        const auto x = features_of(lm.features, s, data.spec.image_side);
        check_width(lm, x.size(), path);
        const EncodedInput enc = encode(lm.model.encoding, x);
        const auto exact = exact_input_gradient(lm.model, enc).values;
        AttributionConfig ig_cfg;
        ig_cfg.baseline = default_baseline(lm.model, x.size());
        ig_cfg.path_steps = steps;
        ig_cfg.seed = seed;
        const AttributionMap exact_ig = integrated_gradients(lm.model, x, ig_cfg);

        std::optional<std::vector<double>> single_exact;
        Json entries = Json::array();
        for (auto shot : shots) {
            for (int m : ancillas) {
                const GradientBackend backend{m == 1 ? GradientMethod::HADAMARD_SINGLE : GradientMethod::HADAMARD_MULTI,
                                              m, shot};
                const std::uint64_t run_seed =
                    derive_seed(seed, {static_cast<std::uint64_t>(s.id), shot.count(), static_cast<std::uint64_t>(m)});
                const auto g = amplitude_gradient(lm.model, enc, backend, run_seed).values;
                double err = 0.0;
                for (std::size_t k = 0; k < dim; ++k) err = std::max(err, std::abs(g[k] - exact[k]));
                // Each recovered component is a +-2^m weighted mean of
                // outcome indicators, so its standard deviation is at most
                // 2^m / sqrt(shots); allow four of them.
                const double tol = shot.is_exact()
                                       ? 1e-8
                                       : 4.0 * std::ldexp(1.0, m) / std::sqrt(static_cast<double>(shot.count()));
                AttributionConfig cfg = ig_cfg;
                cfg.backend = backend;
                cfg.seed = run_seed;
                const AttributionMap ig = integrated_gradients(lm.model, x, cfg);
                const Similarity sim = attribution_similarity(exact_ig, ig);
                Json e{{"shots", shots_json(shot)},
                       {"ancillas", m},
                       {"max_component_error", err},
                       {"tolerance", tol},
                       {"pass", err <= tol},
                       {"ig_cosine", sim.cosine ? Json(*sim.cosine) : Json(nullptr)},
                       {"ig_rank_overlap", sim.rank_overlap_topk}};
                if (shot.is_exact()) {
                    if (m == 1) single_exact = g;
                    if (single_exact) {
                        double d = 0.0;
                        for (std::size_t k = 0; k < dim; ++k) d = std::max(d, std::abs(g[k] - (*single_exact)[k]));
                        e["max_difference_vs_single_ancilla"] = d;
                    }
                }
                all_pass = all_pass && err <= tol;
                entries.push_back(std::move(e));
            }
        }
        samples.push_back({{"id", s.id}, {"split", sel.split}, {"index", sel.indices[i]}, {"checks", std::move(entries)}});
    }
    const Json report{{"pass", all_pass}, {"samples", samples}};
    outputs.json("gradcheck.json", report);
    outputs.manifest(root.out(), Json{{"pass", all_pass}});
    return 0;
}

// ---- null-model ---------------------------------------------------------------

int run_null_model(const Invocation &inv) {
    Outputs outputs(inv);
    Section root(inv.config, "", {"model", "data", "dataset", "source", "samples", "nulls", "attribution", "seed"});
    const auto path = root.text("model", std::nullopt);
    const LoadedModel lm = load_model(path);
    const TaskFile data = resolve_data(root);
    const Selection sel = resolve_samples(root, data.task);

    std::vector<NullKind> kinds;
    if (root.has("nulls")) {
        const Json &arr = root.raw("nulls");
        if (!arr.is_array() || arr.empty()) root.fail("nulls", "expected a non-empty array");
        for (const auto &v : arr) {
            if (!v.is_string()) root.fail("nulls", "expected distribution names");
            try {
                kinds.push_back(null_kind_from_string(v.get<std::string>()));
            } catch (const Error &e) {
                root.fail("nulls", e.what());
            }
        }
    } else {
        kinds.assign(std::begin(kAllNullKinds), std::end(kAllNullKinds));
    }
    Json names = Json::array();
    for (auto k : kinds) names.push_back(to_string(k));
    root.copy("nulls", names);
    const std::uint64_t seed = root.u64("seed", 0);
    const AttributionSettings settings = resolve_attribution(root, seed);
    const int side = data.spec.image_side;

    auto attribute_all = [&](const QuantumModel &model, const std::string &dir) {
        Json per_sample = Json::array();
        double total = 0.0;
        for (std::size_t i = 0; i < sel.indices.size(); ++i) {
            const auto &s = pick(data.task, sel, i);
            Json rec;
            const auto map = attribute_one(model, lm.features, s, side, settings, dir + "/" + stem_of(sel, i),
                                           outputs, rec);
            total += top_k_mass(map.scores);
            per_sample.push_back(std::move(rec));
        }
        return std::pair{total / static_cast<double>(sel.indices.size()), per_sample};
    };

    check_width(lm, features_of(lm.features, pick(data.task, sel, 0), side).size(), path);
    const auto [trained_mass, trained_samples] = attribute_all(lm.model, "trained");
    Json nulls = Json::array();
    bool all_lower = true;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const NullDistribution dist{kinds[i], derive_seed(seed, {static_cast<std::uint64_t>(kinds[i])})};
        const QuantumModel null_model = sample_null_model(lm.model.ansatz, dist, lm.model);
        const std::string dir = "nulls/" + to_string(kinds[i]);
        Json mj = model_to_json(null_model);
        mj["metadata"] = {{"null_distribution", to_string(kinds[i])}, {"seed", dist.seed},
                          {"features", to_string(lm.features)}};
        outputs.json(dir + "/model.json", mj);
        const auto [mass, per_sample] = attribute_all(null_model, dir);
        all_lower = all_lower && trained_mass > mass;
        nulls.push_back({{"distribution", to_string(kinds[i])},
                         {"seed", dist.seed},
                         {"mean_top_k_mass", mass},
                         {"trained_is_more_concentrated", trained_mass > mass},
                         {"samples", per_sample}});
    }
    const Json report{{"top_k_rule", "10% of features, at least 4"},
                      {"trained", {{"mean_top_k_mass", trained_mass}, {"samples", trained_samples}}},
                      {"nulls", nulls},
                      {"trained_beats_every_null", all_lower}};
    outputs.json("null_report.json", report);
    outputs.manifest(root.out(), Json{{"trained_beats_every_null", all_lower}});
    return 0;
}

}  // namespace qattr::cli
