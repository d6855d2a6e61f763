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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qattr/error.hpp"

namespace qattr {

namespace {

[[noreturn]] void config_error(const std::string &field, const std::string &what) {
    throw Error(ErrorKind::Config, "field '" + field + "': " + what);
}

const Json &field(const Json &j, const std::string &name, const std::string &ctx) {
    if (!j.is_object()) config_error(ctx, "expected an object");
    const auto it = j.find(name);
    if (it == j.end()) config_error(ctx.empty() ? name : ctx + "." + name, "missing");
    return *it;
}

template <typename T>
T get_as(const Json &j, const std::string &name, const std::string &ctx) {
    const Json &v = field(j, name, ctx);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception &) {
        config_error(ctx.empty() ? name : ctx + "." + name, "wrong type");
    }
}

template <typename T>
T get_or(const Json &j, const std::string &name, const std::string &ctx, T fallback) {
    if (!j.contains(name)) return fallback;
    return get_as<T>(j, name, ctx);
}

}  // namespace

void require_known_fields(const Json &j, std::span<const std::string_view> allowed,
                          const std::string &context) {
    if (!j.is_object()) config_error(context, "expected an object");
    for (const auto &[key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            config_error(context.empty() ? key : context + "." + key, "unknown field");
        }
    }
}

Json encoding_to_json(const EncodingMode &mode) {
    return Json{{"kind", to_string(mode.kind)},
                {"n_qubits", mode.n_qubits},
                {"fit_policy", to_string(mode.fit_policy)},
                {"angle_scale", mode.angle_scale}};
}

EncodingMode encoding_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"kind", "n_qubits", "fit_policy", "angle_scale"};
    require_known_fields(j, kFields, "encoding");
    EncodingMode m;
    m.kind = encoding_kind_from_string(get_as<std::string>(j, "kind", "encoding"));
    m.n_qubits = get_as<int>(j, "n_qubits", "encoding");
    m.fit_policy = fit_policy_from_string(
        get_or<std::string>(j, "fit_policy", "encoding", to_string(FitPolicy::TRUNCATE_LAST)));
    m.angle_scale = get_or<double>(j, "angle_scale", "encoding", 1.0);
    return m;
}

Json model_to_json(const QuantumModel &model) {
    return Json{{"format", "qattr-model/1"},
                {"ansatz", {{"n_qubits", model.ansatz.n_qubits}, {"n_layers", model.ansatz.n_layers}}},
                {"theta", model.theta},
                {"observable", model.observable.to_string()},
                {"activation", to_string(model.activation)},
                {"encoding", encoding_to_json(model.encoding)}};
}

QuantumModel model_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"format",     "ansatz",   "theta",   "observable",
                                                   "activation", "encoding", "metadata"};
    require_known_fields(j, kFields, "");
    QuantumModel m;
    const Json &ansatz = field(j, "ansatz", "");
    static constexpr std::string_view kAnsatz[] = {"n_qubits", "n_layers"};
    require_known_fields(ansatz, kAnsatz, "ansatz");
    m.ansatz.n_qubits = get_as<int>(ansatz, "n_qubits", "ansatz");
    m.ansatz.n_layers = get_as<int>(ansatz, "n_layers", "ansatz");
    m.theta = get_as<std::vector<double>>(j, "theta", "");
    m.observable = ObservableSpec::parse(get_or<std::string>(j, "observable", "", "Z0"));
    m.activation = activation_from_string(get_or<std::string>(j, "activation", "", "tanh"));
    m.encoding = encoding_from_json(field(j, "encoding", ""));
    try {
        m.validate();
    } catch (const Error &e) {
        throw Error(ErrorKind::Config, std::string("model: ") + e.what());
    }
    return m;
}

Json backend_to_json(const GradientBackend &backend) {
    Json j{{"method", to_string(backend.method)}, {"ancillas", backend.ancillas}};
    if (backend.shots.is_exact()) {
        j["shots"] = "exact";
    } else {
        j["shots"] = backend.shots.count();
    }
    return j;
}

GradientBackend backend_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"method", "ancillas", "shots"};
    require_known_fields(j, kFields, "backend");
    GradientBackend b;
    b.method = gradient_method_from_string(get_or<std::string>(j, "method", "backend", "exact"));
    b.ancillas = get_or<int>(j, "ancillas", "backend", 1);
    if (j.contains("shots")) {
        const Json &s = j.at("shots");
        if (s.is_string() && s.get<std::string>() == "exact") {
            b.shots = ShotBudget::exact();
        } else if (s.is_number_integer() && s.get<std::int64_t>() > 0) {
            b.shots = ShotBudget::shots(s.get<std::uint64_t>());
        } else {
            config_error("backend.shots", "expected \"exact\" or a positive integer");
        }
    }
    if (b.ancillas < 1 || b.ancillas > kMaxAncillas) {
        config_error("backend.ancillas", "must lie in [1, " + std::to_string(kMaxAncillas) + "]");
    }
    return b;
}

Json sample_to_json(const LabeledSample &s) {
    return Json{{"id", s.id}, {"label", s.label}, {"source_class", s.source_class}, {"pixels", s.pixels}};
}

LabeledSample sample_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"id", "label", "source_class", "pixels"};
    require_known_fields(j, kFields, "sample");
    LabeledSample s;
    s.id = get_as<std::int64_t>(j, "id", "sample");
    s.label = get_as<int>(j, "label", "sample");
    s.source_class = get_or<std::string>(j, "source_class", "sample", "");
    s.pixels = get_as<std::vector<double>>(j, "pixels", "sample");
    for (double p : s.pixels) {
        if (!(p >= 0.0 && p <= 1.0)) config_error("sample.pixels", "values must lie in [0, 1]");
    }
    return s;
}

Json dataset_spec_to_json(const DatasetSpec &spec) {
    Json j{{"name", spec.name},
           {"class_pair", {spec.class_pair.first, spec.class_pair.second}},
           {"image_side", spec.image_side},
           {"train_fraction", spec.train_fraction},
           {"seed", spec.seed}};
    if (spec.subsample_per_class) {
        j["subsample_per_class"] = *spec.subsample_per_class;
    } else {
        j["subsample_per_class"] = nullptr;
    }
    Json labels = Json::object();
    for (const auto &[k, v] : spec.resolved_label_map()) labels[k] = v;
    j["label_map"] = labels;
    return j;
}

DatasetSpec dataset_spec_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"name",           "class_pair", "image_side",
                                                   "train_fraction", "seed",       "subsample_per_class",
                                                   "label_map"};
    require_known_fields(j, kFields, "dataset");
    DatasetSpec spec;
    spec.name = get_or<std::string>(j, "name", "dataset", spec.name);
    static constexpr std::string_view kNames[] = {"bars_and_stripes", "nist8x8", "mnist",
                                                  "fashion_mnist"};
    if (std::find(std::begin(kNames), std::end(kNames), spec.name) == std::end(kNames)) {
        config_error("dataset.name", "unknown dataset '" + spec.name + "'");
    }
    if (spec.name != "bars_and_stripes") spec.class_pair = {"0", "1"};
    if (j.contains("class_pair")) {
        const Json &cp = j.at("class_pair");
        if (!cp.is_array() || cp.size() != 2) config_error("dataset.class_pair", "expected two classes");
        auto as_name = [](const Json &v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
            config_error("dataset.class_pair", "classes must be strings or integers");
        };
        spec.class_pair = {as_name(cp[0]), as_name(cp[1])};
    }
    spec.image_side = get_or<int>(j, "image_side", "dataset",
                                  spec.name == "bars_and_stripes" ? 4
                                  : spec.name == "nist8x8"        ? 8
                                                                  : 28);
    spec.train_fraction = get_or<double>(j, "train_fraction", "dataset", spec.train_fraction);
    spec.seed = get_or<std::uint64_t>(j, "seed", "dataset", 0);
    if (j.contains("subsample_per_class") && !j.at("subsample_per_class").is_null()) {
        spec.subsample_per_class = get_as<std::size_t>(j, "subsample_per_class", "dataset");
    }
    if (j.contains("label_map")) {
        const Json &lm = j.at("label_map");
        if (!lm.is_object()) config_error("dataset.label_map", "expected an object");
        for (const auto &[k, v] : lm.items()) {
            if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
                config_error("dataset.label_map." + k, "must be +1 or -1");
            }
            spec.label_map[k] = v.get<int>();
        }
    }
    if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
        config_error("dataset.train_fraction", "must lie in (0, 1]");
    }
    return spec;
}

Json task_to_json(const TaskFile &file) {
    Json train = Json::array(), test = Json::array();
    for (const auto &s : file.task.train) train.push_back(sample_to_json(s));
    for (const auto &s : file.task.test) test.push_back(sample_to_json(s));
    return Json{{"format", "qattr-samples/1"},
                {"dataset", dataset_spec_to_json(file.spec)},
                {"train", std::move(train)},
                {"test", std::move(test)}};
}

TaskFile task_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"format", "dataset", "train", "test"};
    require_known_fields(j, kFields, "");
    if (get_or<std::string>(j, "format", "", "qattr-samples/1") != "qattr-samples/1") {
        config_error("format", "unsupported sample file format");
    }
    TaskFile f;
    f.spec = dataset_spec_from_json(field(j, "dataset", ""));
    for (const char *part : {"train", "test"}) {
        const Json &arr = field(j, part, "");
        if (!arr.is_array()) config_error(part, "expected an array");
        auto &dst = std::string(part) == "train" ? f.task.train : f.task.test;
        for (const auto &s : arr) dst.push_back(sample_from_json(s));
    }
    return f;
}

Json attribution_to_json(const AttributionMap &map) {
    const auto &c = map.config;
    return Json{{"format", "qattr-attribution/1"},
                {"scores", map.scores},
                {"residual", map.completeness_residual},
                {"output_at_input", map.output_at_input},
                {"output_at_baseline", map.output_at_baseline},
                {"config",
                 {{"baseline", c.baseline},
                  {"path_steps", c.path_steps},
                  {"backend", backend_to_json(c.backend)},
                  {"seed", c.seed},
                  {"space", to_string(c.space)}}}};
}

AttributionMap attribution_from_json(const Json &j) {
    static constexpr std::string_view kFields[] = {"format",          "scores",
                                                   "residual", "output_at_input",
                                                   "output_at_baseline",    "config"};
    require_known_fields(j, kFields, "");
    AttributionMap m;
    m.scores = get_as<std::vector<double>>(j, "scores", "");
    m.completeness_residual = get_as<double>(j, "residual", "");
    m.output_at_input = get_as<double>(j, "output_at_input", "");
    m.output_at_baseline = get_as<double>(j, "output_at_baseline", "");
    const Json &c = field(j, "config", "");
    static constexpr std::string_view kConfig[] = {"baseline", "path_steps", "backend", "seed", "space"};
    require_known_fields(c, kConfig, "config");
    m.config.baseline = get_as<std::vector<double>>(c, "baseline", "config");
    m.config.path_steps = get_as<int>(c, "path_steps", "config");
    m.config.backend = backend_from_json(field(c, "backend", "config"));
    m.config.seed = get_as<std::uint64_t>(c, "seed", "config");
    m.config.space = attribution_space_from_string(get_as<std::string>(c, "space", "config"));
    return m;
}

Json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorKind::Config, path.string() + ": invalid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_json_file(const std::filesystem::path &path, const Json &j) {
    write_text_file(path, j.dump(2) + "\n");
}

Rgb diverging_color(double v) {
    v = std::clamp(std::isfinite(v) ? v : 0.0, -1.0, 1.0);
    const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(v))));
    if (v < 0.0) return {255, fade, fade};
    return {fade, fade, 255};
}

Image render_heatmap(std::span<const double> scores, std::span<const double> raw, int side,
                     int scale) {
    if (side < 1 || scale < 1) throw_invalid("heatmap side and scale must be positive");
    const auto cells = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    std::vector<double> padded(cells, 0.0);
    std::copy_n(scores.begin(), std::min(cells, scores.size()), padded.begin());
    const auto norm = normalize_for_render(padded);

    Image img;
    img.width = (2 * side + 1) * scale;
    img.height = side * scale;
    img.pixels.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height),
                      Rgb{255, 255, 255});
    auto fill = [&](int cell_x, int cell_y, Rgb color) {
        for (int y = cell_y * scale; y < (cell_y + 1) * scale; ++y) {
            for (int x = cell_x * scale; x < (cell_x + 1) * scale; ++x) {
                img.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) +
                           static_cast<std::size_t>(x)] = color;
            }
        }
    };
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const auto i = static_cast<std::size_t>(r * side + c);
            fill(c, r, diverging_color(norm.values[i]));
            const double g = i < raw.size() ? std::clamp(raw[i], 0.0, 1.0) : 0.0;
            const auto level = static_cast<std::uint8_t>(std::lround(255.0 * g));
            fill(side + 1 + c, r, Rgb{level, level, level});
        }
    }
    return img;
}

std::string encode_ppm(const Image &image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n255\n";
    out.reserve(out.size() + image.pixels.size() * 3);
    for (const auto &p : image.pixels) {
        out.push_back(static_cast<char>(p[0]));
        out.push_back(static_cast<char>(p[1]));
        out.push_back(static_cast<char>(p[2]));
    }
    return out;
}

void write_ppm(const std::filesystem::path &path, const Image &image) {
    write_text_file(path, encode_ppm(image));
}

}  // namespace qattr
