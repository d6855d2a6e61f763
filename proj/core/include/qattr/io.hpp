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

// JSON forms of models, task files and attribution maps, plus the P6 heatmap
// writer. Readers throw Error(ErrorKind::Config) naming the offending field.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "qattr/attribution.hpp"
#include "qattr/datasets.hpp"
#include "qattr/model.hpp"

namespace qattr {

using Json = nlohmann::ordered_json;

Json model_to_json(const QuantumModel &model);
QuantumModel model_from_json(const Json &j);

Json encoding_to_json(const EncodingMode &mode);
EncodingMode encoding_from_json(const Json &j);

Json backend_to_json(const GradientBackend &backend);
GradientBackend backend_from_json(const Json &j);

Json sample_to_json(const LabeledSample &s);
LabeledSample sample_from_json(const Json &j);

struct TaskFile {
    DatasetSpec spec;
    Task task;
};

Json dataset_spec_to_json(const DatasetSpec &spec);
DatasetSpec dataset_spec_from_json(const Json &j);

Json task_to_json(const TaskFile &file);
TaskFile task_from_json(const Json &j);

Json attribution_to_json(const AttributionMap &map);
AttributionMap attribution_from_json(const Json &j);

/// Fails with ErrorKind::Io.
Json read_json_file(const std::filesystem::path &path);
/// Two-space indent plus a trailing newline; creates parent directories.
void write_json_file(const std::filesystem::path &path, const Json &j);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// Rejects keys outside `allowed`; `context` prefixes the field name.
void require_known_fields(const Json &j, std::span<const std::string_view> allowed,
                          const std::string &context);

using Rgb = std::array<std::uint8_t, 3>;

/// -1 -> red, 0 -> white, +1 -> blue, linear in between (clamped).
Rgb diverging_color(double normalized_score);

struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;  // row-major
};

/// Heatmap of `scores` (normalized by max |score|) with the raw sample in
/// grayscale to its right, each cell `scale` pixels wide and a 1-cell gap.
Image render_heatmap(std::span<const double> scores, std::span<const double> raw, int side,
                     int scale = 16);
std::string encode_ppm(const Image &image);
void write_ppm(const std::filesystem::path &path, const Image &image);

}  // namespace qattr
