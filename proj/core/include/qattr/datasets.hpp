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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qattr {

struct LabeledSample {
    std::vector<double> pixels;  // row-major, each in [0, 1]
    int label = 0;               // -1 / +1 once assigned to a task; 0 before
    std::string source_class;
    std::int64_t id = 0;
};

/// Every non-empty, non-full column subset lit gives a "bars" image (+1);
/// the same for rows gives "stripes" (-1). 2 (2^side - 2) samples.
std::vector<LabeledSample> generate_bars_and_stripes(int side);

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;  // 2049

struct IdxImages {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<LabeledSample> samples;
};

/// Reads an IDX image/label pair (plain or gzip-compressed). Pixels are
/// scaled by 1/255; `source_class` holds the decimal label and `label` is 0.
IdxImages load_idx(const std::filesystem::path &images_path,
                   const std::filesystem::path &labels_path);
std::vector<LabeledSample> load_idx_images(const std::filesystem::path &images_path,
                                           const std::filesystem::path &labels_path);

/// Area-weighted 28x28 -> 8x8 pooling, rescaled so the maximum is 1 (an
/// all-zero image stays zero).
std::vector<double> downscale_to_8x8(std::span<const double> pixels);

/// FashionMNIST class names ("Dress", "Boot", ...) to their numeric label;
/// numeric strings pass through.
std::string canonical_class(const std::string &dataset, const std::string &name);

struct DatasetSpec {
    std::string name = "bars_and_stripes";  // bars_and_stripes | nist8x8 | mnist | fashion_mnist
    std::pair<std::string, std::string> class_pair{"bars", "stripes"};
    int image_side = 4;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::optional<std::size_t> subsample_per_class;
    /// class name -> +1/-1. Empty: first class of the pair +1, second -1.
    std::map<std::string, int> label_map;

    std::map<std::string, int> resolved_label_map() const;
};

struct Task {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
};

/// Filters to the class pair, assigns labels, optionally caps each class,
/// then splits each class deterministically (floor(n * train_fraction) to
/// train).
Task make_task(const DatasetSpec &spec, std::span<const LabeledSample> raw);

/// Row means followed by column means: the 2*side angle features for
/// square images.
std::vector<double> row_column_means(std::span<const double> pixels, int side);

/// Fisher-Yates shuffle driven by the library RNG; portable across standard
/// libraries.
void deterministic_shuffle(std::vector<std::size_t> &items, std::uint64_t seed);

}  // namespace qattr
