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

#include "qattr/datasets.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "qattr/error.hpp"
#include "qattr/rng.hpp"

namespace qattr {

std::vector<LabeledSample> generate_bars_and_stripes(int side) {
    if (side < 2) throw_invalid("bars and stripes needs side >= 2");
    if (side > 12) throw_invalid("bars and stripes side too large");
    const auto s = static_cast<std::size_t>(side);
    const std::uint32_t full = (1u << side) - 1;
    std::vector<LabeledSample> out;
    std::int64_t id = 0;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        LabeledSample bars{std::vector<double>(s * s, 0.0), 1, "bars", id++};
        for (std::size_t r = 0; r < s; ++r) {
            for (std::size_t c = 0; c < s; ++c) {
                if (mask & (1u << c)) bars.pixels[r * s + c] = 1.0;
            }
        }
        out.push_back(std::move(bars));
    }
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        LabeledSample stripes{std::vector<double>(s * s, 0.0), -1, "stripes", id++};
        for (std::size_t r = 0; r < s; ++r) {
            if (!(mask & (1u << r))) continue;
            for (std::size_t c = 0; c < s; ++c) stripes.pixels[r * s + c] = 1.0;
        }
        out.push_back(std::move(stripes));
    }
    return out;
}

namespace {

class GzReader {
   public:
    explicit GzReader(const std::filesystem::path &path) : path_(path) {
        if (!std::filesystem::exists(path)) {
            throw Error(ErrorKind::Io, "missing input file: " + path.string());
        }
        file_ = gzopen(path.string().c_str(), "rb");
        if (!file_) throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    ~GzReader() {
        if (file_) gzclose(file_);
    }
    GzReader(const GzReader &) = delete;
    GzReader &operator=(const GzReader &) = delete;

    void read(unsigned char *dst, std::size_t n) {
        std::size_t done = 0;
        while (done < n) {
            const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
            const int got = gzread(file_, dst + done, chunk);
            if (got <= 0) throw Error(ErrorKind::Io, "truncated IDX file: " + path_.string());
            done += static_cast<std::size_t>(got);
        }
    }

    std::uint32_t read_u32_be() {
        unsigned char b[4];
        read(b, 4);
        return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
               (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
    }

   private:
    std::filesystem::path path_;
    gzFile file_ = nullptr;
};

}  // namespace

IdxImages load_idx(const std::filesystem::path &images_path,
                   const std::filesystem::path &labels_path) {
    GzReader images(images_path);
    GzReader labels(labels_path);
    const std::uint32_t img_magic = images.read_u32_be();
    if (img_magic != kIdxImagesMagic) {
        throw Error(ErrorKind::Io, "bad IDX image magic " + std::to_string(img_magic) + " in " +
                                       images_path.string());
    }
    const std::uint32_t lbl_magic = labels.read_u32_be();
    if (lbl_magic != kIdxLabelsMagic) {
        throw Error(ErrorKind::Io, "bad IDX label magic " + std::to_string(lbl_magic) + " in " +
                                       labels_path.string());
    }
    const std::uint32_t count = images.read_u32_be();
    IdxImages out;
    out.rows = images.read_u32_be();
    out.cols = images.read_u32_be();
    const std::uint32_t label_count = labels.read_u32_be();
    if (count != label_count) {
        throw Error(ErrorKind::Io, "image count " + std::to_string(count) +
                                       " does not match label count " +
                                       std::to_string(label_count));
    }
    const std::size_t pixels = std::size_t{out.rows} * out.cols;
    std::vector<unsigned char> label_bytes(count);
    labels.read(label_bytes.data(), label_bytes.size());
    std::vector<unsigned char> buffer(pixels);
    out.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        images.read(buffer.data(), buffer.size());
        LabeledSample s;
        s.pixels.resize(pixels);
        for (std::size_t p = 0; p < pixels; ++p) s.pixels[p] = buffer[p] / 255.0;
        s.source_class = std::to_string(label_bytes[i]);
        s.id = i;
        out.samples.push_back(std::move(s));
    }
    return out;
}

std::vector<LabeledSample> load_idx_images(const std::filesystem::path &images_path,
                                           const std::filesystem::path &labels_path) {
    return load_idx(images_path, labels_path).samples;
}

std::vector<double> downscale_to_8x8(std::span<const double> pixels) {
    constexpr std::size_t kIn = 28, kOut = 8;
    if (pixels.size() != kIn * kIn) {
        throw_invalid("downscale_to_8x8 expects 784 pixels, got " + std::to_string(pixels.size()));
    }
    constexpr double bin = static_cast<double>(kIn) / kOut;  // 3.5
    // overlap[b][p]: length of pixel p's extent inside bin b.
    std::array<std::array<double, kIn>, kOut> overlap{};
    for (std::size_t b = 0; b < kOut; ++b) {
        const double lo = bin * static_cast<double>(b), hi = lo + bin;
        for (std::size_t p = 0; p < kIn; ++p) {
            const double pl = static_cast<double>(p), ph = pl + 1.0;
            overlap[b][p] = std::max(0.0, std::min(hi, ph) - std::max(lo, pl));
        }
    }
    std::vector<double> out(kOut * kOut, 0.0);
    for (std::size_t br = 0; br < kOut; ++br) {
        for (std::size_t bc = 0; bc < kOut; ++bc) {
            double acc = 0.0;
            for (std::size_t r = 0; r < kIn; ++r) {
                if (overlap[br][r] == 0.0) continue;
                for (std::size_t c = 0; c < kIn; ++c) {
                    acc += overlap[br][r] * overlap[bc][c] * pixels[r * kIn + c];
                }
            }
            out[br * kOut + bc] = acc / (bin * bin);
        }
    }
    const double peak = *std::max_element(out.begin(), out.end());
    if (peak > 0.0) {
        for (auto &v : out) v = std::min(1.0, v / peak);
    }
    return out;
}

std::string canonical_class(const std::string &dataset, const std::string &name) {
    if (dataset != "fashion_mnist") return name;
    static const std::map<std::string, std::string> names = {
        {"T-shirt", "0"}, {"Tshirt", "0"}, {"Top", "0"},     {"Trouser", "1"},
        {"Trousers", "1"}, {"Pullover", "2"}, {"Dress", "3"}, {"Coat", "4"},
        {"Sandal", "5"},  {"Shirt", "6"},   {"Sneaker", "7"}, {"Bag", "8"},
        {"Boot", "9"},    {"Ankle boot", "9"}};
    const auto it = names.find(name);
    return it == names.end() ? name : it->second;
}

std::map<std::string, int> DatasetSpec::resolved_label_map() const {
    if (!label_map.empty()) return label_map;
    return {{class_pair.first, 1}, {class_pair.second, -1}};
}

void deterministic_shuffle(std::vector<std::size_t> &items, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(items[i - 1], items[j]);
    }
}

Task make_task(const DatasetSpec &spec, std::span<const LabeledSample> raw) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
        throw Error(ErrorKind::Config, "train_fraction must lie in (0, 1]");
    }
    const auto labels = spec.resolved_label_map();
    const std::string a = spec.class_pair.first, b = spec.class_pair.second;
    const std::string ca = canonical_class(spec.name, a), cb = canonical_class(spec.name, b);
    if (ca == cb) throw Error(ErrorKind::Config, "class pair names the same class twice");
    for (const auto &cls : {a, b}) {
        const auto it = labels.find(cls);
        if (it == labels.end() || (it->second != 1 && it->second != -1)) {
            throw Error(ErrorKind::Config, "label_map must map '" + cls + "' to +1 or -1");
        }
    }
    if (labels.at(a) == labels.at(b)) throw Error(ErrorKind::Config, "both classes share a label");

    Task task;
    std::uint64_t salt = 0;
    for (const auto &[name, canon] : {std::pair{a, ca}, std::pair{b, cb}}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i].source_class == canon || raw[i].source_class == name) members.push_back(i);
        }
        if (members.empty()) throw Error(ErrorKind::Config, "class '" + name + "' has no samples");
        deterministic_shuffle(members, derive_seed(spec.seed, {salt++}));
        if (spec.subsample_per_class && members.size() > *spec.subsample_per_class) {
            members.resize(*spec.subsample_per_class);
        }
        const auto n_train = static_cast<std::size_t>(
            std::floor(spec.train_fraction * static_cast<double>(members.size())));
        for (std::size_t j = 0; j < members.size(); ++j) {
            LabeledSample s = raw[members[j]];
            s.label = labels.at(name);
            s.source_class = name;
            (j < n_train ? task.train : task.test).push_back(std::move(s));
        }
    }
    auto by_id = [](const LabeledSample &l, const LabeledSample &r) { return l.id < r.id; };
    std::sort(task.train.begin(), task.train.end(), by_id);
    std::sort(task.test.begin(), task.test.end(), by_id);
    return task;
}

std::vector<double> row_column_means(std::span<const double> pixels, int side) {
    const auto s = static_cast<std::size_t>(side);
    if (side < 1 || pixels.size() != s * s) throw_invalid("image is not side x side");
    std::vector<double> out(2 * s, 0.0);
    for (std::size_t r = 0; r < s; ++r) {
        for (std::size_t c = 0; c < s; ++c) {
            out[r] += pixels[r * s + c] / static_cast<double>(s);
            out[s + c] += pixels[r * s + c] / static_cast<double>(s);
        }
    }
    return out;
}

}  // namespace qattr
