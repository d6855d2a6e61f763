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

// File helpers shared by the unit tests, the CLI tests and the acceptance
// suite.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace support {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
   public:
    explicit TempDir(const std::string &name) : path_(fs::temp_directory_path() / ("qattr_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    const fs::path &path() const { return path_; }

   private:
    fs::path path_;
};

inline void put_u32(std::string &out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

inline void write_bytes(const fs::path &p, const std::string &bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_bytes(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

/// Writes an uncompressed IDX pair (the loader reads plain and gzip files).
inline void write_idx(const fs::path &images, const fs::path &labels, std::uint32_t rows, std::uint32_t cols,
                      const std::vector<std::vector<std::uint8_t>> &pixels, const std::vector<std::uint8_t> &classes) {
    std::string img, lab;
    put_u32(img, 0x00000803);
    put_u32(img, static_cast<std::uint32_t>(pixels.size()));
    put_u32(img, rows);
    put_u32(img, cols);
    for (const auto &p : pixels) img.append(p.begin(), p.end());
    put_u32(lab, 0x00000801);
    put_u32(lab, static_cast<std::uint32_t>(classes.size()));
    lab.append(classes.begin(), classes.end());
    write_bytes(images, img);
    write_bytes(labels, lab);
}

/// Synthetic stand-in for Fashion-MNIST: ten 28x28 classes, each a filled
/// box of class-specific size and position with per-image jitter and noise.
/// Only the file format and pipeline matter to its callers.
inline void write_synthetic_fashion(const fs::path &images, const fs::path &labels, int per_class,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> jitter(-1, 1);
    std::uniform_int_distribution<int> noise(0, 40);
    std::vector<std::vector<std::uint8_t>> pixels;
    std::vector<std::uint8_t> classes;
    for (int i = 0; i < per_class; ++i) {
        for (int c = 0; c < 10; ++c) {
            const int w = 6 + 2 * (c % 5) + jitter(rng);
            const int h = 8 + 3 * (c / 5) + 2 * (c % 3) + jitter(rng);
            const int top = 14 - h / 2 + jitter(rng), left = 14 - w / 2 + jitter(rng);
            std::vector<std::uint8_t> img(28 * 28);
            for (int r = 0; r < 28; ++r) {
                for (int col = 0; col < 28; ++col) {
                    const bool inside = r >= top && r < top + h && col >= left && col < left + w;
                    img[static_cast<std::size_t>(r * 28 + col)] =
                        static_cast<std::uint8_t>(inside ? 255 - noise(rng) : noise(rng) / 4);
                }
            }
            pixels.push_back(std::move(img));
            classes.push_back(static_cast<std::uint8_t>(c));
        }
    }
    write_idx(images, labels, 28, 28, pixels, classes);
}

}  // namespace support
