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

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qattr/io.hpp"

namespace qattr::cli {

/// Reads one object of a user config while building its fully resolved
/// counterpart. Every accessor fills in defaults and validates the type; any
/// failure is a Config error naming the dotted field path.
class Section {
   public:
    Section(const Json &in, std::string path, std::initializer_list<std::string_view> allowed);

    std::string path_of(std::string_view name) const;
    bool has(std::string_view name) const;
    [[noreturn]] void fail(std::string_view name, const std::string &what) const;

    std::int64_t integer(std::string_view name, std::optional<std::int64_t> fallback,
                         std::int64_t lo, std::int64_t hi);
    std::uint64_t u64(std::string_view name, std::uint64_t fallback);
    double number(std::string_view name, std::optional<double> fallback);
    std::string text(std::string_view name, std::optional<std::string> fallback);
    /// text() restricted to one of `choices`.
    std::string choice(std::string_view name, std::string fallback,
                       std::initializer_list<std::string_view> choices);
    std::optional<std::string> optional_text(std::string_view name);
    std::vector<double> numbers(std::string_view name);
    /// Copies a value through unchanged (already validated by the caller).
    void copy(std::string_view name, const Json &value);

    /// Nested object; absent means empty. Store the result with adopt().
    Section child(std::string_view name, std::initializer_list<std::string_view> allowed) const;
    void adopt(std::string_view name, const Section &child);
    const Json &raw(std::string_view name) const;
    const Json &out() const { return out_; }

   private:
    const Json &in_;
    Json out_ = Json::object();
    std::string path_;
};

}  // namespace qattr::cli
