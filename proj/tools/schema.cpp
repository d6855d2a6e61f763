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

#include "schema.hpp"

#include <cmath>

#include "qattr/error.hpp"

namespace qattr::cli {

namespace {

const Json &empty_object() {
    static const Json kEmpty = Json::object();
    return kEmpty;
}

}  // namespace

Section::Section(const Json &in, std::string path, std::initializer_list<std::string_view> allowed)
    : in_(in.is_null() ? empty_object() : in), path_(std::move(path)) {
    if (!in_.is_object()) {
        throw Error(ErrorKind::Config,
                    "field '" + (path_.empty() ? std::string("<root>") : path_) + "': expected an object");
    }
    require_known_fields(in_, std::vector<std::string_view>(allowed), path_);
}

std::string Section::path_of(std::string_view name) const {
    return path_.empty() ? std::string(name) : path_ + "." + std::string(name);
}

bool Section::has(std::string_view name) const {
    const auto it = in_.find(std::string(name));
    return it != in_.end() && !it->is_null();
}

void Section::fail(std::string_view name, const std::string &what) const {
    throw Error(ErrorKind::Config, "field '" + path_of(name) + "': " + what);
}

const Json &Section::raw(std::string_view name) const {
    if (!has(name)) fail(name, "missing");
    return in_.at(std::string(name));
}

std::int64_t Section::integer(std::string_view name, std::optional<std::int64_t> fallback,
                              std::int64_t lo, std::int64_t hi) {
    std::int64_t v;
    if (!has(name)) {
        if (!fallback) fail(name, "missing");
        v = *fallback;
    } else {
        const Json &j = raw(name);
        if (!j.is_number_integer()) fail(name, "expected an integer");
        v = j.get<std::int64_t>();
    }
    if (v < lo || v > hi) {
        fail(name, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    out_[std::string(name)] = v;
    return v;
}

std::uint64_t Section::u64(std::string_view name, std::uint64_t fallback) {
    std::uint64_t v = fallback;
    if (has(name)) {
        const Json &j = raw(name);
        if (!j.is_number_unsigned()) fail(name, "expected a non-negative integer");
        v = j.get<std::uint64_t>();
    }
    out_[std::string(name)] = v;
    return v;
}

double Section::number(std::string_view name, std::optional<double> fallback) {
    double v;
    if (!has(name)) {
        if (!fallback) fail(name, "missing");
        v = *fallback;
    } else {
        const Json &j = raw(name);
        if (!j.is_number()) fail(name, "expected a number");
        v = j.get<double>();
    }
    if (!std::isfinite(v)) fail(name, "must be finite");
    out_[std::string(name)] = v;
    return v;
}

std::string Section::text(std::string_view name, std::optional<std::string> fallback) {
    std::string v;
    if (!has(name)) {
        if (!fallback) fail(name, "missing");
        v = *fallback;
    } else {
        const Json &j = raw(name);
        if (!j.is_string()) fail(name, "expected a string");
        v = j.get<std::string>();
    }
    out_[std::string(name)] = v;
    return v;
}

std::string Section::choice(std::string_view name, std::string fallback,
                            std::initializer_list<std::string_view> choices) {
    const std::string v = text(name, std::move(fallback));
    for (auto c : choices) {
        if (v == c) return v;
    }
    std::string list;
    for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
    fail(name, "'" + v + "' is not one of " + list);
}

std::optional<std::string> Section::optional_text(std::string_view name) {
    if (!has(name)) {
        out_[std::string(name)] = nullptr;
        return std::nullopt;
    }
    return text(name, std::nullopt);
}

std::vector<double> Section::numbers(std::string_view name) {
    const Json &j = raw(name);
    if (!j.is_array()) fail(name, "expected an array of numbers");
    std::vector<double> v;
    for (const auto &e : j) {
        if (!e.is_number()) fail(name, "expected an array of numbers");
        v.push_back(e.get<double>());
    }
    out_[std::string(name)] = v;
    return v;
}

void Section::copy(std::string_view name, const Json &value) { out_[std::string(name)] = value; }

Section Section::child(std::string_view name,
                       std::initializer_list<std::string_view> allowed) const {
    const Json &in = has(name) ? in_.at(std::string(name)) : empty_object();
    return Section(in, path_of(name), allowed);
}

void Section::adopt(std::string_view name, const Section &child) {
    out_[std::string(name)] = child.out_;
}

}  // namespace qattr::cli
