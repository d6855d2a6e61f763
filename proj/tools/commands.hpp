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

#include <filesystem>
#include <string>

#include "qattr/io.hpp"

namespace qattr::cli {

struct Invocation {
    std::string command;
    Json config = Json::object();  // user config with flag overrides applied
    std::filesystem::path out;
};

int run_generate_data(const Invocation &inv);
int run_train(const Invocation &inv);
int run_evaluate(const Invocation &inv);
int run_attribute(const Invocation &inv);
int run_gradcheck(const Invocation &inv);
int run_null_model(const Invocation &inv);

}  // namespace qattr::cli
