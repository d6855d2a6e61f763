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

#include <stdexcept>
#include <string>

namespace qattr {

/// Coarse error classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
    InvalidArgument,
    Config,
    Io,
    Numerical,
};

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

/// Raised when the overflow amplitude gets too close to zero for the pixel
/// chain rule to be well defined.
class NearOverflowSingularity : public Error {
   public:
    NearOverflowSingularity(double overflow_amplitude, double alpha = -1.0);

    double overflow_amplitude() const noexcept { return overflow_amplitude_; }
    /// Path position where the singularity was hit, or a negative value when
    /// it was raised outside an integration path.
    double alpha() const noexcept { return alpha_; }

   private:
    double overflow_amplitude_;
    double alpha_;
};

[[noreturn]] void throw_invalid(const std::string &message);

}  // namespace qattr
