/*
 * Copyright (c) 2026 The smrtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace smrtrack {

/// Failure classes. The numeric values are mirrored by the C status codes.
enum class ErrorCode : int {
    InvalidArgument = 1,
    Decode = 2,
    Bounds = 3,
    Dimension = 4,
    Config = 5,
    Io = 6,
    Parse = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

}  // namespace smrtrack
