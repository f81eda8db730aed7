// Copyright 2026-present the vecpress project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vecpress {

enum class ErrorType {
    // embedding-io
    DIM_MISMATCH,
    ID_COUNT_MISMATCH,
    CORRUPT_RECORD,
    NON_FINITE_VALUE,
    DUPLICATE_ID,
    INVALID_ID,
    IO_FAILURE,
    MALFORMED_ROW,
    DUPLICATE_JUDGMENT,
    NEGATIVE_GRADE,
    RANK_GAP,
    JSON_PARSE_ERROR,
    // quant
    EMPTY_SET,
    METHOD_MISMATCH,
    // ae
    SHAPE_MISMATCH,
    NON_FINITE_GRADIENT,
    TOO_FEW_ROWS,
    INVALID_CONFIG,
    // retrieval
    EMPTY_CORPUS,
    // metrics
    NO_RELEVANT,
    EMPTY_QRELS,
    GRID_MISMATCH,
};

std::string_view
ErrorTypeName(ErrorType type);

/// Every recoverable failure in the library surfaces as this exception. The
/// CLI maps it to the "data error" exit code.
class VecpressError : public std::runtime_error {
public:
    VecpressError(ErrorType type, const std::string& message)
        : std::runtime_error(message), type_(type) {
    }

    ErrorType
    type() const noexcept {
        return type_;
    }

private:
    ErrorType type_;
};

[[noreturn]] inline void
Fail(ErrorType type, const std::string& message) {
    throw VecpressError(type, message);
}

#define VECPRESS_CHECK(cond, type, msg)                  \
    do {                                                 \
        if (!(cond)) {                                   \
            ::vecpress::Fail(::vecpress::ErrorType::type, \
                             msg);                       \
        }                                                \
    } while (0)

}  // namespace vecpress
