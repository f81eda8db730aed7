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

#include "vecpress/error.h"

namespace vecpress {

std::string_view
ErrorTypeName(ErrorType type) {
    switch (type) {
        case ErrorType::DIM_MISMATCH:
            return "DimMismatch";
        case ErrorType::ID_COUNT_MISMATCH:
            return "IdCountMismatch";
        case ErrorType::CORRUPT_RECORD:
            return "CorruptRecord";
        case ErrorType::NON_FINITE_VALUE:
            return "NonFiniteValue";
        case ErrorType::DUPLICATE_ID:
            return "DuplicateId";
        case ErrorType::INVALID_ID:
            return "InvalidId";
        case ErrorType::IO_FAILURE:
            return "IoFailure";
        case ErrorType::MALFORMED_ROW:
            return "MalformedRow";
        case ErrorType::DUPLICATE_JUDGMENT:
            return "DuplicateJudgment";
        case ErrorType::NEGATIVE_GRADE:
            return "NegativeGrade";
        case ErrorType::RANK_GAP:
            return "RankGap";
        case ErrorType::JSON_PARSE_ERROR:
            return "JsonParseError";
        case ErrorType::EMPTY_SET:
            return "EmptySet";
        case ErrorType::METHOD_MISMATCH:
            return "MethodMismatch";
        case ErrorType::SHAPE_MISMATCH:
            return "ShapeMismatch";
        case ErrorType::NON_FINITE_GRADIENT:
            return "NonFiniteGradient";
        case ErrorType::TOO_FEW_ROWS:
            return "TooFewRows";
        case ErrorType::INVALID_CONFIG:
            return "InvalidConfig";
        case ErrorType::EMPTY_CORPUS:
            return "EmptyCorpus";
        case ErrorType::NO_RELEVANT:
            return "NoRelevant";
        case ErrorType::EMPTY_QRELS:
            return "EmptyQrels";
        case ErrorType::GRID_MISMATCH:
            return "GridMismatch";
    }
    return "Unknown";
}

}  // namespace vecpress
