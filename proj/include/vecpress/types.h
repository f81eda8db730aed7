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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vecpress {

/// Ordered (id, vector) rows. Row i of `data` belongs to ids[i].
struct EmbeddingSet {
    std::vector<std::string> ids;
    std::vector<float> data;  // row-major, count x dim
    std::size_t dim = 0;

    std::size_t
    count() const {
        return ids.size();
    }

    std::span<const float>
    row(std::size_t i) const {
        return {data.data() + i * dim, dim};
    }

    std::span<float>
    row(std::size_t i) {
        return {data.data() + i * dim, dim};
    }

    /// Throws on duplicate or malformed ids, shape mismatches and
    /// non-finite components.
    void
    Validate() const;

    bool
    operator==(const EmbeddingSet&) const = default;
};

/// query-id -> doc-id -> relevance grade (>= 0).
using Qrels = std::map<std::string, std::map<std::string, int>>;

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    bool
    operator==(const ScoredDoc&) const = default;
};

/// query-id -> documents in rank order (descending score, ascending doc-id
/// among equal scores).
using RunRanking = std::map<std::string, std::vector<ScoredDoc>>;

}  // namespace vecpress
