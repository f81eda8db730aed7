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
#include <span>
#include <string_view>

#include "vecpress/ae.h"
#include "vecpress/quant.h"
#include "vecpress/types.h"

namespace vecpress {

struct SearchParams {
    std::size_t k_max = 100;
};

/// Whether queries go through the same codec as the documents (symmetric)
/// or are scored at full precision against decoded documents (asymmetric).
enum class ScoringMode {
    SYMMETRIC,
    ASYMMETRIC,
};

std::string_view
ScoringModeName(ScoringMode mode);

ScoringMode
ParseScoringMode(std::string_view name);

/// a.b / sqrt(|a|^2 |b|^2); 0 when either vector has zero norm.
double
Cosine(std::span<const float> a, std::span<const float> b);

/// Exact top-min(k_max, docs.count()) documents per query by cosine,
/// descending, ties broken by ascending doc id.
RunRanking
Search(const EmbeddingSet& queries, const EmbeddingSet& docs, const SearchParams& params);

/// Decodes the documents and scores them like Search. AE_LATENT documents
/// require `model`; in symmetric mode queries are reconstructed through it.
RunRanking
SearchCompressed(const EmbeddingSet& queries,
                 const CompressedSet& docs,
                 ScoringMode mode,
                 const SearchParams& params,
                 const AeModel* model = nullptr);

}  // namespace vecpress
