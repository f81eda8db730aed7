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

#include "vecpress/retrieval.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecpress/error.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/util/parallel.h"

namespace vecpress {

namespace {

double
CosineFromParts(double dot, double norm_a, double norm_b) {
    if (norm_a == 0.0 || norm_b == 0.0) {
        return 0.0;
    }
    return dot / std::sqrt(norm_a * norm_b);
}

}  // namespace

std::string_view
ScoringModeName(ScoringMode mode) {
    return mode == ScoringMode::SYMMETRIC ? "symmetric" : "asymmetric";
}

ScoringMode
ParseScoringMode(std::string_view name) {
    if (name == "symmetric") {
        return ScoringMode::SYMMETRIC;
    }
    if (name == "asymmetric") {
        return ScoringMode::ASYMMETRIC;
    }
    Fail(ErrorType::INVALID_CONFIG, "unknown scoring mode '" + std::string(name) + "'");
}

double
Cosine(std::span<const float> a, std::span<const float> b) {
    VECPRESS_CHECK(a.size() == b.size(),
                   DIM_MISMATCH,
                   "cosine of vectors with dims " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()));
    const auto dot = simd::Active().dot;
    return CosineFromParts(dot(a.data(), b.data(), a.size()),
                           dot(a.data(), a.data(), a.size()),
                           dot(b.data(), b.data(), b.size()));
}

RunRanking
Search(const EmbeddingSet& queries, const EmbeddingSet& docs, const SearchParams& params) {
    VECPRESS_CHECK(params.k_max >= 1, INVALID_CONFIG, "k_max must be at least 1");
    VECPRESS_CHECK(docs.count() >= 1, EMPTY_CORPUS, "document set is empty");
    VECPRESS_CHECK(queries.count() == 0 || queries.dim == docs.dim,
                   DIM_MISMATCH,
                   "query dim " + std::to_string(queries.dim) + " != document dim " +
                       std::to_string(docs.dim));
    const auto dot = simd::Active().dot;
    const std::size_t dim = docs.dim;
    const std::size_t n_docs = docs.count();

    std::vector<double> doc_norms(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        doc_norms[d] = dot(docs.row(d).data(), docs.row(d).data(), dim);
    }
    // Position of each document in ascending id order, for tie-breaking.
    std::vector<std::size_t> by_id(n_docs);
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
        return docs.ids[a] < docs.ids[b];
    });
    std::vector<std::size_t> id_rank(n_docs);
    for (std::size_t r = 0; r < n_docs; ++r) {
        id_rank[by_id[r]] = r;
    }

    const std::size_t k = std::min(params.k_max, n_docs);
    std::vector<std::vector<ScoredDoc>> results(queries.count());
    ParallelFor(queries.count(), 8, [&](std::size_t begin, std::size_t end) {
        std::vector<double> scores(n_docs);
        std::vector<std::size_t> order(n_docs);
        for (std::size_t q = begin; q < end; ++q) {
            const float* query = queries.row(q).data();
            const double query_norm = dot(query, query, dim);
            for (std::size_t d = 0; d < n_docs; ++d) {
                scores[d] = CosineFromParts(dot(query, docs.row(d).data(), dim), query_norm, doc_norms[d]);
            }
            std::iota(order.begin(), order.end(), 0);
            std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
                if (scores[a] != scores[b]) {
                    return scores[a] > scores[b];
                }
                return id_rank[a] < id_rank[b];
            });
            auto& ranked = results[q];
            ranked.reserve(k);
            for (std::size_t r = 0; r < k; ++r) {
                ranked.push_back({docs.ids[order[r]], scores[order[r]]});
            }
        }
    });

    RunRanking run;
    for (std::size_t q = 0; q < queries.count(); ++q) {
        run.emplace(queries.ids[q], std::move(results[q]));
    }
    return run;
}

RunRanking
SearchCompressed(const EmbeddingSet& queries,
                 const CompressedSet& docs,
                 ScoringMode mode,
                 const SearchParams& params,
                 const AeModel* model) {
    VECPRESS_CHECK(queries.count() == 0 || queries.dim == docs.dim,
                   DIM_MISMATCH,
                   "query dim " + std::to_string(queries.dim) + " != document dim " +
                       std::to_string(docs.dim));
    if (docs.method == Method::AE_LATENT) {
        VECPRESS_CHECK(model != nullptr, METHOD_MISMATCH, "ae-latent documents need their autoencoder");
        const EmbeddingSet decoded = DecodeCompressed(*model, docs);
        if (mode == ScoringMode::SYMMETRIC) {
            return Search(Reconstruct(*model, queries), decoded, params);
        }
        return Search(queries, decoded, params);
    }
    VECPRESS_CHECK(docs.method == Method::F16 || docs.method == Method::INT8 ||
                       docs.method == Method::BINARY,
                   METHOD_MISMATCH,
                   "cannot search documents stored as " + std::string(MethodName(docs.method)));
    const EmbeddingSet decoded = Decompress(docs);
    if (mode == ScoringMode::SYMMETRIC) {
        const Int8Params* params_ptr = docs.int8 ? &*docs.int8 : nullptr;
        return Search(Decompress(Compress(queries, docs.method, params_ptr)), decoded, params);
    }
    return Search(queries, decoded, params);
}

}  // namespace vecpress
