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

#include <cmath>

#include "catch_amalgamated.hpp"
#include "test_util.h"
#include "vecpress/error.h"
#include "vecpress/retrieval.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/util/parallel.h"

using namespace vecpress;
using Catch::Matchers::WithinAbs;

namespace {

ErrorType
ErrorOf(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const VecpressError& e) {
        return e.type();
    }
    FAIL("expected a VecpressError");
    return ErrorType::IO_FAILURE;
}

std::vector<std::string>
Order(const std::vector<ScoredDoc>& docs) {
    std::vector<std::string> ids;
    for (const auto& d : docs) {
        ids.push_back(d.doc_id);
    }
    return ids;
}

EmbeddingSet
ThreeDocs() {
    const float r = static_cast<float>(1.0 / std::sqrt(2.0));
    return test::MakeSet({"d1", "d2", "d3"}, 2, {1, 0, 0, 1, r, r});
}

}  // namespace

TEST_CASE("cosine", "[retrieval]") {
    const std::vector<float> a{1, 1}, b{1, 0}, c{0, 1}, z{0, 0};
    REQUIRE(Cosine(a, a) == 1.0);
    REQUIRE(Cosine(b, c) == 0.0);
    REQUIRE_THAT(Cosine(a, b), WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    REQUIRE(Cosine(a, z) == 0.0);
    const std::vector<float> three{1, 2, 3};
    REQUIRE(ErrorOf([&] { Cosine(a, three); }) == ErrorType::DIM_MISMATCH);
    Rng rng(60);
    for (int i = 0; i < 200; ++i) {
        const auto x = test::RandomSet(rng, 1, 1 + rng.Below(40));
        REQUIRE(Cosine(x.row(0), x.row(0)) == 1.0);
    }
}

TEST_CASE("exact search", "[retrieval]") {
    const SearchParams params{10};
    SECTION("hand-computed ranking") {
        const auto run = Search(test::MakeSet({"q"}, 2, {1, 0}), ThreeDocs(), params);
        const auto& ranked = run.at("q");
        REQUIRE(Order(ranked) == std::vector<std::string>{"d1", "d3", "d2"});
        REQUIRE(ranked[0].score == 1.0);
        REQUIRE_THAT(ranked[1].score, WithinAbs(0.70711, 1e-5));
        REQUIRE(ranked[2].score == 0.0);
    }
    SECTION("self match ranks first") {
        const auto docs = test::MakeSet({"d1", "d2", "d3"}, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
        const auto run = Search(test::MakeSet({"q"}, 3, {0, 1, 0}), docs, params);
        REQUIRE(run.at("q")[0].doc_id == "d2");
        REQUIRE(run.at("q")[0].score == 1.0);
    }
    SECTION("ties break by ascending id") {
        const auto docs = test::MakeSet({"b", "a", "c"}, 2, {1, 1, 1, 1, 1, 1});
        const auto run = Search(test::MakeSet({"q"}, 2, {1, 0}), docs, params);
        REQUIRE(Order(run.at("q")) == std::vector<std::string>{"a", "b", "c"});
    }
    SECTION("depth is min(k, docs)") {
        Rng rng(61);
        const auto docs = test::RandomSet(rng, 30, 5, "d");
        const auto queries = test::RandomSet(rng, 4, 5, "q");
        REQUIRE(Search(queries, docs, SearchParams{7}).at("q0").size() == 7);
        REQUIRE(Search(queries, docs, SearchParams{100}).at("q0").size() == 30);
    }
    SECTION("errors") {
        REQUIRE(ErrorOf([&] { Search(test::MakeSet({"q"}, 2, {1, 0}), EmbeddingSet{}, params); }) ==
                ErrorType::EMPTY_CORPUS);
        REQUIRE(ErrorOf([&] { Search(test::MakeSet({"q"}, 3, {1, 0, 0}), ThreeDocs(), params); }) ==
                ErrorType::DIM_MISMATCH);
        REQUIRE(ErrorOf([&] { Search(test::MakeSet({"q"}, 2, {1, 0}), ThreeDocs(), SearchParams{0}); }) ==
                ErrorType::INVALID_CONFIG);
    }
}

TEST_CASE("search matches a brute-force ranking", "[retrieval][property]") {
    Rng rng(62);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 1 + rng.Below(20);
        const auto docs = test::RandomSet(rng, 1 + rng.Below(80), dim, "d");
        const auto queries = test::RandomSet(rng, 5, dim, "q");
        const auto run = Search(queries, docs, SearchParams{1000});
        for (std::size_t q = 0; q < queries.count(); ++q) {
            std::vector<ScoredDoc> expected;
            for (std::size_t d = 0; d < docs.count(); ++d) {
                expected.push_back({docs.ids[d], Cosine(queries.row(q), docs.row(d))});
            }
            std::sort(expected.begin(), expected.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
                return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
            });
            REQUIRE(run.at(queries.ids[q]) == expected);
        }
    }
}

TEST_CASE("search is independent of threads and kernels", "[retrieval][simd]") {
    Rng rng(63);
    const auto docs = test::RandomSet(rng, 500, 33, "d");
    const auto queries = test::RandomSet(rng, 40, 33, "q");
    const auto reference = Search(queries, docs, SearchParams{50});
    SetMaxThreads(1);
    REQUIRE(Search(queries, docs, SearchParams{50}) == reference);
    SetMaxThreads(0);
    const auto& original = simd::Active();
    simd::SetActive(simd::ScalarKernels());
    const auto scalar = Search(queries, docs, SearchParams{50});
    simd::SetActive(original);
    REQUIRE(scalar == reference);
}

TEST_CASE("compressed search", "[retrieval][compressed]") {
    const SearchParams params{10};
    SECTION("f16 on an orthonormal corpus keeps the ranking") {
        const auto docs = test::MakeSet({"a", "b"}, 2, {1, 0, 0, 1});
        const auto queries = test::MakeSet({"q"}, 2, {0.2f, 0.9f});
        for (ScoringMode mode : {ScoringMode::SYMMETRIC, ScoringMode::ASYMMETRIC}) {
            REQUIRE(Order(SearchCompressed(queries, Compress(docs, Method::F16), mode, params).at("q")) ==
                    Order(Search(queries, docs, params).at("q")));
        }
    }
    SECTION("binary keeps sign structure") {
        const auto docs = test::MakeSet({"neg", "pos"}, 4, {-1, -2, -3, -4, 1, 2, 3, 4});
        const auto queries = test::MakeSet({"q"}, 4, {0.5f, 0.1f, 2, 3});
        const auto run = SearchCompressed(queries, Compress(docs, Method::BINARY), ScoringMode::SYMMETRIC, params);
        REQUIRE(run.at("q")[0].doc_id == "pos");
        REQUIRE(run.at("q")[0].score == 1.0);
    }
    SECTION("binary hamming distance 2 of 4 gives cosine 0") {
        const auto docs = test::MakeSet({"d"}, 4, {1, 1, -1, -1});
        const auto queries = test::MakeSet({"q"}, 4, {1, -1, 1, -1});
        const auto run = SearchCompressed(queries, Compress(docs, Method::BINARY), ScoringMode::SYMMETRIC, params);
        REQUIRE(run.at("q")[0].score == 0.0);
    }
    SECTION("int8 symmetric keeps the hand-computed ranking") {
        const auto docs = ThreeDocs();
        const auto queries = test::MakeSet({"q"}, 2, {1, 0});
        const auto compressed = Compress(docs, Method::INT8, nullptr);
        for (ScoringMode mode : {ScoringMode::SYMMETRIC, ScoringMode::ASYMMETRIC}) {
            REQUIRE(Order(SearchCompressed(queries, compressed, mode, params).at("q")) ==
                    std::vector<std::string>{"d1", "d3", "d2"});
        }
    }
    SECTION("asymmetric scores raw queries against decoded docs") {
        Rng rng(64);
        const auto docs = test::RandomSet(rng, 50, 8, "d");
        const auto queries = test::RandomSet(rng, 3, 8, "q");
        const auto compressed = Compress(docs, Method::INT8);
        REQUIRE(SearchCompressed(queries, compressed, ScoringMode::ASYMMETRIC, params) ==
                Search(queries, Decompress(compressed), params));
        REQUIRE(SearchCompressed(queries, compressed, ScoringMode::SYMMETRIC, params) ==
                Search(Decompress(Compress(queries, Method::INT8, &*compressed.int8)), Decompress(compressed), params));
    }
    SECTION("ae latents need their model") {
        Rng rng(65);
        const auto docs = test::RandomSet(rng, 20, 6, "d");
        const auto queries = test::RandomSet(rng, 2, 6, "q");
        const AeModel model = InitAeNet<float>(6, 12, 3, 66);
        const auto latent = EncodeCompressed(model, docs);
        REQUIRE(ErrorOf([&] { SearchCompressed(queries, latent, ScoringMode::SYMMETRIC, params); }) ==
                ErrorType::METHOD_MISMATCH);
        REQUIRE(SearchCompressed(queries, latent, ScoringMode::SYMMETRIC, params, &model) ==
                Search(Reconstruct(model, queries), Reconstruct(model, docs), params));
        REQUIRE(SearchCompressed(queries, latent, ScoringMode::ASYMMETRIC, params, &model) ==
                Search(queries, Reconstruct(model, docs), params));
    }
    SECTION("dimension mismatch") {
        const auto docs = Compress(ThreeDocs(), Method::F16);
        REQUIRE(ErrorOf([&] {
                    SearchCompressed(test::MakeSet({"q"}, 3, {1, 0, 0}), docs, ScoringMode::SYMMETRIC, params);
                }) == ErrorType::DIM_MISMATCH);
    }
    REQUIRE(ParseScoringMode("asymmetric") == ScoringMode::ASYMMETRIC);
    REQUIRE(ErrorOf([] { ParseScoringMode("both"); }) == ErrorType::INVALID_CONFIG);
}
