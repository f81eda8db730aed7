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

#include <filesystem>
#include <string>
#include <string_view>

#include "vecpress/types.h"

namespace vecpress {

// Vectors: per record a little-endian int32 dim followed by dim little-endian
// float32 values. Ids: a sidecar text file with one id per line, same order.

EmbeddingSet
ReadFvecs(const std::filesystem::path& vectors, const std::filesystem::path& ids);

void
WriteFvecs(const EmbeddingSet& set,
           const std::filesystem::path& vectors,
           const std::filesystem::path& ids);

/// Parses the in-memory payloads of a vectors file and its id sidecar.
EmbeddingSet
ParseFvecs(std::string_view vector_bytes, std::string_view id_text);

/// "<stem>.ids" next to a vectors file.
std::filesystem::path
DefaultIdsPath(const std::filesystem::path& vectors);

std::vector<std::string>
ReadIdLines(std::string_view text);

/// One object per line: {"id": "...", "vector": [...]}. Blank lines skipped.
EmbeddingSet
ReadJsonlEmbeddings(const std::filesystem::path& path);

EmbeddingSet
ParseJsonlEmbeddings(std::string_view text);

void
WriteJsonlEmbeddings(const EmbeddingSet& set, const std::filesystem::path& path);

/// BEIR qrels: header "query-id\tcorpus-id\tscore", then one judgment per row.
Qrels
ReadQrelsTsv(const std::filesystem::path& path);

Qrels
ParseQrelsTsv(std::string_view text);

void
WriteQrelsTsv(const Qrels& qrels, const std::filesystem::path& path);

inline constexpr std::string_view kDefaultRunTag = "vecpress";

/// TREC run lines "qid Q0 docid rank score tag"; ranks are 1-based and
/// scores use 6 decimals.
std::string
FormatRun(const RunRanking& run, std::string_view tag = kDefaultRunTag);

void
WriteRun(const RunRanking& run,
         const std::filesystem::path& path,
         std::string_view tag = kDefaultRunTag);

RunRanking
ParseRun(std::string_view text);

RunRanking
ReadRun(const std::filesystem::path& path);

}  // namespace vecpress
