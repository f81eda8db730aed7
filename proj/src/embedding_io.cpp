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

#include "vecpress/embedding_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "vecpress/error.h"
#include "vecpress/util/atomic_file.h"
#include "vecpress/util/bytes.h"

namespace vecpress {

namespace {

constexpr std::string_view kQrelsHeader = "query-id\tcorpus-id\tscore";

bool
IsSpace(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view
StripCr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

template <typename Fn>
void
ForEachLine(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t end = text.find('\n');
        const std::string_view line = StripCr(text.substr(0, end));
        fn(line, ++line_no);
        if (end == std::string_view::npos) {
            break;
        }
        text.remove_prefix(end + 1);
    }
}

std::vector<std::string_view>
SplitOn(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(sep, start);
        fields.push_back(line.substr(start, end - start));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return fields;
}

std::vector<std::string_view>
SplitWhitespace(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && IsSpace(line[i])) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !IsSpace(line[i])) {
            ++i;
        }
        if (i > start) {
            fields.push_back(line.substr(start, i - start));
        }
    }
    return fields;
}

template <typename T>
bool
ParseNumber(std::string_view field, T& value) {
    const char* end = field.data() + field.size();
    const auto result = std::from_chars(field.data(), end, value);
    return result.ec == std::errc() && result.ptr == end;
}

std::string
Where(std::size_t line_no) {
    return "line " + std::to_string(line_no) + ": ";
}

void
AppendFloats(std::string& out, std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(float));
    } else {
        for (float v : values) {
            AppendF32(out, v);
        }
    }
}

}  // namespace

void
EmbeddingSet::Validate() const {
    if (count() > 0) {
        VECPRESS_CHECK(dim > 0, DIM_MISMATCH, "non-empty embedding set with dim 0");
    }
    VECPRESS_CHECK(data.size() == count() * dim,
                   DIM_MISMATCH,
                   "matrix holds " + std::to_string(data.size()) + " values, expected " +
                       std::to_string(count()) + " x " + std::to_string(dim));
    std::unordered_set<std::string_view> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        VECPRESS_CHECK(!id.empty(), INVALID_ID, "empty id");
        VECPRESS_CHECK(std::none_of(id.begin(), id.end(), IsSpace),
                       INVALID_ID,
                       "id contains whitespace: '" + id + "'");
        VECPRESS_CHECK(seen.insert(id).second, DUPLICATE_ID, "duplicate id: " + id);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        VECPRESS_CHECK(std::isfinite(data[i]),
                       NON_FINITE_VALUE,
                       "non-finite value in row " + std::to_string(i / dim) + " (" + ids[i / dim] +
                           ")");
    }
}

std::filesystem::path
DefaultIdsPath(const std::filesystem::path& vectors) {
    auto ids = vectors;
    ids.replace_extension(".ids");
    return ids;
}

std::vector<std::string>
ReadIdLines(std::string_view text) {
    std::vector<std::string> ids;
    ForEachLine(text, [&](std::string_view line, std::size_t) { ids.emplace_back(line); });
    // A trailing newline does not start another id.
    if (!text.empty() && text.back() == '\n' && !ids.empty() && ids.back().empty()) {
        ids.pop_back();
    }
    return ids;
}

EmbeddingSet
ParseFvecs(std::string_view vector_bytes, std::string_view id_text) {
    EmbeddingSet set;
    ByteCursor cursor(vector_bytes);
    std::size_t record = 0;
    while (cursor.remaining() > 0) {
        const char* header = cursor.Take(4);
        VECPRESS_CHECK(header != nullptr,
                       CORRUPT_RECORD,
                       "record " + std::to_string(record) + ": truncated dimension header");
        const auto declared = static_cast<std::int32_t>(LoadU32(header));
        VECPRESS_CHECK(declared > 0,
                       CORRUPT_RECORD,
                       "record " + std::to_string(record) + ": invalid dimension " +
                           std::to_string(declared));
        const auto dim = static_cast<std::size_t>(declared);
        if (record == 0) {
            set.dim = dim;
        }
        VECPRESS_CHECK(dim == set.dim,
                       DIM_MISMATCH,
                       "record " + std::to_string(record) + " has dim " + std::to_string(dim) +
                           ", first record has " + std::to_string(set.dim));
        const char* payload = cursor.Take(dim * sizeof(float));
        VECPRESS_CHECK(payload != nullptr,
                       CORRUPT_RECORD,
                       "record " + std::to_string(record) + ": truncated payload");
        const std::size_t offset = set.data.size();
        set.data.resize(offset + dim);
        for (std::size_t i = 0; i < dim; ++i) {
            set.data[offset + i] = LoadF32(payload + 4 * i);
        }
        ++record;
    }
    set.ids = ReadIdLines(id_text);
    VECPRESS_CHECK(set.ids.size() == record,
                   ID_COUNT_MISMATCH,
                   std::to_string(set.ids.size()) + " ids for " + std::to_string(record) +
                       " vectors");
    set.Validate();
    return set;
}

EmbeddingSet
ReadFvecs(const std::filesystem::path& vectors, const std::filesystem::path& ids) {
    return ParseFvecs(ReadFileBytes(vectors), ReadFileBytes(ids));
}

void
WriteFvecs(const EmbeddingSet& set,
           const std::filesystem::path& vectors,
           const std::filesystem::path& ids) {
    set.Validate();
    std::string bytes;
    bytes.reserve(set.count() * (4 + set.dim * sizeof(float)));
    std::string id_text;
    for (std::size_t i = 0; i < set.count(); ++i) {
        AppendU32(bytes, static_cast<std::uint32_t>(set.dim));
        AppendFloats(bytes, set.row(i));
        id_text += set.ids[i];
        id_text += '\n';
    }
    AtomicFile vector_file(vectors);
    AtomicFile id_file(ids);
    vector_file.Write(bytes);
    id_file.Write(id_text);
    vector_file.Finish();
    id_file.Finish();
    vector_file.Commit();
    id_file.Commit();
}

EmbeddingSet
ParseJsonlEmbeddings(std::string_view text) {
    EmbeddingSet set;
    ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
        if (SplitWhitespace(line).empty()) {
            return;
        }
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            Fail(ErrorType::JSON_PARSE_ERROR, Where(line_no) + e.what());
        }
        VECPRESS_CHECK(object.is_object(), JSON_PARSE_ERROR, Where(line_no) + "expected an object");
        const auto id = object.find("id");
        VECPRESS_CHECK(id != object.end() && id->is_string(),
                       JSON_PARSE_ERROR,
                       Where(line_no) + "missing string field \"id\"");
        const auto vector = object.find("vector");
        VECPRESS_CHECK(vector != object.end() && vector->is_array(),
                       JSON_PARSE_ERROR,
                       Where(line_no) + "missing array field \"vector\"");
        if (set.count() == 0) {
            set.dim = vector->size();
            VECPRESS_CHECK(set.dim > 0, DIM_MISMATCH, Where(line_no) + "empty vector");
        }
        VECPRESS_CHECK(vector->size() == set.dim,
                       DIM_MISMATCH,
                       Where(line_no) + "vector has " + std::to_string(vector->size()) +
                           " components, expected " + std::to_string(set.dim));
        for (const auto& value : *vector) {
            VECPRESS_CHECK(value.is_number(), JSON_PARSE_ERROR, Where(line_no) + "non-numeric component");
            set.data.push_back(static_cast<float>(value.get<double>()));
        }
        set.ids.push_back(id->get<std::string>());
    });
    set.Validate();
    return set;
}

EmbeddingSet
ReadJsonlEmbeddings(const std::filesystem::path& path) {
    return ParseJsonlEmbeddings(ReadFileBytes(path));
}

void
WriteJsonlEmbeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
    set.Validate();
    std::string text;
    for (std::size_t i = 0; i < set.count(); ++i) {
        nlohmann::json vector = nlohmann::json::array();
        for (float v : set.row(i)) {
            vector.push_back(static_cast<double>(v));
        }
        nlohmann::json object;
        object["id"] = set.ids[i];
        object["vector"] = std::move(vector);
        text += object.dump();
        text += '\n';
    }
    WriteFileAtomic(path, text);
}

Qrels
ParseQrelsTsv(std::string_view text) {
    Qrels qrels;
    bool saw_header = false;
    ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
        if (!saw_header) {
            VECPRESS_CHECK(line == kQrelsHeader,
                           MALFORMED_ROW,
                           Where(line_no) + "expected header 'query-id<TAB>corpus-id<TAB>score'");
            saw_header = true;
            return;
        }
        if (line.empty()) {
            return;
        }
        const auto fields = SplitOn(line, '\t');
        VECPRESS_CHECK(fields.size() == 3 && !fields[0].empty() && !fields[1].empty(),
                       MALFORMED_ROW,
                       Where(line_no) + "expected 3 tab-separated fields");
        int grade = 0;
        VECPRESS_CHECK(ParseNumber(fields[2], grade),
                       MALFORMED_ROW,
                       Where(line_no) + "grade is not an integer: '" + std::string(fields[2]) + "'");
        VECPRESS_CHECK(grade >= 0, NEGATIVE_GRADE, Where(line_no) + "negative grade");
        auto& docs = qrels[std::string(fields[0])];
        const bool inserted = docs.emplace(std::string(fields[1]), grade).second;
        VECPRESS_CHECK(inserted,
                       DUPLICATE_JUDGMENT,
                       Where(line_no) + "duplicate judgment for (" + std::string(fields[0]) + ", " +
                           std::string(fields[1]) + ")");
    });
    VECPRESS_CHECK(saw_header, MALFORMED_ROW, "qrels file has no header line");
    return qrels;
}

Qrels
ReadQrelsTsv(const std::filesystem::path& path) {
    return ParseQrelsTsv(ReadFileBytes(path));
}

void
WriteQrelsTsv(const Qrels& qrels, const std::filesystem::path& path) {
    std::string text(kQrelsHeader);
    text += '\n';
    for (const auto& [query, docs] : qrels) {
        for (const auto& [doc, grade] : docs) {
            text += query + '\t' + doc + '\t' + std::to_string(grade) + '\n';
        }
    }
    WriteFileAtomic(path, text);
}

std::string
FormatRun(const RunRanking& run, std::string_view tag) {
    std::string text;
    char score[64];
    for (const auto& [query, docs] : run) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            std::snprintf(score, sizeof(score), "%.6f", docs[i].score);
            text += query;
            text += " Q0 ";
            text += docs[i].doc_id;
            text += ' ';
            text += std::to_string(i + 1);
            text += ' ';
            text += score;
            text += ' ';
            text += tag;
            text += '\n';
        }
    }
    return text;
}

void
WriteRun(const RunRanking& run, const std::filesystem::path& path, std::string_view tag) {
    WriteFileAtomic(path, FormatRun(run, tag));
}

RunRanking
ParseRun(std::string_view text) {
    struct Entry {
        std::size_t rank;
        ScoredDoc doc;
    };
    std::map<std::string, std::vector<Entry>> entries;
    ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
        const auto fields = SplitWhitespace(line);
        if (fields.empty()) {
            return;
        }
        VECPRESS_CHECK(fields.size() == 6,
                       MALFORMED_ROW,
                       Where(line_no) + "expected 'qid Q0 docid rank score tag'");
        std::size_t rank = 0;
        double score = 0.0;
        VECPRESS_CHECK(ParseNumber(fields[3], rank) && rank >= 1,
                       MALFORMED_ROW,
                       Where(line_no) + "invalid rank '" + std::string(fields[3]) + "'");
        VECPRESS_CHECK(ParseNumber(fields[4], score) && std::isfinite(score),
                       MALFORMED_ROW,
                       Where(line_no) + "invalid score '" + std::string(fields[4]) + "'");
        entries[std::string(fields[0])].push_back({rank, {std::string(fields[2]), score}});
    });

    RunRanking run;
    for (auto& [query, list] : entries) {
        std::stable_sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
            return a.rank < b.rank;
        });
        std::set<std::string> seen;
        auto& docs = run[query];
        docs.reserve(list.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            VECPRESS_CHECK(list[i].rank == i + 1,
                           RANK_GAP,
                           "query " + query + ": ranks are not 1.." + std::to_string(list.size()));
            VECPRESS_CHECK(seen.insert(list[i].doc.doc_id).second,
                           MALFORMED_ROW,
                           "query " + query + ": document listed twice: " + list[i].doc.doc_id);
            VECPRESS_CHECK(i == 0 || list[i].doc.score <= list[i - 1].doc.score,
                           MALFORMED_ROW,
                           "query " + query + ": scores increase at rank " + std::to_string(i + 1));
            docs.push_back(std::move(list[i].doc));
        }
    }
    return run;
}

RunRanking
ReadRun(const std::filesystem::path& path) {
    return ParseRun(ReadFileBytes(path));
}

}  // namespace vecpress
