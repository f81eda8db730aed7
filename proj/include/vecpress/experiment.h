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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecpress/ae.h"
#include "vecpress/metrics.h"
#include "vecpress/retrieval.h"
#include "vecpress/types.h"

namespace vecpress {

enum class ArmMethod {
    BASELINE,
    F16,
    INT8,
    BINARY,
    AE,
};

std::string_view
ArmMethodName(ArmMethod method);

ArmMethod
ParseArmMethod(std::string_view name);

/// An embedding file plus its id sidecar. Empty `ids` means the default
/// sidecar next to `vectors`; `.jsonl` vectors carry their own ids.
struct EmbeddingSource {
    std::string vectors;
    std::string ids;

    bool
    operator==(const EmbeddingSource&) const = default;
};

struct ArmConfig {
    std::string name;
    ArmMethod method = ArmMethod::BASELINE;
    AeConfig ae;  // AE arms only; input_dim is taken from the corpus
    bool ae_seed_set = false;
};

struct ExperimentConfig {
    EmbeddingSource corpus;
    EmbeddingSource queries;
    std::optional<EmbeddingSource> ae_train;  // defaults to the corpus
    std::string qrels;
    std::vector<ArmConfig> arms;
    std::vector<std::size_t> k_grid = kDefaultKGrid;
    std::size_t k_max = 0;  // 0: the largest k in k_grid
    ScoringMode mode = ScoringMode::SYMMETRIC;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::filesystem::path base_dir;  // relative paths resolve here; not hashed

    /// Throws INVALID_CONFIG unless there is exactly one baseline arm, names
    /// are unique path-safe tokens, the k grid is positive and every AE arm
    /// has a seed.
    void
    Validate() const;

    std::size_t
    search_depth() const;

    std::filesystem::path
    Resolve(const std::string& path) const;

    /// Seed of an AE arm: its own, else the experiment seed.
    std::uint64_t
    ArmSeed(const ArmConfig& arm) const;

    /// Every field with defaults filled in, keys in a fixed order.
    std::string
    CanonicalJson() const;

    std::string
    Hash() const;
};

ExperimentConfig
ParseExperimentConfig(std::string_view text, const std::filesystem::path& base_dir);

ExperimentConfig
LoadExperimentConfig(const std::filesystem::path& path);

EmbeddingSet
LoadEmbeddings(const std::filesystem::path& vectors, const std::filesystem::path& ids = {});

struct TableRow {
    std::string method;
    ArmMethod arm_method = ArmMethod::BASELINE;
    std::size_t dimensions = 0;
    std::string precision;
    std::size_t bytes_per_vector = 0;
    double compression = 1.0;  // baseline bytes / method bytes
    double loss = 0.0;  // baseline - method nDCG at loss_k
    DeltaReport deltas;
};

struct ComparisonTable {
    std::size_t loss_k = 10;
    std::vector<TableRow> rows;
};

struct ArmResult {
    ArmConfig arm;
    std::size_t dimensions = 0;
    std::size_t bytes_per_vector = 0;
    RunRanking run;
    MetricReport report;
    std::optional<DeltaReport> delta;
    std::optional<TrainingLog> training;
    bool model_reused = false;
};

struct ExperimentResult {
    std::vector<ArmResult> arms;  // config order
    ComparisonTable table;
    std::string config_hash;
};

ComparisonTable
BuildTable(const std::vector<ArmResult>& arms, std::size_t baseline_bytes);

/// "4x", "1.5x": ratio rounded to one decimal.
std::string
FormatCompression(double ratio);

/// Markdown, columns padded to a common width.
std::string
RenderTable(const ComparisonTable& table);

std::string
TableToJson(const ComparisonTable& table);

ComparisonTable
TableFromJson(std::string_view text);

/// One long-format CSV (method,k,value,delta) per metric, rows ordered by k
/// then arm order. The baseline contributes zero-delta rows.
std::map<Metric, std::string>
EmitPlotData(const std::vector<MetricReport>& reports, const std::vector<DeltaReport>& deltas);

/// Executes every arm (baseline first) and writes all artifacts under the
/// output directory. On an arm failure a partial manifest is written and the
/// error is rethrown with the arm name prefixed.
ExperimentResult
RunExperiment(const ExperimentConfig& config);

}  // namespace vecpress
