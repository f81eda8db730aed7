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

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vecpress/types.h"

namespace vecpress {

enum class Metric : std::size_t {
    NDCG = 0,
    MAP,
    MRR,
    RECALL,
    PRECISION,
};

inline constexpr std::size_t kMetricCount = 5;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::NDCG, Metric::MAP, Metric::MRR, Metric::RECALL, Metric::PRECISION};

inline const std::vector<std::size_t> kDefaultKGrid = {1, 3, 5, 10, 25, 50, 100};

std::string_view
MetricName(Metric metric);

Metric
ParseMetric(std::string_view name);

using DocList = std::span<const std::string>;
using RelevantSet = std::set<std::string, std::less<>>;
using GradeMap = std::map<std::string, int, std::less<>>;

/// |relevant in top-k| / k, even when fewer than k documents were retrieved.
double
PrecisionAtK(DocList ranking, const RelevantSet& relevant, std::size_t k);

/// |relevant in top-k| / |relevant|. NO_RELEVANT when relevant is empty.
double
RecallAtK(DocList ranking, const RelevantSet& relevant, std::size_t k);

/// 1 / rank of the first relevant document within the top k, else 0.
double
MrrAtK(DocList ranking, const RelevantSet& relevant, std::size_t k);

/// Sum of P@i over relevant ranks i <= k, divided by |relevant|.
double
MapAtK(DocList ranking, const RelevantSet& relevant, std::size_t k);

/// Linear-gain DCG@k over the ideal DCG@k of the judged grades.
double
NdcgAtK(DocList ranking, const GradeMap& grades, std::size_t k);

/// scores[metric][k index].
using MetricGrid = std::array<std::vector<double>, kMetricCount>;

struct MetricReport {
    std::string method;
    std::vector<std::size_t> ks;
    MetricGrid scores;
    std::map<std::string, MetricGrid> per_query;
    std::size_t evaluated_queries = 0;

    double
    at(Metric metric, std::size_t k) const;
};

/// Means over qrels queries with at least one positive grade; such queries
/// missing from the run score 0 and run queries absent from qrels are
/// ignored. `ks` is sorted and de-duplicated.
MetricReport
Evaluate(const RunRanking& run,
         const Qrels& qrels,
         std::vector<std::size_t> ks,
         std::string method = "baseline");

struct DeltaEntry {
    Metric metric;
    std::size_t k;
    double method;
    double baseline;
    double delta;  // method - baseline
};

struct DeltaReport {
    std::string method;
    std::string baseline;
    std::vector<DeltaEntry> entries;

    double
    at(Metric metric, std::size_t k) const;
};

/// Component-wise method - baseline. GRID_MISMATCH unless the k grids agree.
DeltaReport
Delta(const MetricReport& method, const MetricReport& baseline);

/// {"method": {"ndcg": {"1": v, ...}, ...}, ...} in report order.
std::string
MetricsToJson(std::span<const MetricReport> reports);

/// Inverse of MetricsToJson (per-query breakdowns are not serialized).
std::vector<MetricReport>
MetricsFromJson(std::string_view text);

/// Long format: method,metric,k,value,baseline,delta.
std::string
DeltasToCsv(std::span<const DeltaReport> deltas);

/// query,metric,k,value for every evaluated query.
std::string
PerQueryToCsv(const MetricReport& report);

/// Exact decimal form used in every CSV artifact (round-trips a double).
std::string
FormatExact(double value);

}  // namespace vecpress
