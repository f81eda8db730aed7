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

#include "vecpress/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "vecpress/error.h"

namespace vecpress {

namespace {

std::size_t
Cutoff(DocList ranking, std::size_t k) {
    return std::min(k, ranking.size());
}

std::size_t
HitsAtK(DocList ranking, const RelevantSet& relevant, std::size_t k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < Cutoff(ranking, k); ++i) {
        hits += relevant.count(ranking[i]);
    }
    return hits;
}

void
RequireK(std::size_t k) {
    VECPRESS_CHECK(k >= 1, INVALID_CONFIG, "cutoff k must be at least 1");
}

void
RequireRelevant(const RelevantSet& relevant) {
    VECPRESS_CHECK(!relevant.empty(), NO_RELEVANT, "query has no relevant documents");
}

std::size_t
IndexOfK(const std::vector<std::size_t>& ks, std::size_t k) {
    const auto it = std::find(ks.begin(), ks.end(), k);
    VECPRESS_CHECK(it != ks.end(), GRID_MISMATCH, "k=" + std::to_string(k) + " not in grid");
    return static_cast<std::size_t>(it - ks.begin());
}

}  // namespace

std::string_view
MetricName(Metric metric) {
    switch (metric) {
        case Metric::NDCG:
            return "ndcg";
        case Metric::MAP:
            return "map";
        case Metric::MRR:
            return "mrr";
        case Metric::RECALL:
            return "recall";
        case Metric::PRECISION:
            return "precision";
    }
    return "unknown";
}

Metric
ParseMetric(std::string_view name) {
    for (Metric metric : kAllMetrics) {
        if (MetricName(metric) == name) {
            return metric;
        }
    }
    Fail(ErrorType::JSON_PARSE_ERROR, "unknown metric '" + std::string(name) + "'");
}

double
PrecisionAtK(DocList ranking, const RelevantSet& relevant, std::size_t k) {
    RequireK(k);
    return static_cast<double>(HitsAtK(ranking, relevant, k)) / static_cast<double>(k);
}

double
RecallAtK(DocList ranking, const RelevantSet& relevant, std::size_t k) {
    RequireK(k);
    RequireRelevant(relevant);
    return static_cast<double>(HitsAtK(ranking, relevant, k)) / static_cast<double>(relevant.size());
}

double
MrrAtK(DocList ranking, const RelevantSet& relevant, std::size_t k) {
    RequireK(k);
    for (std::size_t i = 0; i < Cutoff(ranking, k); ++i) {
        if (relevant.count(ranking[i]) != 0) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

double
MapAtK(DocList ranking, const RelevantSet& relevant, std::size_t k) {
    RequireK(k);
    RequireRelevant(relevant);
    double precision_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < Cutoff(ranking, k); ++i) {
        if (relevant.count(ranking[i]) != 0) {
            ++hits;
            precision_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return precision_sum / static_cast<double>(relevant.size());
}

double
NdcgAtK(DocList ranking, const GradeMap& grades, std::size_t k) {
    RequireK(k);
    std::vector<int> ideal;
    for (const auto& [doc, grade] : grades) {
        if (grade > 0) {
            ideal.push_back(grade);
        }
    }
    VECPRESS_CHECK(!ideal.empty(), NO_RELEVANT, "query has no relevant documents");
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double dcg = 0.0;
    for (std::size_t i = 0; i < Cutoff(ranking, k); ++i) {
        const auto it = grades.find(ranking[i]);
        if (it != grades.end() && it->second > 0) {
            dcg += static_cast<double>(it->second) / std::log2(static_cast<double>(i + 2));
        }
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += static_cast<double>(ideal[i]) / std::log2(static_cast<double>(i + 2));
    }
    return dcg / idcg;
}

double
MetricReport::at(Metric metric, std::size_t k) const {
    return scores[static_cast<std::size_t>(metric)][IndexOfK(ks, k)];
}

MetricReport
Evaluate(const RunRanking& run, const Qrels& qrels, std::vector<std::size_t> ks, std::string method) {
    VECPRESS_CHECK(!ks.empty(), INVALID_CONFIG, "k grid is empty");
    for (std::size_t k : ks) {
        RequireK(k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    VECPRESS_CHECK(!qrels.empty(), EMPTY_QRELS, "qrels are empty");

    MetricReport report;
    report.method = std::move(method);
    report.ks = ks;
    for (auto& row : report.scores) {
        row.assign(ks.size(), 0.0);
    }

    std::vector<std::string> ranking;
    for (const auto& [query, judgments] : qrels) {
        RelevantSet relevant;
        GradeMap grades;
        for (const auto& [doc, grade] : judgments) {
            grades.emplace(doc, grade);
            if (grade > 0) {
                relevant.insert(doc);
            }
        }
        if (relevant.empty()) {
            continue;
        }
        ranking.clear();
        if (const auto it = run.find(query); it != run.end()) {
            for (const auto& scored : it->second) {
                ranking.push_back(scored.doc_id);
            }
        }
        MetricGrid grid;
        for (auto& row : grid) {
            row.resize(ks.size());
        }
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::size_t k = ks[i];
            grid[static_cast<std::size_t>(Metric::NDCG)][i] = NdcgAtK(ranking, grades, k);
            grid[static_cast<std::size_t>(Metric::MAP)][i] = MapAtK(ranking, relevant, k);
            grid[static_cast<std::size_t>(Metric::MRR)][i] = MrrAtK(ranking, relevant, k);
            grid[static_cast<std::size_t>(Metric::RECALL)][i] = RecallAtK(ranking, relevant, k);
            grid[static_cast<std::size_t>(Metric::PRECISION)][i] = PrecisionAtK(ranking, relevant, k);
        }
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            for (std::size_t i = 0; i < ks.size(); ++i) {
                report.scores[m][i] += grid[m][i];
            }
        }
        report.per_query.emplace(query, std::move(grid));
        ++report.evaluated_queries;
    }
    VECPRESS_CHECK(report.evaluated_queries > 0, EMPTY_QRELS, "no query has a positive judgment");
    const auto n = static_cast<double>(report.evaluated_queries);
    for (auto& row : report.scores) {
        for (double& value : row) {
            value /= n;
        }
    }
    return report;
}

double
DeltaReport::at(Metric metric, std::size_t k) const {
    for (const auto& entry : entries) {
        if (entry.metric == metric && entry.k == k) {
            return entry.delta;
        }
    }
    Fail(ErrorType::GRID_MISMATCH, "no delta for " + std::string(MetricName(metric)) + "@" + std::to_string(k));
}

DeltaReport
Delta(const MetricReport& method, const MetricReport& baseline) {
    VECPRESS_CHECK(method.ks == baseline.ks,
                   GRID_MISMATCH,
                   "k grids of '" + method.method + "' and '" + baseline.method + "' differ");
    DeltaReport report;
    report.method = method.method;
    report.baseline = baseline.method;
    for (Metric metric : kAllMetrics) {
        const auto m = static_cast<std::size_t>(metric);
        VECPRESS_CHECK(method.scores[m].size() == method.ks.size() &&
                           baseline.scores[m].size() == baseline.ks.size(),
                       GRID_MISMATCH,
                       "metric grid is incomplete");
        for (std::size_t i = 0; i < method.ks.size(); ++i) {
            const double value = method.scores[m][i];
            const double base = baseline.scores[m][i];
            report.entries.push_back({metric, method.ks[i], value, base, value - base});
        }
    }
    return report;
}

std::string
MetricsToJson(std::span<const MetricReport> reports) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& report : reports) {
        nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
        for (Metric metric : kAllMetrics) {
            nlohmann::ordered_json by_k = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < report.ks.size(); ++i) {
                by_k[std::to_string(report.ks[i])] = report.scores[static_cast<std::size_t>(metric)][i];
            }
            metrics[std::string(MetricName(metric))] = std::move(by_k);
        }
        root[report.method] = std::move(metrics);
    }
    return root.dump(2) + "\n";
}

std::vector<MetricReport>
MetricsFromJson(std::string_view text) {
    nlohmann::ordered_json root;
    try {
        root = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        Fail(ErrorType::JSON_PARSE_ERROR, std::string("metrics JSON: ") + e.what());
    }
    VECPRESS_CHECK(root.is_object(), JSON_PARSE_ERROR, "metrics JSON must be an object");
    std::vector<MetricReport> reports;
    for (const auto& [method, metrics] : root.items()) {
        VECPRESS_CHECK(metrics.is_object(), JSON_PARSE_ERROR, "method '" + method + "' is not an object");
        MetricReport report;
        report.method = method;
        bool first = true;
        std::size_t seen = 0;
        for (const auto& [name, by_k] : metrics.items()) {
            const Metric metric = ParseMetric(name);
            VECPRESS_CHECK(by_k.is_object(), JSON_PARSE_ERROR, "metric '" + name + "' is not an object");
            std::vector<std::size_t> ks;
            auto& row = report.scores[static_cast<std::size_t>(metric)];
            row.clear();
            for (const auto& [key, value] : by_k.items()) {
                std::size_t k = 0;
                const auto result = std::from_chars(key.data(), key.data() + key.size(), k);
                VECPRESS_CHECK(result.ec == std::errc() && result.ptr == key.data() + key.size() && k >= 1,
                               JSON_PARSE_ERROR,
                               "invalid cutoff '" + key + "'");
                VECPRESS_CHECK(value.is_number(), JSON_PARSE_ERROR, "non-numeric metric value");
                ks.push_back(k);
                row.push_back(value.get<double>());
            }
            if (first) {
                report.ks = ks;
                first = false;
            }
            VECPRESS_CHECK(ks == report.ks, GRID_MISMATCH, "metrics of '" + method + "' use different k grids");
            ++seen;
        }
        VECPRESS_CHECK(seen == kMetricCount, JSON_PARSE_ERROR, "method '" + method + "' lacks some metrics");
        reports.push_back(std::move(report));
    }
    return reports;
}

std::string
FormatExact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string
DeltasToCsv(std::span<const DeltaReport> deltas) {
    std::string csv = "method,metric,k,value,baseline,delta\n";
    for (const auto& report : deltas) {
        for (const auto& e : report.entries) {
            csv += report.method + "," + std::string(MetricName(e.metric)) + "," + std::to_string(e.k) + "," +
                   FormatExact(e.method) + "," + FormatExact(e.baseline) + "," + FormatExact(e.delta) + "\n";
        }
    }
    return csv;
}

std::string
PerQueryToCsv(const MetricReport& report) {
    std::string csv = "query,metric,k,value\n";
    for (const auto& [query, grid] : report.per_query) {
        for (Metric metric : kAllMetrics) {
            for (std::size_t i = 0; i < report.ks.size(); ++i) {
                csv += query + "," + std::string(MetricName(metric)) + "," + std::to_string(report.ks[i]) + "," +
                       FormatExact(grid[static_cast<std::size_t>(metric)][i]) + "\n";
            }
        }
    }
    return csv;
}

}  // namespace vecpress
