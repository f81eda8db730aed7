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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

// Brute-force metric definitions used only by tests. Written against the
// textbook formulas with linear scans and no shared code with the library.
namespace vecpress::oracle {

struct Judged {
    std::vector<std::string> docs;
    std::vector<int> grades;

    int
    grade(const std::string& doc) const {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (docs[i] == doc) {
                return grades[i];
            }
        }
        return 0;
    }

    int
    relevant_count() const {
        return static_cast<int>(std::count_if(grades.begin(), grades.end(), [](int g) { return g > 0; }));
    }
};

inline bool
IsRelevant(const Judged& j, const std::string& doc) {
    return j.grade(doc) > 0;
}

inline double
Precision(const std::vector<std::string>& ranked, const Judged& j, std::size_t k) {
    int hits = 0;
    for (std::size_t r = 1; r <= k && r <= ranked.size(); ++r) {
        hits += IsRelevant(j, ranked[r - 1]) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

inline double
Recall(const std::vector<std::string>& ranked, const Judged& j, std::size_t k) {
    int hits = 0;
    for (std::size_t r = 1; r <= k && r <= ranked.size(); ++r) {
        hits += IsRelevant(j, ranked[r - 1]) ? 1 : 0;
    }
    return static_cast<double>(hits) / j.relevant_count();
}

inline double
ReciprocalRank(const std::vector<std::string>& ranked, const Judged& j, std::size_t k) {
    for (std::size_t r = 1; r <= k && r <= ranked.size(); ++r) {
        if (IsRelevant(j, ranked[r - 1])) {
            return 1.0 / static_cast<double>(r);
        }
    }
    return 0.0;
}

inline double
AveragePrecision(const std::vector<std::string>& ranked, const Judged& j, std::size_t k) {
    double total = 0.0;
    for (std::size_t r = 1; r <= k && r <= ranked.size(); ++r) {
        if (IsRelevant(j, ranked[r - 1])) {
            total += Precision(ranked, j, r);
        }
    }
    return total / j.relevant_count();
}

inline double
Ndcg(const std::vector<std::string>& ranked, const Judged& j, std::size_t k) {
    double dcg = 0.0;
    for (std::size_t r = 1; r <= k && r <= ranked.size(); ++r) {
        dcg += j.grade(ranked[r - 1]) / std::log2(static_cast<double>(r) + 1.0);
    }
    std::vector<int> ideal = j.grades;
    std::sort(ideal.rbegin(), ideal.rend());
    double idcg = 0.0;
    for (std::size_t r = 1; r <= k && r <= ideal.size(); ++r) {
        if (ideal[r - 1] > 0) {
            idcg += ideal[r - 1] / std::log2(static_cast<double>(r) + 1.0);
        }
    }
    return dcg / idcg;
}

}  // namespace vecpress::oracle
