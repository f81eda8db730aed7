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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace vecpress {

// Seeded generator whose derived streams (uniform, normal, shuffle) are
// defined here rather than by the standard library distributions, so the
// same seed reproduces the same numbers on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }

    std::uint64_t
    Next() {
        return engine_();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double
    Uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double
    Normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = Uniform();
        while (u1 <= 0.0) {
            u1 = Uniform();
        }
        const double u2 = Uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t
    Below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw = engine_();
        while (draw >= limit) {
            draw = engine_();
        }
        return draw % bound;
    }

    template <typename T>
    void
    Shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[Below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vecpress
