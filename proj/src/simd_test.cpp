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

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "catch_amalgamated.hpp"
#include "vecpress/simd/kernels.h"
#include "vecpress/simd/reference.h"
#include "vecpress/util/rng.h"

using namespace vecpress;
using namespace vecpress::simd;

namespace {

double
HalfValue(std::uint16_t code) {
    const int exponent = (code >> 10) & 0x1f;
    const int mantissa = code & 0x3ff;
    const double magnitude = exponent == 0 ? std::ldexp(mantissa, -24)
                                           : std::ldexp(1.0 + mantissa / 1024.0, exponent - 15);
    return (code & 0x8000) ? -magnitude : magnitude;
}

// Brute force over every finite half of the same sign as x, after clamping
// to the largest finite half. Ties go to the even code.
std::uint16_t
NearestHalf(float x) {
    const double clamped = std::clamp(static_cast<double>(x), -65504.0, 65504.0);
    const std::uint16_t sign = std::signbit(x) ? 0x8000 : 0;
    std::uint16_t best = sign;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::uint16_t magnitude = 0; magnitude < 0x7c00; ++magnitude) {
        const std::uint16_t code = sign | magnitude;
        const double err = std::fabs(HalfValue(code) - clamped);
        if (err < best_err || (err == best_err && (code & 1) == 0)) {
            best = code;
            best_err = err;
        }
    }
    return best;
}

std::vector<float>
RandomFloats(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<float> out(n);
    for (auto& v : out) {
        v = static_cast<float>(rng.Normal() * scale);
    }
    return out;
}

bool
SameBits(float a, float b) {
    return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
}

double
LaneOrderDot(const float* a, const float* b, std::size_t n) {
    float lanes[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
        lanes[i % kLanes] = std::fma(a[i], b[i], lanes[i % kLanes]);
    }
    double sum = 0.0;
    for (float lane : lanes) {
        sum += lane;
    }
    return sum;
}

std::vector<const KernelTable*>
Tables() {
    std::vector<const KernelTable*> tables{&ScalarKernels()};
    if (Avx2Kernels() != nullptr && CpuSupportsAvx2()) {
        tables.push_back(Avx2Kernels());
    }
    return tables;
}

}  // namespace

TEST_CASE("scalar dot follows the lane order", "[simd]") {
    Rng rng(1);
    for (std::size_t n = 0; n < 80; ++n) {
        const auto a = RandomFloats(rng, n);
        const auto b = RandomFloats(rng, n);
        REQUIRE(ScalarKernels().dot(a.data(), b.data(), n) == LaneOrderDot(a.data(), b.data(), n));
    }
}

TEST_CASE("every kernel table agrees bit for bit with scalar", "[simd]") {
    const KernelTable& ref = ScalarKernels();
    Rng rng(2);
    for (const KernelTable* table : Tables()) {
        INFO(table->name);
        SECTION("dot") {
            for (std::size_t n = 0; n < 200; n += 1 + n / 16) {
                const auto a = RandomFloats(rng, n, 3.0);
                const auto b = RandomFloats(rng, n, 0.1);
                REQUIRE(table->dot(a.data(), b.data(), n) == ref.dot(a.data(), b.data(), n));
            }
        }
        SECTION("half encode and decode") {
            auto src = RandomFloats(rng, 517, 1000.0);
            src.insert(src.end(), {0.0f, -0.0f, 65504.0f, 65519.0f, 65520.0f, -1e9f, 1e-8f, -6e-8f, 2.98e-8f,
                                   std::numeric_limits<float>::denorm_min()});
            for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(7), std::size_t(8), src.size()}) {
                std::vector<std::uint16_t> x(n), y(n);
                table->half_encode(src.data(), x.data(), n);
                ref.half_encode(src.data(), y.data(), n);
                REQUIRE(x == y);
                std::vector<float> fx(n), fy(n);
                table->half_decode(x.data(), fx.data(), n);
                ref.half_decode(x.data(), fy.data(), n);
                for (std::size_t i = 0; i < n; ++i) {
                    REQUIRE(SameBits(fx[i], fy[i]));
                }
            }
        }
        SECTION("u8 encode and decode") {
            const std::size_t n = 389;
            auto src = RandomFloats(rng, n, 2.0);
            std::vector<double> lows(n), ranges(n);
            for (std::size_t i = 0; i < n; ++i) {
                lows[i] = -2.0 + rng.Uniform();
                ranges[i] = i % 17 == 0 ? 0.0 : 1.0 + 3.0 * rng.Uniform();
            }
            for (std::size_t len : {std::size_t(0), std::size_t(3), std::size_t(4), std::size_t(31), n}) {
                std::vector<std::uint8_t> x(len), y(len);
                table->u8_encode(src.data(), lows.data(), ranges.data(), x.data(), len);
                ref.u8_encode(src.data(), lows.data(), ranges.data(), y.data(), len);
                REQUIRE(x == y);
                std::vector<float> fx(len), fy(len);
                table->u8_decode(x.data(), lows.data(), ranges.data(), fx.data(), len);
                ref.u8_decode(x.data(), lows.data(), ranges.data(), fy.data(), len);
                for (std::size_t i = 0; i < len; ++i) {
                    REQUIRE(SameBits(fx[i], fy[i]));
                }
            }
        }
        SECTION("sign pack and unpack") {
            auto src = RandomFloats(rng, 301);
            src[0] = 0.0f;
            src[1] = -0.0f;
            for (std::size_t n : {std::size_t(0), std::size_t(5), std::size_t(8), std::size_t(64), src.size()}) {
                std::vector<std::uint8_t> x((n + 7) / 8), y((n + 7) / 8);
                table->sign_pack(src.data(), x.data(), n);
                ref.sign_pack(src.data(), y.data(), n);
                REQUIRE(x == y);
                std::vector<float> fx(n), fy(n);
                table->sign_unpack(x.data(), fx.data(), n);
                ref.sign_unpack(x.data(), fy.data(), n);
                for (std::size_t i = 0; i < n; ++i) {
                    REQUIRE(SameBits(fx[i], fy[i]));
                }
            }
        }
        SECTION("gemm against the reference chain") {
            const std::size_t shapes[][3] = {{0, 0, 0}, {1, 1, 1},   {3, 5, 7},    {6, 16, 9},   {7, 17, 33},
                                             {13, 8, 1}, {25, 40, 3}, {2, 100, 700}, {64, 96, 129}, {5, 3, 0}};
            for (const auto& s : shapes) {
                const std::size_t m = s[0], n = s[1], k = s[2];
                const std::size_t lda = k + 3, ldb = n + 5, ldc = n + 2;
                const auto a = RandomFloats(rng, m * lda + 1);
                const auto b = RandomFloats(rng, k * ldb + 1);
                std::vector<float> c(m * ldc + 1, 42.0f), expect(m * ldc + 1, 42.0f);
                table->gemm(m, n, k, a.data(), lda, b.data(), ldb, c.data(), ldc);
                GemmReference<float>(m, n, k, a.data(), lda, b.data(), ldb, expect.data(), ldc);
                for (std::size_t i = 0; i < c.size(); ++i) {
                    REQUIRE(SameBits(c[i], expect[i]));
                }
            }
        }
    }
}

TEST_CASE("half encoding is the nearest half with ties to even", "[simd][f16]") {
    Rng rng(3);
    std::vector<float> samples;
    for (int i = 0; i < 400; ++i) {
        // Random bit patterns over the exponent range that halves cover.
        const int exponent = static_cast<int>(rng.Below(48)) - 30;
        samples.push_back(static_cast<float>(std::ldexp(1.0 + rng.Uniform(), exponent)) *
                          (rng.Below(2) ? 1.0f : -1.0f));
    }
    for (std::uint16_t code = 0; code < 0x7bff; code += 97) {
        // Midpoints between neighbouring halves exercise tie rounding.
        samples.push_back(static_cast<float>((HalfValue(code) + HalfValue(code + 1)) / 2.0));
    }
    samples.insert(samples.end(), {0.1f, 1e5f, -1e5f, 65504.0f, 65520.0f, 5.96e-8f, 2.9e-8f, 3.0e-8f, 0.0f, -0.0f});
    for (const KernelTable* table : Tables()) {
        std::vector<std::uint16_t> codes(samples.size());
        table->half_encode(samples.data(), codes.data(), samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            INFO(table->name << " x=" << samples[i]);
            REQUIRE(codes[i] == NearestHalf(samples[i]));
        }
    }
}

TEST_CASE("half decoding covers every finite code", "[simd][f16]") {
    std::vector<std::uint16_t> codes;
    for (std::uint32_t c = 0; c < 65536; ++c) {
        if (((c >> 10) & 0x1f) != 0x1f) {
            codes.push_back(static_cast<std::uint16_t>(c));
        }
    }
    for (const KernelTable* table : Tables()) {
        std::vector<float> out(codes.size());
        table->half_decode(codes.data(), out.data(), codes.size());
        for (std::size_t i = 0; i < codes.size(); ++i) {
            REQUIRE(static_cast<double>(out[i]) == HalfValue(codes[i]));
        }
    }
}

TEST_CASE("dispatch can be overridden", "[simd]") {
    const KernelTable& before = Active();
    SetActive(ScalarKernels());
    REQUIRE(Active().name == ScalarKernels().name);
    SetActive(before);
    REQUIRE(Active().name == before.name);
}
