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

#include "vecpress/simd/kernels.h"
#include "vecpress/simd/reference.h"

namespace vecpress::simd {

namespace {

double
DotScalar(const float* a, const float* b, std::size_t n) {
    float lanes[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
        lanes[i % kLanes] = std::fma(a[i], b[i], lanes[i % kLanes]);
    }
    double sum = 0.0;
    for (float lane : lanes) {
        sum += static_cast<double>(lane);
    }
    return sum;
}

void
GemmScalar(std::size_t m,
           std::size_t n,
           std::size_t k,
           const float* a,
           std::size_t lda,
           const float* b,
           std::size_t ldb,
           float* c,
           std::size_t ldc) {
    GemmReference<float>(m, n, k, a, lda, b, ldb, c, ldc);
}

std::uint16_t
FloatToHalf(float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    const auto sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000u);
    const std::uint32_t magnitude = bits & 0x7fffffffu;

    if (magnitude > std::bit_cast<std::uint32_t>(kHalfMax)) {
        return sign | 0x7bffu;  // saturate
    }
    const int exponent = static_cast<int>(magnitude >> 23) - 127;
    const std::uint32_t mantissa = magnitude & 0x7fffffu;

    if (exponent >= -14) {
        auto half = static_cast<std::uint32_t>(((exponent + 15) << 10) | (mantissa >> 13));
        const std::uint32_t rest = mantissa & 0x1fffu;
        if (rest > 0x1000u || (rest == 0x1000u && (half & 1u))) {
            ++half;
        }
        return sign | static_cast<std::uint16_t>(half);
    }
    if (exponent < -25) {
        return sign;
    }
    // Result is a half subnormal: units of 2^-24.
    const std::uint32_t full = mantissa | 0x800000u;
    const int shift = 13 + (-14 - exponent);
    std::uint32_t half = full >> shift;
    const std::uint32_t rest = full & ((1u << shift) - 1u);
    const std::uint32_t midpoint = 1u << (shift - 1);
    if (rest > midpoint || (rest == midpoint && (half & 1u))) {
        ++half;
    }
    return sign | static_cast<std::uint16_t>(half);
}

float
HalfToFloat(std::uint16_t half) {
    const std::uint32_t sign = static_cast<std::uint32_t>(half & 0x8000u) << 16;
    const std::uint32_t exponent = (half >> 10) & 0x1fu;
    const std::uint32_t mantissa = half & 0x3ffu;
    if (exponent == 0) {
        const float magnitude = std::ldexp(static_cast<float>(mantissa), -24);
        return sign ? -magnitude : magnitude;
    }
    std::uint32_t bits;
    if (exponent == 31) {
        bits = sign | 0x7f800000u | (mantissa << 13);
    } else {
        bits = sign | ((exponent - 15 + 127) << 23) | (mantissa << 13);
    }
    return std::bit_cast<float>(bits);
}

void
HalfEncodeScalar(const float* src, std::uint16_t* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = FloatToHalf(src[i]);
    }
}

void
HalfDecodeScalar(const std::uint16_t* src, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = HalfToFloat(src[i]);
    }
}

void
U8EncodeScalar(const float* src,
               const double* lows,
               const double* ranges,
               std::uint8_t* dst,
               std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (ranges[i] == 0.0) {
            dst[i] = 0;
            continue;
        }
        double t = (static_cast<double>(src[i]) - lows[i]) / ranges[i];
        t = std::min(std::max(t, 0.0), 1.0);
        dst[i] = static_cast<std::uint8_t>(std::nearbyint(t * 255.0));
    }
}

void
U8DecodeScalar(const std::uint8_t* src,
               const double* lows,
               const double* ranges,
               float* dst,
               std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double level = static_cast<double>(src[i]) / 255.0;
        dst[i] = static_cast<float>(lows[i] + level * ranges[i]);
    }
}

void
SignPackScalar(const float* src, std::uint8_t* dst, std::size_t n) {
    const std::size_t bytes = (n + 7) / 8;
    std::memset(dst, 0, bytes);
    for (std::size_t i = 0; i < n; ++i) {
        if (src[i] > 0.0f) {
            dst[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        }
    }
}

void
SignUnpackScalar(const std::uint8_t* src, float* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = ((src[i / 8] >> (i % 8)) & 1u) ? 1.0f : -1.0f;
    }
}

}  // namespace

const KernelTable&
ScalarKernels() {
    static const KernelTable table{"scalar",
                                   DotScalar,
                                   GemmScalar,
                                   HalfEncodeScalar,
                                   HalfDecodeScalar,
                                   U8EncodeScalar,
                                   U8DecodeScalar,
                                   SignPackScalar,
                                   SignUnpackScalar};
    return table;
}

}  // namespace vecpress::simd
