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
#include <string_view>

namespace vecpress::simd {

// Float dot products accumulate in kLanes independent float lanes: element i
// is fused into lane (i % kLanes). The lanes are reduced in double, in lane
// order. Every variant follows this order exactly, so results are
// bit-identical across variants.
constexpr std::size_t kLanes = 8;

constexpr float kHalfMax = 65504.0f;

using DotFunc = double (*)(const float* a, const float* b, std::size_t n);

// C[M x N] = A[M x K] * B[K x N], all row-major with explicit leading
// dimensions. C is overwritten. Each output is the sequential fused chain
// acc = fma(A[i,k], B[k,j], acc) for k = 0..K-1 starting from acc = 0.
using GemmFunc = void (*)(std::size_t m,
                          std::size_t n,
                          std::size_t k,
                          const float* a,
                          std::size_t lda,
                          const float* b,
                          std::size_t ldb,
                          float* c,
                          std::size_t ldc);

using HalfEncodeFunc = void (*)(const float* src, std::uint16_t* dst, std::size_t n);
using HalfDecodeFunc = void (*)(const std::uint16_t* src, float* dst, std::size_t n);

// Per-dimension affine mapping onto 0..255. lows/ranges are indexed by
// component position; a range of 0 maps every value to level 0.
using U8EncodeFunc = void (*)(const float* src,
                              const double* lows,
                              const double* ranges,
                              std::uint8_t* dst,
                              std::size_t n);
using U8DecodeFunc = void (*)(const std::uint8_t* src,
                              const double* lows,
                              const double* ranges,
                              float* dst,
                              std::size_t n);

// Bit i of byte j holds component 8*j+i; set iff the value is > 0.
using SignPackFunc = void (*)(const float* src, std::uint8_t* dst, std::size_t n);
using SignUnpackFunc = void (*)(const std::uint8_t* src, float* dst, std::size_t n);

struct KernelTable {
    std::string_view name;
    DotFunc dot;
    GemmFunc gemm;
    HalfEncodeFunc half_encode;
    HalfDecodeFunc half_decode;
    U8EncodeFunc u8_encode;
    U8DecodeFunc u8_decode;
    SignPackFunc sign_pack;
    SignUnpackFunc sign_unpack;
};

const KernelTable&
ScalarKernels();

/// nullptr when the binary was built without AVX2 support.
const KernelTable*
Avx2Kernels();

bool
CpuSupportsAvx2();

/// The table chosen at first use: AVX2 when the CPU supports it, otherwise
/// scalar. Setting VECPRESS_SIMD=scalar in the environment forces scalar.
const KernelTable&
Active();

/// Overrides the active table (tests and benchmarks).
void
SetActive(const KernelTable& table);

}  // namespace vecpress::simd
