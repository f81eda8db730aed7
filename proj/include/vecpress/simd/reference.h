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
#include <cstddef>

namespace vecpress::simd {

// Portable GEMM used for 64-bit arithmetic and as the scalar float kernel.
// Per output element the accumulation order is k = 0..K-1 with fused
// multiply-add, matching the vector kernels bit for bit.
template <typename T>
void
GemmReference(std::size_t m,
              std::size_t n,
              std::size_t k,
              const T* a,
              std::size_t lda,
              const T* b,
              std::size_t ldb,
              T* c,
              std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        T* c_row = c + i * ldc;
        std::fill(c_row, c_row + n, T(0));
        const T* a_row = a + i * lda;
        for (std::size_t p = 0; p < k; ++p) {
            const T a_ip = a_row[p];
            const T* b_row = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) {
                c_row[j] = std::fma(a_ip, b_row[j], c_row[j]);
            }
        }
    }
}

}  // namespace vecpress::simd
