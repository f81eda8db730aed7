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

// Compiled with -mavx2 -mfma -mf16c. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "simd/internal.h"

namespace vecpress::simd {

namespace {

double
DotAvx2(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
    }
    alignas(32) float lanes[kLanes];
    _mm256_store_ps(lanes, acc);
    for (; i < n; ++i) {
        lanes[i % kLanes] = std::fma(a[i], b[i], lanes[i % kLanes]);
    }
    double sum = 0.0;
    for (float lane : lanes) {
        sum += static_cast<double>(lane);
    }
    return sum;
}

// R rows x 16 columns of C.
template <int R>
inline void
Tile16(std::size_t k,
       const float* a,
       std::size_t lda,
       const float* b,
       std::size_t ldb,
       float* c,
       std::size_t ldc) {
    __m256 lo[R];
    __m256 hi[R];
    for (int r = 0; r < R; ++r) {
        lo[r] = _mm256_setzero_ps();
        hi[r] = _mm256_setzero_ps();
    }
    for (std::size_t p = 0; p < k; ++p) {
        const __m256 b0 = _mm256_loadu_ps(b + p * ldb);
        const __m256 b1 = _mm256_loadu_ps(b + p * ldb + 8);
        for (int r = 0; r < R; ++r) {
            const __m256 ar = _mm256_broadcast_ss(a + r * lda + p);
            lo[r] = _mm256_fmadd_ps(ar, b0, lo[r]);
            hi[r] = _mm256_fmadd_ps(ar, b1, hi[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm256_storeu_ps(c + r * ldc, lo[r]);
        _mm256_storeu_ps(c + r * ldc + 8, hi[r]);
    }
}

template <int R>
inline void
Tile8(std::size_t k,
      const float* a,
      std::size_t lda,
      const float* b,
      std::size_t ldb,
      float* c,
      std::size_t ldc) {
    __m256 acc[R];
    for (int r = 0; r < R; ++r) {
        acc[r] = _mm256_setzero_ps();
    }
    for (std::size_t p = 0; p < k; ++p) {
        const __m256 b0 = _mm256_loadu_ps(b + p * ldb);
        for (int r = 0; r < R; ++r) {
            acc[r] = _mm256_fmadd_ps(_mm256_broadcast_ss(a + r * lda + p), b0, acc[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm256_storeu_ps(c + r * ldc, acc[r]);
    }
}

inline void
TileScalar(std::size_t rows,
           std::size_t cols,
           std::size_t k,
           const float* a,
           std::size_t lda,
           const float* b,
           std::size_t ldb,
           float* c,
           std::size_t ldc) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) {
            float acc = 0.0f;
            for (std::size_t p = 0; p < k; ++p) {
                acc = std::fma(a[r * lda + p], b[p * ldb + j], acc);
            }
            c[r * ldc + j] = acc;
        }
    }
}

template <int R>
void
RowBlock(std::size_t cols,
         std::size_t k,
         const float* a,
         std::size_t lda,
         const float* b,
         std::size_t ldb,
         float* c,
         std::size_t ldc) {
    std::size_t j = 0;
    for (; j + 16 <= cols; j += 16) {
        Tile16<R>(k, a, lda, b + j, ldb, c + j, ldc);
    }
    if (j + 8 <= cols) {
        Tile8<R>(k, a, lda, b + j, ldb, c + j, ldc);
        j += 8;
    }
    if (j < cols) {
        TileScalar(R, cols - j, k, a, lda, b + j, ldb, c + j, ldc);
    }
}

constexpr std::size_t kRowBlock = 6;
// Column panel width chosen so a K x panel slice of B stays near 256 KiB.
constexpr std::size_t kPanelFloats = 64 * 1024;

void
GemmAvx2(std::size_t m,
         std::size_t n,
         std::size_t k,
         const float* a,
         std::size_t lda,
         const float* b,
         std::size_t ldb,
         float* c,
         std::size_t ldc) {
    if (k == 0) {
        for (std::size_t i = 0; i < m; ++i) {
            std::memset(c + i * ldc, 0, n * sizeof(float));
        }
        return;
    }
    std::size_t panel = (kPanelFloats / k) / 16 * 16;
    panel = panel < 16 ? 16 : panel;
    for (std::size_t jc = 0; jc < n; jc += panel) {
        const std::size_t cols = n - jc < panel ? n - jc : panel;
        const float* b_panel = b + jc;
        for (std::size_t i = 0; i < m; i += kRowBlock) {
            const float* a_rows = a + i * lda;
            float* c_rows = c + i * ldc + jc;
            switch (m - i < kRowBlock ? m - i : kRowBlock) {
                case 6:
                    RowBlock<6>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
                case 5:
                    RowBlock<5>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
                case 4:
                    RowBlock<4>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
                case 3:
                    RowBlock<3>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
                case 2:
                    RowBlock<2>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
                default:
                    RowBlock<1>(cols, k, a_rows, lda, b_panel, ldb, c_rows, ldc);
                    break;
            }
        }
    }
}

void
HalfEncodeAvx2(const float* src, std::uint16_t* dst, std::size_t n) {
    const __m256 upper = _mm256_set1_ps(kHalfMax);
    const __m256 lower = _mm256_set1_ps(-kHalfMax);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 x = _mm256_loadu_ps(src + i);
        x = _mm256_min_ps(_mm256_max_ps(x, lower), upper);
        const __m128i h = _mm256_cvtps_ph(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + i), h);
    }
    if (i < n) {
        alignas(32) float tail[8] = {};
        alignas(16) std::uint16_t out[8];
        std::memcpy(tail, src + i, (n - i) * sizeof(float));
        __m256 x = _mm256_load_ps(tail);
        x = _mm256_min_ps(_mm256_max_ps(x, lower), upper);
        _mm_store_si128(reinterpret_cast<__m128i*>(out),
                        _mm256_cvtps_ph(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
        std::memcpy(dst + i, out, (n - i) * sizeof(std::uint16_t));
    }
}

void
HalfDecodeAvx2(const std::uint16_t* src, float* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m128i h = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i));
        _mm256_storeu_ps(dst + i, _mm256_cvtph_ps(h));
    }
    if (i < n) {
        alignas(16) std::uint16_t tail[8] = {};
        alignas(32) float out[8];
        std::memcpy(tail, src + i, (n - i) * sizeof(std::uint16_t));
        _mm256_store_ps(out, _mm256_cvtph_ps(_mm_load_si128(reinterpret_cast<const __m128i*>(tail))));
        std::memcpy(dst + i, out, (n - i) * sizeof(float));
    }
}

void
U8EncodeAvx2(const float* src,
             const double* lows,
             const double* ranges,
             std::uint8_t* dst,
             std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d scale = _mm256_set1_pd(255.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(src + i));
        const __m256d low = _mm256_loadu_pd(lows + i);
        const __m256d range = _mm256_loadu_pd(ranges + i);
        __m256d t = _mm256_div_pd(_mm256_sub_pd(x, low), range);
        t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
        __m256d q = _mm256_round_pd(_mm256_mul_pd(t, scale),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        q = _mm256_andnot_pd(_mm256_cmp_pd(range, zero, _CMP_EQ_OQ), q);
        const __m128i q32 = _mm256_cvtpd_epi32(q);
        const __m128i q8 = _mm_packus_epi16(_mm_packus_epi32(q32, q32), _mm_setzero_si128());
        const int packed = _mm_cvtsi128_si32(q8);
        std::memcpy(dst + i, &packed, 4);
    }
    for (; i < n; ++i) {
        if (ranges[i] == 0.0) {
            dst[i] = 0;
            continue;
        }
        double t = (static_cast<double>(src[i]) - lows[i]) / ranges[i];
        t = t < 0.0 ? 0.0 : t;
        t = t > 1.0 ? 1.0 : t;
        dst[i] = static_cast<std::uint8_t>(std::nearbyint(t * 255.0));
    }
}

void
U8DecodeAvx2(const std::uint8_t* src,
             const double* lows,
             const double* ranges,
             float* dst,
             std::size_t n) {
    const __m256d scale = _mm256_set1_pd(255.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        int packed;
        std::memcpy(&packed, src + i, 4);
        const __m256d level =
            _mm256_div_pd(_mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed))), scale);
        const __m256d x = _mm256_add_pd(_mm256_loadu_pd(lows + i),
                                        _mm256_mul_pd(level, _mm256_loadu_pd(ranges + i)));
        _mm_storeu_ps(dst + i, _mm256_cvtpd_ps(x));
    }
    for (; i < n; ++i) {
        const double level = static_cast<double>(src[i]) / 255.0;
        dst[i] = static_cast<float>(lows[i] + level * ranges[i]);
    }
}

void
SignPackAvx2(const float* src, std::uint8_t* dst, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 positive = _mm256_cmp_ps(_mm256_loadu_ps(src + i), zero, _CMP_GT_OQ);
        dst[i / 8] = static_cast<std::uint8_t>(_mm256_movemask_ps(positive));
    }
    if (i < n) {
        std::uint8_t byte = 0;
        for (std::size_t j = i; j < n; ++j) {
            if (src[j] > 0.0f) {
                byte |= static_cast<std::uint8_t>(1u << (j - i));
            }
        }
        dst[i / 8] = byte;
    }
}

void
SignUnpackAvx2(const std::uint8_t* src, float* dst, std::size_t n) {
    const __m256i bit_select = _mm256_setr_epi32(1, 2, 4, 8, 16, 32, 64, 128);
    const __m256 plus = _mm256_set1_ps(1.0f);
    const __m256 minus = _mm256_set1_ps(-1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i bits =
            _mm256_and_si256(_mm256_set1_epi32(src[i / 8]), bit_select);
        const __m256 set = _mm256_castsi256_ps(_mm256_cmpeq_epi32(bits, bit_select));
        _mm256_storeu_ps(dst + i, _mm256_blendv_ps(minus, plus, set));
    }
    for (; i < n; ++i) {
        dst[i] = ((src[i / 8] >> (i % 8)) & 1u) ? 1.0f : -1.0f;
    }
}

}  // namespace

const KernelTable&
Avx2KernelTable() {
    static const KernelTable table{"avx2",
                                   DotAvx2,
                                   GemmAvx2,
                                   HalfEncodeAvx2,
                                   HalfDecodeAvx2,
                                   U8EncodeAvx2,
                                   U8DecodeAvx2,
                                   SignPackAvx2,
                                   SignUnpackAvx2};
    return table;
}

}  // namespace vecpress::simd
