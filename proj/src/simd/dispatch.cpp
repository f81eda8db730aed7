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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "simd/internal.h"

namespace vecpress::simd {

namespace {

const KernelTable*
Detect() {
    const char* forced = std::getenv("VECPRESS_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
        return &ScalarKernels();
    }
    if (const KernelTable* avx2 = Avx2Kernels(); avx2 != nullptr && CpuSupportsAvx2()) {
        return avx2;
    }
    return &ScalarKernels();
}

std::atomic<const KernelTable*>&
Slot() {
    static std::atomic<const KernelTable*> slot{Detect()};
    return slot;
}

}  // namespace

const KernelTable*
Avx2Kernels() {
#ifdef VECPRESS_HAVE_AVX2
    return &Avx2KernelTable();
#else
    return nullptr;
#endif
}

bool
CpuSupportsAvx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
           __builtin_cpu_supports("f16c");
#else
    return false;
#endif
}

const KernelTable&
Active() {
    return *Slot().load(std::memory_order_acquire);
}

void
SetActive(const KernelTable& table) {
    Slot().store(&table, std::memory_order_release);
}

}  // namespace vecpress::simd
