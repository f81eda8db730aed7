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
#include <functional>

namespace vecpress {

/// Caps worker threads used by ParallelFor; 0 restores the hardware default.
void
SetMaxThreads(std::size_t threads);

std::size_t
MaxThreads();

/// Splits [0, n) into at most MaxThreads() contiguous chunks of at least
/// `grain` items and runs body(begin, end) on each. Chunk boundaries depend
/// only on n, grain and the thread cap; callers write disjoint outputs.
void
ParallelFor(std::size_t n,
            std::size_t grain,
            const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace vecpress
