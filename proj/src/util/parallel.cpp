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

#include "vecpress/util/parallel.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace vecpress {

namespace {

std::atomic<std::size_t> g_max_threads{0};

}  // namespace

void
SetMaxThreads(std::size_t threads) {
    g_max_threads.store(threads);
}

std::size_t
MaxThreads() {
    const std::size_t cap = g_max_threads.load();
    if (cap != 0) {
        return cap;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void
ParallelFor(std::size_t n,
            std::size_t grain,
            const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    grain = std::max<std::size_t>(1, grain);
    const std::size_t chunks = std::min(MaxThreads(), (n + grain - 1) / grain);
    if (chunks <= 1) {
        body(0, n);
        return;
    }
    const std::size_t step = (n + chunks - 1) / chunks;
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> workers;
    workers.reserve(chunks - 1);
    for (std::size_t c = 1; c < chunks; ++c) {
        const std::size_t begin = std::min(n, c * step);
        const std::size_t end = std::min(n, begin + step);
        workers.emplace_back([&, c, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    try {
        body(0, std::min(n, step));
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& worker : workers) {
        worker.join();
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

}  // namespace vecpress
