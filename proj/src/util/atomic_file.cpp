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

#include "vecpress/util/atomic_file.h"

#include <atomic>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "vecpress/error.h"

namespace vecpress {

namespace {

std::filesystem::path
TempPathFor(const std::filesystem::path& target) {
    static std::atomic<unsigned> counter{0};
    auto temp = target;
    temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    return temp;
}

}  // namespace

AtomicFile::AtomicFile(std::filesystem::path target)
    : target_(std::move(target)), temp_(TempPathFor(target_)) {
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) {
        Fail(ErrorType::IO_FAILURE, "cannot open for writing: " + target_.string());
    }
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ignored;
        std::filesystem::remove(temp_, ignored);
    }
}

void
AtomicFile::Write(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void
AtomicFile::Finish() {
    if (finished_) {
        return;
    }
    out_.flush();
    const bool ok = static_cast<bool>(out_);
    out_.close();
    finished_ = true;
    if (!ok || out_.fail()) {
        Fail(ErrorType::IO_FAILURE, "write failed: " + target_.string());
    }
}

void
AtomicFile::Commit() {
    Finish();
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) {
        Fail(ErrorType::IO_FAILURE, "cannot rename into place: " + target_.string());
    }
    committed_ = true;
}

void
WriteFileAtomic(const std::filesystem::path& target, std::string_view bytes) {
    AtomicFile file(target);
    file.Write(bytes);
    file.Commit();
}

std::string
ReadFileBytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        Fail(ErrorType::IO_FAILURE, "cannot open: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        Fail(ErrorType::IO_FAILURE, "read failed: " + path.string());
    }
    return std::move(buffer).str();
}

}  // namespace vecpress
