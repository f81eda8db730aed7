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

#include <filesystem>
#include <fstream>
#include <string_view>

namespace vecpress {

// Writes go to a sibling temporary file that is renamed over the target on
// Commit(). An uncommitted AtomicFile removes its temporary on destruction,
// so a failed write never leaves a partial output behind.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path target);
    ~AtomicFile();

    AtomicFile(const AtomicFile&) = delete;
    AtomicFile&
    operator=(const AtomicFile&) = delete;

    std::ofstream&
    stream() {
        return out_;
    }

    void
    Write(std::string_view bytes);

    /// Flushes and closes the temporary. Throws IO_FAILURE on error.
    void
    Finish();

    /// Renames into place. Calls Finish() if needed.
    void
    Commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool finished_ = false;
    bool committed_ = false;
};

void
WriteFileAtomic(const std::filesystem::path& target, std::string_view bytes);

std::string
ReadFileBytes(const std::filesystem::path& path);

}  // namespace vecpress
