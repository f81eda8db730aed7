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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace vecpress {

// Little-endian scalar encoding for the binary file formats.

inline void
AppendU32(std::string& out, std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<char>((value >> shift) & 0xffu));
    }
}

inline void
AppendF32(std::string& out, float value) {
    AppendU32(out, std::bit_cast<std::uint32_t>(value));
}

inline std::uint32_t
LoadU32(const char* p) {
    std::uint32_t value = 0;
    for (int i = 3; i >= 0; --i) {
        value = (value << 8) | static_cast<unsigned char>(p[i]);
    }
    return value;
}

inline float
LoadF32(const char* p) {
    return std::bit_cast<float>(LoadU32(p));
}

/// Sequential reader over a byte buffer; Take() returns nullptr on underrun.
class ByteCursor {
public:
    explicit ByteCursor(std::string_view bytes) : bytes_(bytes) {
    }

    const char*
    Take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            return nullptr;
        }
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::size_t
    remaining() const {
        return bytes_.size() - pos_;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace vecpress
