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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecpress/types.h"

namespace vecpress {

enum class Method : std::uint8_t {
    F32,
    F16,
    INT8,
    BINARY,
    AE_LATENT,
};

std::string_view
MethodName(Method method);

/// Storage cost of one vector. For AE_LATENT, `dim` is the latent width.
std::size_t
BytesPerVector(Method method, std::size_t dim);

/// Per-dimension calibration range for scalar int8 quantization.
struct Int8Params {
    std::vector<float> mins;
    std::vector<float> maxs;

    std::size_t
    dim() const {
        return mins.size();
    }

    void
    Validate() const;

    bool
    operator==(const Int8Params&) const = default;
};

/// Compressed rows plus whatever is needed to decode them. For AE_LATENT the
/// payload holds latent_dim float32 values per row and decoding requires the
/// autoencoder that produced them.
struct CompressedSet {
    Method method = Method::F16;
    std::size_t dim = 0;  // original dimension
    std::size_t latent_dim = 0;  // AE_LATENT only
    std::vector<std::string> ids;
    std::vector<std::uint8_t> payload;
    std::optional<Int8Params> int8;

    std::size_t
    count() const {
        return ids.size();
    }

    std::size_t
    row_bytes() const {
        return BytesPerVector(method, method == Method::AE_LATENT ? latent_dim : dim);
    }

    bool
    operator==(const CompressedSet&) const = default;
};

CompressedSet
QuantizeF16(const EmbeddingSet& set);

EmbeddingSet
DequantizeF16(const CompressedSet& set);

/// Per-dimension min/max over every row.
Int8Params
CalibrateInt8(const EmbeddingSet& set);

/// level = round_half_even(clamp((x - min) / (max - min), 0, 1) * 255);
/// constant dimensions map to level 0.
CompressedSet
QuantizeInt8(const EmbeddingSet& set, const Int8Params& params);

/// x = min + level / 255 * (max - min).
EmbeddingSet
DequantizeInt8(const CompressedSet& set, const Int8Params& params);

/// bit = 1 iff x > 0, packed little-endian within each byte.
CompressedSet
QuantizeBinary(const EmbeddingSet& set);

/// bit 1 -> +1, bit 0 -> -1.
EmbeddingSet
DequantizeBinary(const CompressedSet& set);

/// Compresses with F16, INT8 or BINARY. INT8 uses `params` when given,
/// otherwise calibrates on `set` itself.
CompressedSet
Compress(const EmbeddingSet& set, Method method, const Int8Params* params = nullptr);

/// Decodes F16, INT8 (using the embedded params) or BINARY.
EmbeddingSet
Decompress(const CompressedSet& set);

// Container: "VQC1", u8 method tag (0=F16, 1=INT8, 2=BINARY), u32 dim,
// u32 count, INT8 only: dim f32 mins then dim f32 maxs, then the payload.
// Ids live in a sidecar like fvecs.

std::string
SerializeContainer(const CompressedSet& set);

/// `ids` supplies the sidecar contents.
CompressedSet
ParseContainer(std::string_view bytes, std::vector<std::string> ids);

void
WriteContainer(const CompressedSet& set,
               const std::filesystem::path& path,
               const std::filesystem::path& ids_path);

CompressedSet
ReadContainer(const std::filesystem::path& path, const std::filesystem::path& ids_path);

}  // namespace vecpress
