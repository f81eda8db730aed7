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

#include "vecpress/quant.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "vecpress/embedding_io.h"
#include "vecpress/error.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/util/atomic_file.h"
#include "vecpress/util/bytes.h"
#include "vecpress/util/parallel.h"

namespace vecpress {

namespace {

constexpr std::string_view kContainerMagic = "VQC1";
constexpr std::size_t kRowGrain = 256;

std::uint8_t
ContainerTag(Method method) {
    switch (method) {
        case Method::F16:
            return 0;
        case Method::INT8:
            return 1;
        case Method::BINARY:
            return 2;
        default:
            Fail(ErrorType::METHOD_MISMATCH,
                 "method " + std::string(MethodName(method)) + " has no container encoding");
    }
}

Method
MethodFromTag(std::uint8_t tag) {
    switch (tag) {
        case 0:
            return Method::F16;
        case 1:
            return Method::INT8;
        case 2:
            return Method::BINARY;
        default:
            Fail(ErrorType::CORRUPT_RECORD, "unknown container method tag " + std::to_string(tag));
    }
}

void
RequireMethod(const CompressedSet& set, Method expected) {
    VECPRESS_CHECK(set.method == expected,
                   METHOD_MISMATCH,
                   "expected " + std::string(MethodName(expected)) + " payload, got " +
                       std::string(MethodName(set.method)));
    VECPRESS_CHECK(set.payload.size() == set.count() * set.row_bytes(),
                   CORRUPT_RECORD,
                   "payload size does not match count x bytes per vector");
}

CompressedSet
EmptyLike(const EmbeddingSet& set, Method method) {
    set.Validate();
    CompressedSet out;
    out.method = method;
    out.dim = set.dim;
    out.ids = set.ids;
    if (set.count() > 0) {
        out.payload.resize(set.count() * BytesPerVector(method, set.dim));
    }
    return out;
}

EmbeddingSet
DecodedShell(const CompressedSet& set) {
    EmbeddingSet out;
    out.ids = set.ids;
    out.dim = set.dim;
    out.data.resize(set.count() * set.dim);
    return out;
}

struct AffineTables {
    std::vector<double> lows;
    std::vector<double> ranges;
};

AffineTables
MakeAffine(const Int8Params& params) {
    AffineTables tables;
    tables.lows.resize(params.dim());
    tables.ranges.resize(params.dim());
    for (std::size_t d = 0; d < params.dim(); ++d) {
        tables.lows[d] = params.mins[d];
        tables.ranges[d] = static_cast<double>(params.maxs[d]) - static_cast<double>(params.mins[d]);
    }
    return tables;
}

}  // namespace

std::string_view
MethodName(Method method) {
    switch (method) {
        case Method::F32:
            return "f32";
        case Method::F16:
            return "f16";
        case Method::INT8:
            return "int8";
        case Method::BINARY:
            return "binary";
        case Method::AE_LATENT:
            return "ae-latent";
    }
    return "unknown";
}

std::size_t
BytesPerVector(Method method, std::size_t dim) {
    switch (method) {
        case Method::F32:
        case Method::AE_LATENT:
            return 4 * dim;
        case Method::F16:
            return 2 * dim;
        case Method::INT8:
            return dim;
        case Method::BINARY:
            return (dim + 7) / 8;
    }
    return 0;
}

void
Int8Params::Validate() const {
    VECPRESS_CHECK(mins.size() == maxs.size(), DIM_MISMATCH, "int8 mins/maxs length differ");
    for (std::size_t d = 0; d < mins.size(); ++d) {
        VECPRESS_CHECK(std::isfinite(mins[d]) && std::isfinite(maxs[d]),
                       NON_FINITE_VALUE,
                       "non-finite int8 calibration range at dim " + std::to_string(d));
        VECPRESS_CHECK(mins[d] <= maxs[d],
                       CORRUPT_RECORD,
                       "int8 calibration min > max at dim " + std::to_string(d));
    }
}

CompressedSet
QuantizeF16(const EmbeddingSet& set) {
    CompressedSet out = EmptyLike(set, Method::F16);
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint16_t> halves(set.dim);
        for (std::size_t i = begin; i < end; ++i) {
            kernels.half_encode(set.row(i).data(), halves.data(), set.dim);
            std::uint8_t* dst = out.payload.data() + i * 2 * set.dim;
            for (std::size_t d = 0; d < set.dim; ++d) {
                dst[2 * d] = static_cast<std::uint8_t>(halves[d] & 0xffu);
                dst[2 * d + 1] = static_cast<std::uint8_t>(halves[d] >> 8);
            }
        }
    });
    return out;
}

EmbeddingSet
DequantizeF16(const CompressedSet& set) {
    RequireMethod(set, Method::F16);
    EmbeddingSet out = DecodedShell(set);
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint16_t> halves(set.dim);
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint8_t* src = set.payload.data() + i * 2 * set.dim;
            for (std::size_t d = 0; d < set.dim; ++d) {
                halves[d] = static_cast<std::uint16_t>(src[2 * d] | (src[2 * d + 1] << 8));
            }
            kernels.half_decode(halves.data(), out.row(i).data(), set.dim);
        }
    });
    return out;
}

Int8Params
CalibrateInt8(const EmbeddingSet& set) {
    set.Validate();
    VECPRESS_CHECK(set.count() > 0, EMPTY_SET, "cannot calibrate int8 on an empty set");
    Int8Params params;
    const auto first = set.row(0);
    params.mins.assign(first.begin(), first.end());
    params.maxs.assign(first.begin(), first.end());
    for (std::size_t i = 1; i < set.count(); ++i) {
        const auto row = set.row(i);
        for (std::size_t d = 0; d < set.dim; ++d) {
            params.mins[d] = std::min(params.mins[d], row[d]);
            params.maxs[d] = std::max(params.maxs[d], row[d]);
        }
    }
    return params;
}

CompressedSet
QuantizeInt8(const EmbeddingSet& set, const Int8Params& params) {
    params.Validate();
    VECPRESS_CHECK(set.count() == 0 || params.dim() == set.dim,
                   DIM_MISMATCH,
                   "int8 params have dim " + std::to_string(params.dim()) + ", set has " +
                       std::to_string(set.dim));
    CompressedSet out = EmptyLike(set, Method::INT8);
    out.int8 = params;
    if (set.count() == 0) {
        out.dim = params.dim();
        return out;
    }
    const AffineTables tables = MakeAffine(params);
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernels.u8_encode(set.row(i).data(),
                              tables.lows.data(),
                              tables.ranges.data(),
                              out.payload.data() + i * set.dim,
                              set.dim);
        }
    });
    return out;
}

EmbeddingSet
DequantizeInt8(const CompressedSet& set, const Int8Params& params) {
    RequireMethod(set, Method::INT8);
    params.Validate();
    VECPRESS_CHECK(params.dim() == set.dim,
                   DIM_MISMATCH,
                   "int8 params have dim " + std::to_string(params.dim()) + ", set has " +
                       std::to_string(set.dim));
    EmbeddingSet out = DecodedShell(set);
    const AffineTables tables = MakeAffine(params);
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernels.u8_decode(set.payload.data() + i * set.dim,
                              tables.lows.data(),
                              tables.ranges.data(),
                              out.row(i).data(),
                              set.dim);
        }
    });
    return out;
}

CompressedSet
QuantizeBinary(const EmbeddingSet& set) {
    CompressedSet out = EmptyLike(set, Method::BINARY);
    const std::size_t row_bytes = BytesPerVector(Method::BINARY, set.dim);
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernels.sign_pack(set.row(i).data(), out.payload.data() + i * row_bytes, set.dim);
        }
    });
    return out;
}

EmbeddingSet
DequantizeBinary(const CompressedSet& set) {
    RequireMethod(set, Method::BINARY);
    EmbeddingSet out = DecodedShell(set);
    const std::size_t row_bytes = set.row_bytes();
    const auto& kernels = simd::Active();
    ParallelFor(set.count(), kRowGrain, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernels.sign_unpack(set.payload.data() + i * row_bytes, out.row(i).data(), set.dim);
        }
    });
    return out;
}

CompressedSet
Compress(const EmbeddingSet& set, Method method, const Int8Params* params) {
    switch (method) {
        case Method::F16:
            return QuantizeF16(set);
        case Method::INT8:
            return params != nullptr ? QuantizeInt8(set, *params)
                                     : QuantizeInt8(set, CalibrateInt8(set));
        case Method::BINARY:
            return QuantizeBinary(set);
        default:
            Fail(ErrorType::METHOD_MISMATCH,
                 "method " + std::string(MethodName(method)) + " is not a quantization codec");
    }
}

EmbeddingSet
Decompress(const CompressedSet& set) {
    switch (set.method) {
        case Method::F16:
            return DequantizeF16(set);
        case Method::INT8:
            VECPRESS_CHECK(set.int8.has_value(), METHOD_MISMATCH, "int8 set carries no params");
            return DequantizeInt8(set, *set.int8);
        case Method::BINARY:
            return DequantizeBinary(set);
        default:
            Fail(ErrorType::METHOD_MISMATCH,
                 "method " + std::string(MethodName(set.method)) +
                     " cannot be decoded without its model");
    }
}

std::string
SerializeContainer(const CompressedSet& set) {
    const std::uint8_t tag = ContainerTag(set.method);
    VECPRESS_CHECK(set.payload.size() == set.count() * set.row_bytes(),
                   CORRUPT_RECORD,
                   "payload size does not match count x bytes per vector");
    std::string bytes(kContainerMagic);
    bytes.push_back(static_cast<char>(tag));
    AppendU32(bytes, static_cast<std::uint32_t>(set.dim));
    AppendU32(bytes, static_cast<std::uint32_t>(set.count()));
    if (set.method == Method::INT8) {
        VECPRESS_CHECK(set.int8.has_value() && set.int8->dim() == set.dim,
                       METHOD_MISMATCH,
                       "int8 container requires params of matching dim");
        for (float v : set.int8->mins) {
            AppendF32(bytes, v);
        }
        for (float v : set.int8->maxs) {
            AppendF32(bytes, v);
        }
    }
    bytes.append(reinterpret_cast<const char*>(set.payload.data()), set.payload.size());
    return bytes;
}

CompressedSet
ParseContainer(std::string_view bytes, std::vector<std::string> ids) {
    ByteCursor cursor(bytes);
    const char* magic = cursor.Take(4);
    VECPRESS_CHECK(magic != nullptr && std::string_view(magic, 4) == kContainerMagic,
                   CORRUPT_RECORD,
                   "not a VQC1 container");
    const char* tag = cursor.Take(1);
    const char* header = cursor.Take(8);
    VECPRESS_CHECK(tag != nullptr && header != nullptr, CORRUPT_RECORD, "truncated container header");
    CompressedSet set;
    set.method = MethodFromTag(static_cast<std::uint8_t>(*tag));
    set.dim = LoadU32(header);
    const std::size_t count = LoadU32(header + 4);
    VECPRESS_CHECK(ids.size() == count,
                   ID_COUNT_MISMATCH,
                   std::to_string(ids.size()) + " ids for " + std::to_string(count) + " vectors");
    if (set.method == Method::INT8) {
        const char* ranges = cursor.Take(8 * set.dim);
        VECPRESS_CHECK(ranges != nullptr, CORRUPT_RECORD, "truncated int8 params");
        Int8Params params;
        params.mins.resize(set.dim);
        params.maxs.resize(set.dim);
        for (std::size_t d = 0; d < set.dim; ++d) {
            params.mins[d] = LoadF32(ranges + 4 * d);
            params.maxs[d] = LoadF32(ranges + 4 * (set.dim + d));
        }
        params.Validate();
        set.int8 = std::move(params);
    }
    const std::size_t payload_size = count * set.row_bytes();
    VECPRESS_CHECK(cursor.remaining() == payload_size,
                   CORRUPT_RECORD,
                   "container payload is " + std::to_string(cursor.remaining()) + " bytes, expected " +
                       std::to_string(payload_size));
    const char* payload = cursor.Take(payload_size);
    set.payload.assign(reinterpret_cast<const std::uint8_t*>(payload),
                       reinterpret_cast<const std::uint8_t*>(payload) + payload_size);
    set.ids = std::move(ids);
    return set;
}

void
WriteContainer(const CompressedSet& set,
               const std::filesystem::path& path,
               const std::filesystem::path& ids_path) {
    const std::string bytes = SerializeContainer(set);
    std::string id_text;
    for (const auto& id : set.ids) {
        id_text += id;
        id_text += '\n';
    }
    AtomicFile container(path);
    AtomicFile ids(ids_path);
    container.Write(bytes);
    ids.Write(id_text);
    container.Finish();
    ids.Finish();
    container.Commit();
    ids.Commit();
}

CompressedSet
ReadContainer(const std::filesystem::path& path, const std::filesystem::path& ids_path) {
    return ParseContainer(ReadFileBytes(path), ReadIdLines(ReadFileBytes(ids_path)));
}

}  // namespace vecpress
