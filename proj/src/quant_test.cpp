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

#include <cmath>
#include <limits>

#include "catch_amalgamated.hpp"
#include "test_util.h"
#include "vecpress/error.h"
#include "vecpress/quant.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/util/atomic_file.h"

using namespace vecpress;
using Catch::Matchers::WithinAbs;

namespace {

ErrorType
ErrorOf(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const VecpressError& e) {
        return e.type();
    }
    FAIL("expected a VecpressError");
    return ErrorType::IO_FAILURE;
}

float
RoundTripF16(float x) {
    return DequantizeF16(QuantizeF16(test::MakeSet({"a"}, 1, {x}))).data[0];
}

Int8Params
Range01() {
    return Int8Params{{0.0f}, {1.0f}};
}

std::uint8_t
Level(float x, const Int8Params& params) {
    return QuantizeInt8(test::MakeSet({"a"}, 1, {x}), params).payload[0];
}

}  // namespace

TEST_CASE("bytes per vector", "[quant]") {
    REQUIRE(BytesPerVector(Method::F32, 384) == 1536);
    REQUIRE(BytesPerVector(Method::F16, 384) == 768);
    REQUIRE(BytesPerVector(Method::INT8, 384) == 384);
    REQUIRE(BytesPerVector(Method::BINARY, 384) == 48);
    REQUIRE(BytesPerVector(Method::BINARY, 9) == 2);
    REQUIRE(BytesPerVector(Method::AE_LATENT, 96) == 384);
    REQUIRE(BytesPerVector(Method::AE_LATENT, 48) == 192);
}

TEST_CASE("f16 round trips", "[quant][f16]") {
    REQUIRE(RoundTripF16(1.0f) == 1.0f);
    REQUIRE(RoundTripF16(0.1f) == 0.0999755859375f);
    REQUIRE(RoundTripF16(1.0e5f) == 65504.0f);
    REQUIRE(RoundTripF16(-1.0e5f) == -65504.0f);
    REQUIRE(RoundTripF16(0.0f) == 0.0f);
    const auto set = QuantizeF16(test::MakeSet({"a", "b"}, 3, {1, 2, 3, 4, 5, 6}));
    REQUIRE(set.payload.size() == 12);
    REQUIRE(set.row_bytes() == 6);
}

TEST_CASE("f16 relative error bound", "[quant][f16][property]") {
    Rng rng(20);
    EmbeddingSet set;
    set.dim = 1;
    for (int i = 0; i < 20000; ++i) {
        const double log_mag = -14.0 + rng.Uniform() * (std::log2(65504.0) + 14.0);
        const float x = static_cast<float>(std::min(65504.0, std::exp2(log_mag)) * (rng.Below(2) ? 1 : -1));
        set.ids.push_back("v" + std::to_string(i));
        set.data.push_back(x);
    }
    const auto back = DequantizeF16(QuantizeF16(set));
    for (std::size_t i = 0; i < set.data.size(); ++i) {
        const double x = set.data[i];
        REQUIRE(std::fabs(back.data[i] - x) / std::fabs(x) <= std::exp2(-11));
    }
}

TEST_CASE("int8 calibration", "[quant][int8]") {
    const auto params = CalibrateInt8(test::MakeSet({"a", "b"}, 2, {0, 2, 1, 4}));
    REQUIRE(params.mins == std::vector<float>{0, 2});
    REQUIRE(params.maxs == std::vector<float>{1, 4});
    const auto single = CalibrateInt8(test::MakeSet({"a"}, 2, {3, -1}));
    REQUIRE(single.mins == single.maxs);
    REQUIRE(ErrorOf([] { CalibrateInt8(EmbeddingSet{}); }) == ErrorType::EMPTY_SET);
}

TEST_CASE("int8 levels", "[quant][int8]") {
    const auto params = Range01();
    REQUIRE(Level(0.0f, params) == 0);
    REQUIRE(Level(1.0f, params) == 255);
    REQUIRE(Level(0.5f, params) == 128);
    REQUIRE(Level(-3.0f, params) == 0);
    REQUIRE(Level(7.0f, params) == 255);
    const Int8Params flat{{2.0f}, {2.0f}};
    REQUIRE(Level(2.0f, flat) == 0);
    REQUIRE(Level(9.0f, flat) == 0);
    REQUIRE(ErrorOf([] { QuantizeInt8(test::MakeSet({"a"}, 2, {0, 0}), Range01()); }) == ErrorType::DIM_MISMATCH);
}

TEST_CASE("int8 dequantization", "[quant][int8]") {
    CompressedSet set;
    set.method = Method::INT8;
    set.dim = 1;
    set.ids = {"a", "b", "c"};
    set.payload = {0, 255, 128};
    const auto out = DequantizeInt8(set, Range01());
    REQUIRE(out.data[0] == 0.0f);
    REQUIRE(out.data[1] == 1.0f);
    REQUIRE_THAT(out.data[2], WithinAbs(128.0 / 255.0, 1e-7));
    const Int8Params flat{{2.5f}, {2.5f}};
    set.payload = {0, 0, 0};
    REQUIRE(DequantizeInt8(set, flat).data[0] == 2.5f);
    set.payload.pop_back();
    REQUIRE(ErrorOf([&] { DequantizeInt8(set, Range01()); }) == ErrorType::CORRUPT_RECORD);
}

TEST_CASE("int8 reconstruction error bound", "[quant][int8][property]") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        auto set = test::RandomSet(rng, 200, 37);
        for (auto& v : set.data) {
            v *= 0.4f;
        }
        const auto params = CalibrateInt8(set);
        const auto back = DequantizeInt8(QuantizeInt8(set, params), params);
        for (std::size_t i = 0; i < set.data.size(); ++i) {
            const std::size_t d = i % set.dim;
            const double bound = (static_cast<double>(params.maxs[d]) - params.mins[d]) / 510.0 + 1e-7;
            REQUIRE(std::fabs(static_cast<double>(back.data[i]) - set.data[i]) <= bound);
        }
    }
}

TEST_CASE("binary packing", "[quant][binary]") {
    const auto packed = QuantizeBinary(test::MakeSet({"a"}, 3, {0.3f, -0.2f, 0.0f}));
    REQUIRE(packed.payload == std::vector<std::uint8_t>{0x01});
    REQUIRE(DequantizeBinary(packed).data == std::vector<float>{1, -1, -1});
    const auto ones = QuantizeBinary(test::MakeSet({"a"}, 8, {1, 2, 3, 4, 5, 6, 7, 8}));
    REQUIRE(ones.payload == std::vector<std::uint8_t>{0xff});
    Rng rng(22);
    REQUIRE(QuantizeBinary(test::RandomSet(rng, 5, 384)).payload.size() == 5 * 48);
}

TEST_CASE("binary scale invariance", "[quant][binary][property]") {
    Rng rng(23);
    for (int i = 0; i < 500; ++i) {
        auto set = test::RandomSet(rng, 1, 1 + rng.Below(70));
        const float c = static_cast<float>(std::exp(rng.Uniform() * 12.0 - 6.0));
        auto scaled = set;
        for (auto& v : scaled.data) {
            v *= c;
        }
        REQUIRE(QuantizeBinary(set).payload == QuantizeBinary(scaled).payload);
    }
}

TEST_CASE("compress dispatches on method", "[quant]") {
    Rng rng(24);
    const auto set = test::RandomSet(rng, 10, 16);
    REQUIRE(Decompress(Compress(set, Method::F16)).dim == 16);
    const auto int8 = Compress(set, Method::INT8);
    REQUIRE(int8.int8.has_value());
    REQUIRE(*int8.int8 == CalibrateInt8(set));
    REQUIRE(ErrorOf([&] { Compress(set, Method::F32); }) == ErrorType::METHOD_MISMATCH);
    REQUIRE(ErrorOf([&] { DequantizeF16(int8); }) == ErrorType::METHOD_MISMATCH);
    CompressedSet latent;
    latent.method = Method::AE_LATENT;
    REQUIRE(ErrorOf([&] { Decompress(latent); }) == ErrorType::METHOD_MISMATCH);
}

TEST_CASE("codecs match across kernel tables", "[quant][simd]") {
    Rng rng(25);
    const auto set = test::RandomSet(rng, 300, 45);
    const auto& original = simd::Active();
    simd::SetActive(simd::ScalarKernels());
    const auto f16 = QuantizeF16(set);
    const auto int8 = Compress(set, Method::INT8);
    const auto bin = QuantizeBinary(set);
    const auto back = Decompress(int8);
    simd::SetActive(original);
    REQUIRE(QuantizeF16(set) == f16);
    REQUIRE(Compress(set, Method::INT8) == int8);
    REQUIRE(QuantizeBinary(set) == bin);
    REQUIRE(Decompress(int8) == back);
}

TEST_CASE("container round trip", "[quant][container]") {
    test::TempDir dir;
    Rng rng(26);
    const auto set = test::RandomSet(rng, 7, 384);
    for (Method method : {Method::F16, Method::INT8, Method::BINARY}) {
        const auto compressed = Compress(set, method);
        WriteContainer(compressed, dir / "c.vqc", dir / "c.ids");
        REQUIRE(ReadContainer(dir / "c.vqc", dir / "c.ids") == compressed);
        const std::size_t header = 13 + (method == Method::INT8 ? 8 * 384 : 0);
        REQUIRE(std::filesystem::file_size(dir / "c.vqc") == header + 7 * BytesPerVector(method, 384));
    }
    const auto bytes = SerializeContainer(Compress(set, Method::F16));
    REQUIRE(ErrorOf([&] { ParseContainer(bytes.substr(0, bytes.size() - 1), set.ids); }) ==
            ErrorType::CORRUPT_RECORD);
    REQUIRE(ErrorOf([&] { ParseContainer("XXXX" + bytes.substr(4), set.ids); }) == ErrorType::CORRUPT_RECORD);
    REQUIRE(ErrorOf([&] { ParseContainer(bytes, {"a"}); }) == ErrorType::ID_COUNT_MISMATCH);
}
