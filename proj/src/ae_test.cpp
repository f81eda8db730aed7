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
#include "vecpress/ae.h"
#include "vecpress/error.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/util/atomic_file.h"

using namespace vecpress;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

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

AeNet<double>
ScalarIdentityNet() {
    AeNet<double> net(1, 1, 1);
    for (auto& layer : net.layers) {
        layer.weight = {1.0};
    }
    return net;
}

double
Loss(const AeNet<double>& net, const std::vector<double>& batch) {
    const auto cache = Forward<double>(net, batch);
    return MseLoss<double>(cache.recon, batch);
}

// Points on a random 2-dim plane through the origin of R^8.
EmbeddingSet
PlaneData(std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> basis(16);
    for (auto& b : basis) {
        b = rng.Normal() * 0.5;
    }
    EmbeddingSet set;
    set.dim = 8;
    for (std::size_t i = 0; i < rows; ++i) {
        const double z0 = rng.Normal(), z1 = rng.Normal();
        set.ids.push_back("p" + std::to_string(i));
        for (std::size_t d = 0; d < 8; ++d) {
            set.data.push_back(static_cast<float>(basis[2 * d] * z0 + basis[2 * d + 1] * z1));
        }
    }
    return set;
}

AeConfig
PlaneConfig(std::size_t latent) {
    AeConfig config;
    config.input_dim = 8;
    config.hidden_dim = 64;
    config.latent_dim = latent;
    config.batch_size = 32;
    config.max_epochs = 150;
    config.patience = 20;
    config.learning_rate = 3e-3;
    config.seed = 99;
    return config;
}

}  // namespace

TEST_CASE("forward pass hand traces", "[ae][forward]") {
    SECTION("zero network") {
        const AeNet<double> net(4, 6, 2);
        const std::vector<double> x{1, -2, 3, 4};
        const auto cache = Forward<double>(net, x);
        REQUIRE(cache.latent == std::vector<double>{0, 0});
        REQUIRE(cache.recon == std::vector<double>(4, 0.0));
    }
    SECTION("scalar identity chain") {
        const auto net = ScalarIdentityNet();
        const std::vector<double> pos{2.0};
        auto cache = Forward<double>(net, pos);
        REQUIRE(cache.latent[0] == 2.0);
        REQUIRE(cache.recon[0] == 2.0);
        const std::vector<double> neg{-2.0};
        cache = Forward<double>(net, neg);
        REQUIRE(cache.latent[0] == 0.0);
        REQUIRE(cache.recon[0] == 0.0);
    }
    SECTION("shape errors") {
        const AeNet<double> net(4, 6, 2);
        const std::vector<double> x{1, 2, 3};
        REQUIRE(ErrorOf([&] { Forward<double>(net, x); }) == ErrorType::SHAPE_MISMATCH);
    }
}

TEST_CASE("mse loss", "[ae][loss]") {
    const std::vector<double> a{1, 3}, b{0, 1}, ones{1, 1}, zeros{0, 0};
    REQUIRE(MseLoss<double>(a, a) == 0.0);
    REQUIRE(MseLoss<double>(zeros, ones) == 1.0);
    REQUIRE(MseLoss<double>(a, b) == 2.5);
    const std::vector<double> short_one{1};
    REQUIRE(ErrorOf([&] { MseLoss<double>(a, short_one); }) == ErrorType::SHAPE_MISMATCH);
}

TEST_CASE("backward matches central differences", "[ae][backward]") {
    auto net = InitAeNet<double>(4, 6, 2, 5);
    Rng rng(6);
    for (auto tensor : net.tensors()) {
        for (auto& v : tensor) {
            v += 0.1 * rng.Normal();
        }
    }
    std::vector<double> batch(3 * 4);
    for (auto& v : batch) {
        v = rng.Normal();
    }
    const auto grads = Backward<double>(net, batch, Forward<double>(net, batch));
    const auto analytic = grads.tensors();
    auto params = net.tensors();
    const double h = 1e-6;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            const double saved = params[t][i];
            params[t][i] = saved + h;
            const double up = Loss(net, batch);
            params[t][i] = saved - h;
            const double down = Loss(net, batch);
            params[t][i] = saved;
            const double numeric = (up - down) / (2 * h);
            const double err = std::fabs(analytic[t][i] - numeric) /
                               std::max({std::fabs(analytic[t][i]), std::fabs(numeric), 1e-6});
            INFO("tensor " << t << " index " << i);
            REQUIRE(err <= 1e-4);
        }
    }
}

TEST_CASE("gradient invariants", "[ae][backward]") {
    SECTION("zero input and zero biases give zero first-layer weight gradients") {
        const auto net = InitAeNet<double>(4, 6, 2, 7);
        const std::vector<double> batch(8, 0.0);
        const auto grads = Backward<double>(net, batch, Forward<double>(net, batch));
        for (double g : grads.layers[0].weight) {
            REQUIRE(g == 0.0);
        }
    }
    SECTION("duplicating rows leaves the mean-loss gradient unchanged") {
        const auto net = InitAeNet<double>(4, 6, 2, 8);
        Rng rng(9);
        std::vector<double> batch(2 * 4);
        for (auto& v : batch) {
            v = rng.Normal();
        }
        std::vector<double> doubled = batch;
        doubled.insert(doubled.end(), batch.begin(), batch.end());
        const auto g1 = Backward<double>(net, batch, Forward<double>(net, batch)).tensors();
        const auto g2 = Backward<double>(net, doubled, Forward<double>(net, doubled)).tensors();
        for (std::size_t t = 0; t < g1.size(); ++t) {
            for (std::size_t i = 0; i < g1[t].size(); ++i) {
                REQUIRE_THAT(g2[t][i], WithinAbs(g1[t][i], 1e-12));
            }
        }
    }
}

TEST_CASE("adam updates", "[ae][adam]") {
    const double lr = 1e-3;
    SECTION("first step moves by lr |g| / (|g| + eps)") {
        for (double g : {0.5, -3.0, 1e-9}) {
            auto net = ScalarIdentityNet();
            AeNet<double> grads(1, 1, 1);
            for (auto tensor : grads.tensors()) {
                std::fill(tensor.begin(), tensor.end(), g);
            }
            auto state = AdamState<double>::For(net);
            AdamStep(net, grads, state, lr);
            const double expected = lr * std::fabs(g) / (std::fabs(g) + 1e-8);
            REQUIRE_THAT(1.0 - net.layers[0].weight[0], WithinRel(std::copysign(expected, g), 1e-9));
            REQUIRE(state.step == 1);
        }
    }
    SECTION("zero gradient leaves parameters unchanged") {
        auto net = ScalarIdentityNet();
        const auto before = net;
        auto state = AdamState<double>::For(net);
        AdamStep(net, AeNet<double>(1, 1, 1), state, lr);
        REQUIRE(net == before);
        REQUIRE(state.step == 1);
    }
    SECTION("non-finite gradient is rejected before any update") {
        auto net = ScalarIdentityNet();
        const auto before = net;
        AeNet<double> grads(1, 1, 1);
        grads.layers[3].bias[0] = std::numeric_limits<double>::quiet_NaN();
        auto state = AdamState<double>::For(net);
        REQUIRE(ErrorOf([&] { AdamStep(net, grads, state, lr); }) == ErrorType::NON_FINITE_GRADIENT);
        REQUIRE(net == before);
        REQUIRE(state.step == 0);
    }
}

TEST_CASE("training recovers a linear subspace", "[ae][train]") {
    const auto data = PlaneData(1500, 31);
    const auto [model2, log2] = TrainAutoencoder(data, PlaneConfig(2));
    INFO("best epoch " << log2.best_epoch);
    REQUIRE(log2.best_val_mse <= 1e-3);
    const auto recon = Reconstruct(model2, data);
    for (std::size_t i = 0; i < data.count(); ++i) {
        double sq = 0.0;
        for (std::size_t d = 0; d < data.dim; ++d) {
            const double diff = recon.row(i)[d] - data.row(i)[d];
            sq += diff * diff;
        }
        REQUIRE(std::sqrt(sq / data.dim) <= 0.05);
    }
    const auto [model8, log8] = TrainAutoencoder(data, PlaneConfig(8));
    REQUIRE(log8.best_val_mse <= log2.best_val_mse + 5e-4);
    REQUIRE(log2.epochs.size() >= log2.best_epoch);
    REQUIRE(log2.ToCsv().rfind("epoch,train_mse,val_mse\n1,", 0) == 0);
}

TEST_CASE("training is deterministic", "[ae][train]") {
    auto config = PlaneConfig(2);
    config.max_epochs = 5;
    const auto data = PlaneData(300, 32);
    const auto a = TrainAutoencoder(data, config);
    const auto b = TrainAutoencoder(data, config);
    REQUIRE(a.first == b.first);
    REQUIRE(a.second == b.second);
    config.seed = 100;
    REQUIRE_FALSE(TrainAutoencoder(data, config).first == a.first);

    // Thread count and kernel table do not change the result.
    const auto& original = simd::Active();
    simd::SetActive(simd::ScalarKernels());
    config.seed = 99;
    const auto scalar = TrainAutoencoder(data, config);
    simd::SetActive(original);
    REQUIRE(scalar.first == a.first);
}

TEST_CASE("training preconditions", "[ae][train]") {
    auto config = PlaneConfig(2);
    REQUIRE(ErrorOf([&] { TrainAutoencoder(PlaneData(1, 1), config); }) == ErrorType::TOO_FEW_ROWS);
    config.input_dim = 9;
    REQUIRE(ErrorOf([&] { TrainAutoencoder(PlaneData(10, 1), config); }) == ErrorType::DIM_MISMATCH);
    config = PlaneConfig(2);
    config.validation_fraction = 1.0;
    REQUIRE(ErrorOf([&] { config.Validate(); }) == ErrorType::INVALID_CONFIG);
    config = PlaneConfig(0);
    REQUIRE(ErrorOf([&] { config.Validate(); }) == ErrorType::INVALID_CONFIG);
}

TEST_CASE("inference helpers", "[ae][apply]") {
    Rng rng(40);
    const auto set = test::RandomSet(rng, 300, 16);
    const AeModel model = InitAeNet<float>(16, 32, 4, 41);
    const auto latent = Encode(model, set);
    REQUIRE(latent.dim == 4);
    REQUIRE(latent.ids == set.ids);
    REQUIRE(Decode(model, latent) == Reconstruct(model, set));
    const auto compressed = EncodeCompressed(model, set);
    REQUIRE(compressed.row_bytes() == 16);
    REQUIRE(DecodeCompressed(model, compressed) == Reconstruct(model, set));
    REQUIRE(BytesPerVector(Method::AE_LATENT, 96) == 384);

    const AeModel zero(16, 32, 4);
    for (float v : Reconstruct(zero, set).data) {
        REQUIRE(v == 0.0f);
    }
    REQUIRE(ErrorOf([&] { Encode(model, test::RandomSet(rng, 2, 5)); }) == ErrorType::DIM_MISMATCH);
    REQUIRE(ErrorOf([&] { ReconstructionMse(model, test::RandomSet(rng, 2, 5)); }) == ErrorType::DIM_MISMATCH);
    REQUIRE(ReconstructionMse(zero, set) > 0.0);
}

TEST_CASE("model files", "[ae][io]") {
    test::TempDir dir;
    const AeModel model = InitAeNet<float>(6, 10, 3, 42);
    WriteModel(model, dir / "m.vae");
    REQUIRE(ReadModel(dir / "m.vae") == model);
    const std::string bytes = SerializeModel(model);
    REQUIRE(bytes.size() == 16 + 4 * (10 * 6 + 10 + 3 * 10 + 3 + 10 * 3 + 10 + 6 * 10 + 6));
    REQUIRE(ErrorOf([&] { ParseModel(bytes.substr(0, bytes.size() - 4)); }) == ErrorType::CORRUPT_RECORD);
    REQUIRE(ErrorOf([&] { ParseModel("NOPE" + bytes.substr(4)); }) == ErrorType::CORRUPT_RECORD);
}
