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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vecpress/quant.h"
#include "vecpress/types.h"

namespace vecpress {

/// Autoencoder  input -> hidden -> ReLU -> latent  |  latent -> hidden ->
/// ReLU -> input. Neither the latent nor the output layer has an activation.
struct AeConfig {
    std::size_t input_dim = 384;
    std::size_t hidden_dim = 1024;
    std::size_t latent_dim = 96;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;

    void
    Validate() const;
};

/// Dense layer y = x * W^T + b with W stored out x in, row-major.
template <typename T>
struct Dense {
    std::size_t out = 0;
    std::size_t in = 0;
    std::vector<T> weight;
    std::vector<T> bias;

    Dense() = default;
    Dense(std::size_t out_dim, std::size_t in_dim)
        : out(out_dim), in(in_dim), weight(out_dim * in_dim, T(0)), bias(out_dim, T(0)) {
    }

    bool
    operator==(const Dense&) const = default;
};

// Layer order: 0 encoder hidden, 1 latent, 2 decoder hidden, 3 output.
template <typename T>
struct AeNet {
    std::array<Dense<T>, 4> layers;

    AeNet() = default;
    AeNet(std::size_t input_dim, std::size_t hidden_dim, std::size_t latent_dim)
        : layers{Dense<T>(hidden_dim, input_dim),
                 Dense<T>(latent_dim, hidden_dim),
                 Dense<T>(hidden_dim, latent_dim),
                 Dense<T>(input_dim, hidden_dim)} {
    }

    std::size_t
    input_dim() const {
        return layers[0].in;
    }
    std::size_t
    hidden_dim() const {
        return layers[0].out;
    }
    std::size_t
    latent_dim() const {
        return layers[1].out;
    }

    /// W1, b1, W2, b2, W3, b3, W4, b4.
    std::array<std::span<T>, 8>
    tensors();
    std::array<std::span<const T>, 8>
    tensors() const;

    bool
    operator==(const AeNet&) const = default;
};

using AeModel = AeNet<float>;

/// Fan-in scaled Gaussian weights (sqrt(2/fan_in) ahead of a ReLU,
/// sqrt(1/fan_in) otherwise), zero biases.
template <typename T>
AeNet<T>
InitAeNet(std::size_t input_dim, std::size_t hidden_dim, std::size_t latent_dim, std::uint64_t seed);

template <typename U, typename T>
AeNet<U>
CastNet(const AeNet<T>& net);

/// Activations kept for the backward pass. All matrices are rows x width.
template <typename T>
struct ForwardCache {
    std::size_t rows = 0;
    std::vector<T> pre_hidden;  // encoder hidden, before ReLU
    std::vector<T> hidden;
    std::vector<T> latent;
    std::vector<T> pre_dec_hidden;
    std::vector<T> dec_hidden;
    std::vector<T> recon;
};

/// `batch` holds rows x input_dim values.
template <typename T>
ForwardCache<T>
Forward(const AeNet<T>& net, std::span<const T> batch);

/// Mean over every component of (recon - target)^2.
template <typename T>
double
MseLoss(std::span<const T> recon, std::span<const T> target);

/// Exact gradient of MseLoss(recon, batch) for the cached forward pass.
/// The ReLU derivative at 0 is taken as 0.
template <typename T>
AeNet<T>
Backward(const AeNet<T>& net, std::span<const T> batch, const ForwardCache<T>& cache);

template <typename T>
struct AdamState {
    AeNet<T> first_moment;
    AeNet<T> second_moment;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState
    For(const AeNet<T>& net, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
};

/// One bias-corrected Adam update. Throws NON_FINITE_GRADIENT (leaving net
/// and state untouched) if any gradient component is not finite.
template <typename T>
void
AdamStep(AeNet<T>& net, const AeNet<T>& grads, AdamState<T>& state, double learning_rate);

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;

    bool
    operator==(const EpochStats&) const = default;
};

struct TrainingLog {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    double best_val_mse = 0.0;

    std::string
    ToCsv() const;

    bool
    operator==(const TrainingLog&) const = default;
};

/// Seeded train/validation split, shuffled mini-batches, early stopping on
/// validation MSE. Returns the parameters with the best validation MSE.
std::pair<AeModel, TrainingLog>
TrainAutoencoder(const EmbeddingSet& corpus, const AeConfig& config);

/// Validation-style MSE of the full forward pass over every row of `set`.
double
ReconstructionMse(const AeModel& model, const EmbeddingSet& set);

EmbeddingSet
Encode(const AeModel& model, const EmbeddingSet& set);

EmbeddingSet
Decode(const AeModel& model, const EmbeddingSet& latent);

/// Decode(Encode(set)).
EmbeddingSet
Reconstruct(const AeModel& model, const EmbeddingSet& set);

/// Latent rows packaged as an AE_LATENT compressed set.
CompressedSet
EncodeCompressed(const AeModel& model, const EmbeddingSet& set);

EmbeddingSet
DecodeCompressed(const AeModel& model, const CompressedSet& set);

// Model file: "VAE1", u32 input_dim, hidden_dim, latent_dim, then W1, b1,
// W2, b2, W3, b3, W4, b4 as little-endian float32, row-major.

std::string
SerializeModel(const AeModel& model);

AeModel
ParseModel(std::string_view bytes);

void
WriteModel(const AeModel& model, const std::filesystem::path& path);

AeModel
ReadModel(const std::filesystem::path& path);

}  // namespace vecpress
