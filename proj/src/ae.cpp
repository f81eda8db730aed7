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

#include "vecpress/ae.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <type_traits>

#include "vecpress/error.h"
#include "vecpress/simd/kernels.h"
#include "vecpress/simd/reference.h"
#include "vecpress/util/atomic_file.h"
#include "vecpress/util/bytes.h"
#include "vecpress/util/parallel.h"
#include "vecpress/util/rng.h"

namespace vecpress {

namespace {

constexpr std::string_view kModelMagic = "VAE1";
constexpr std::size_t kInferenceRows = 256;
constexpr std::size_t kGemmColumnBlock = 16;
constexpr std::size_t kParallelGemmWork = std::size_t{1} << 21;

template <typename T>
void
Gemm(std::size_t m,
     std::size_t n,
     std::size_t k,
     const T* a,
     std::size_t lda,
     const T* b,
     std::size_t ldb,
     T* c,
     std::size_t ldc) {
    auto columns = [&](std::size_t j0, std::size_t j1) {
        if constexpr (std::is_same_v<T, float>) {
            simd::Active().gemm(m, j1 - j0, k, a, lda, b + j0, ldb, c + j0, ldc);
        } else {
            simd::GemmReference<T>(m, j1 - j0, k, a, lda, b + j0, ldb, c + j0, ldc);
        }
    };
    if (m * n * k < kParallelGemmWork) {
        columns(0, n);
        return;
    }
    // Every output element is an independent chain, so splitting columns
    // across threads does not change results.
    const std::size_t blocks = (n + kGemmColumnBlock - 1) / kGemmColumnBlock;
    ParallelFor(blocks, 1, [&](std::size_t b0, std::size_t b1) {
        columns(b0 * kGemmColumnBlock, std::min(n, b1 * kGemmColumnBlock));
    });
}

template <typename T>
void
Transpose(std::size_t rows, std::size_t cols, const T* src, T* dst) {
    constexpr std::size_t kTile = 32;
    for (std::size_t r0 = 0; r0 < rows; r0 += kTile) {
        const std::size_t r1 = std::min(rows, r0 + kTile);
        for (std::size_t c0 = 0; c0 < cols; c0 += kTile) {
            const std::size_t c1 = std::min(cols, c0 + kTile);
            for (std::size_t r = r0; r < r1; ++r) {
                for (std::size_t c = c0; c < c1; ++c) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Weights transposed to in x out, the layout the forward GEMM consumes.
template <typename T>
struct PreparedNet {
    std::array<std::vector<T>, 4> weight_t;

    explicit PreparedNet(const AeNet<T>& net) {
        for (std::size_t l = 0; l < 4; ++l) {
            const auto& layer = net.layers[l];
            weight_t[l].resize(layer.weight.size());
            Transpose(layer.out, layer.in, layer.weight.data(), weight_t[l].data());
        }
    }
};

template <typename T>
void
Linear(const Dense<T>& layer, const std::vector<T>& weight_t, const T* x, std::size_t rows, T* y) {
    Gemm(rows, layer.out, layer.in, x, layer.in, weight_t.data(), layer.out, y, layer.out);
    for (std::size_t i = 0; i < rows; ++i) {
        T* row = y + i * layer.out;
        for (std::size_t j = 0; j < layer.out; ++j) {
            row[j] += layer.bias[j];
        }
    }
}

template <typename T>
void
Relu(const T* src, T* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] = src[i] > T(0) ? src[i] : T(0);
    }
}

template <typename T>
void
EncodeRows(const AeNet<T>& net,
           const PreparedNet<T>& prepared,
           const T* x,
           std::size_t rows,
           std::vector<T>& scratch,
           T* latent) {
    scratch.resize(rows * net.hidden_dim());
    Linear(net.layers[0], prepared.weight_t[0], x, rows, scratch.data());
    Relu(scratch.data(), scratch.data(), scratch.size());
    Linear(net.layers[1], prepared.weight_t[1], scratch.data(), rows, latent);
}

template <typename T>
void
DecodeRows(const AeNet<T>& net,
           const PreparedNet<T>& prepared,
           const T* latent,
           std::size_t rows,
           std::vector<T>& scratch,
           T* recon) {
    scratch.resize(rows * net.hidden_dim());
    Linear(net.layers[2], prepared.weight_t[2], latent, rows, scratch.data());
    Relu(scratch.data(), scratch.data(), scratch.size());
    Linear(net.layers[3], prepared.weight_t[3], scratch.data(), rows, recon);
}

/// dW = dY^T * X, db = column sums of dY.
template <typename T>
void
LayerGrads(const T* d_out,
           const T* input,
           std::size_t rows,
           Dense<T>& grad,
           std::vector<T>& scratch) {
    scratch.resize(rows * grad.out);
    Transpose(rows, grad.out, d_out, scratch.data());
    Gemm(grad.out, grad.in, rows, scratch.data(), rows, input, grad.in, grad.weight.data(), grad.in);
    std::fill(grad.bias.begin(), grad.bias.end(), T(0));
    for (std::size_t i = 0; i < rows; ++i) {
        const T* row = d_out + i * grad.out;
        for (std::size_t j = 0; j < grad.out; ++j) {
            grad.bias[j] += row[j];
        }
    }
}

/// d_in = d_out * W, then masked by (pre_activation > 0).
template <typename T>
void
BackpropThroughRelu(const Dense<T>& layer,
                    const T* d_out,
                    std::size_t rows,
                    const std::vector<T>& pre_activation,
                    std::vector<T>& d_in) {
    d_in.resize(rows * layer.in);
    Gemm(rows, layer.in, layer.out, d_out, layer.out, layer.weight.data(), layer.in, d_in.data(), layer.in);
    for (std::size_t i = 0; i < d_in.size(); ++i) {
        if (!(pre_activation[i] > T(0))) {
            d_in[i] = T(0);
        }
    }
}

void
CheckBatch(std::size_t width, std::size_t values) {
    VECPRESS_CHECK(width > 0 && values % width == 0,
                   SHAPE_MISMATCH,
                   "batch of " + std::to_string(values) + " values is not a multiple of input dim " +
                       std::to_string(width));
}

std::string
FormatDouble(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

}  // namespace

void
AeConfig::Validate() const {
    VECPRESS_CHECK(input_dim > 0 && hidden_dim > 0 && latent_dim > 0,
                   INVALID_CONFIG,
                   "autoencoder dimensions must be positive");
    VECPRESS_CHECK(learning_rate > 0.0 && std::isfinite(learning_rate),
                   INVALID_CONFIG,
                   "learning_rate must be positive");
    VECPRESS_CHECK(validation_fraction > 0.0 && validation_fraction < 1.0,
                   INVALID_CONFIG,
                   "validation_fraction must lie in (0, 1)");
    VECPRESS_CHECK(batch_size > 0 && max_epochs > 0, INVALID_CONFIG, "batch_size and max_epochs must be positive");
    VECPRESS_CHECK(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0,
                   INVALID_CONFIG,
                   "Adam requires 0 <= beta < 1 and epsilon > 0");
}

template <typename T>
std::array<std::span<T>, 8>
AeNet<T>::tensors() {
    return {std::span<T>(layers[0].weight), std::span<T>(layers[0].bias),
            std::span<T>(layers[1].weight), std::span<T>(layers[1].bias),
            std::span<T>(layers[2].weight), std::span<T>(layers[2].bias),
            std::span<T>(layers[3].weight), std::span<T>(layers[3].bias)};
}

template <typename T>
std::array<std::span<const T>, 8>
AeNet<T>::tensors() const {
    return {std::span<const T>(layers[0].weight), std::span<const T>(layers[0].bias),
            std::span<const T>(layers[1].weight), std::span<const T>(layers[1].bias),
            std::span<const T>(layers[2].weight), std::span<const T>(layers[2].bias),
            std::span<const T>(layers[3].weight), std::span<const T>(layers[3].bias)};
}

template <typename T>
AeNet<T>
InitAeNet(std::size_t input_dim, std::size_t hidden_dim, std::size_t latent_dim, std::uint64_t seed) {
    AeNet<T> net(input_dim, hidden_dim, latent_dim);
    Rng rng(seed);
    for (std::size_t l = 0; l < 4; ++l) {
        auto& layer = net.layers[l];
        const bool feeds_relu = (l == 0 || l == 2);
        const double stddev = std::sqrt((feeds_relu ? 2.0 : 1.0) / static_cast<double>(layer.in));
        for (auto& w : layer.weight) {
            w = static_cast<T>(stddev * rng.Normal());
        }
    }
    return net;
}

template <typename U, typename T>
AeNet<U>
CastNet(const AeNet<T>& net) {
    AeNet<U> out(net.input_dim(), net.hidden_dim(), net.latent_dim());
    const auto src = net.tensors();
    auto dst = out.tensors();
    for (std::size_t t = 0; t < src.size(); ++t) {
        std::transform(src[t].begin(), src[t].end(), dst[t].begin(), [](T v) {
            return static_cast<U>(v);
        });
    }
    return out;
}

template <typename T>
ForwardCache<T>
Forward(const AeNet<T>& net, std::span<const T> batch) {
    CheckBatch(net.input_dim(), batch.size());
    const std::size_t rows = batch.size() / net.input_dim();
    const PreparedNet<T> prepared(net);
    ForwardCache<T> cache;
    cache.rows = rows;
    cache.pre_hidden.resize(rows * net.hidden_dim());
    cache.hidden.resize(rows * net.hidden_dim());
    cache.latent.resize(rows * net.latent_dim());
    cache.pre_dec_hidden.resize(rows * net.hidden_dim());
    cache.dec_hidden.resize(rows * net.hidden_dim());
    cache.recon.resize(rows * net.input_dim());

    Linear(net.layers[0], prepared.weight_t[0], batch.data(), rows, cache.pre_hidden.data());
    Relu(cache.pre_hidden.data(), cache.hidden.data(), cache.hidden.size());
    Linear(net.layers[1], prepared.weight_t[1], cache.hidden.data(), rows, cache.latent.data());
    Linear(net.layers[2], prepared.weight_t[2], cache.latent.data(), rows, cache.pre_dec_hidden.data());
    Relu(cache.pre_dec_hidden.data(), cache.dec_hidden.data(), cache.dec_hidden.size());
    Linear(net.layers[3], prepared.weight_t[3], cache.dec_hidden.data(), rows, cache.recon.data());
    return cache;
}

template <typename T>
double
MseLoss(std::span<const T> recon, std::span<const T> target) {
    VECPRESS_CHECK(recon.size() == target.size(),
                   SHAPE_MISMATCH,
                   "reconstruction and target sizes differ");
    VECPRESS_CHECK(!recon.empty(), SHAPE_MISMATCH, "empty reconstruction");
    double sum = 0.0;
    for (std::size_t i = 0; i < recon.size(); ++i) {
        const double diff = static_cast<double>(recon[i]) - static_cast<double>(target[i]);
        sum += diff * diff;
    }
    return sum / static_cast<double>(recon.size());
}

template <typename T>
AeNet<T>
Backward(const AeNet<T>& net, std::span<const T> batch, const ForwardCache<T>& cache) {
    CheckBatch(net.input_dim(), batch.size());
    const std::size_t rows = batch.size() / net.input_dim();
    VECPRESS_CHECK(rows == cache.rows && cache.recon.size() == batch.size(),
                   SHAPE_MISMATCH,
                   "forward cache does not belong to this batch");
    AeNet<T> grads(net.input_dim(), net.hidden_dim(), net.latent_dim());
    std::vector<T> scratch;

    std::vector<T> d_recon(batch.size());
    const T scale = static_cast<T>(2.0 / static_cast<double>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        d_recon[i] = scale * (cache.recon[i] - batch[i]);
    }

    LayerGrads(d_recon.data(), cache.dec_hidden.data(), rows, grads.layers[3], scratch);
    std::vector<T> d_pre_dec;
    BackpropThroughRelu(net.layers[3], d_recon.data(), rows, cache.pre_dec_hidden, d_pre_dec);

    LayerGrads(d_pre_dec.data(), cache.latent.data(), rows, grads.layers[2], scratch);
    std::vector<T> d_latent(rows * net.latent_dim());
    Gemm(rows,
         net.latent_dim(),
         net.hidden_dim(),
         d_pre_dec.data(),
         net.hidden_dim(),
         net.layers[2].weight.data(),
         net.latent_dim(),
         d_latent.data(),
         net.latent_dim());

    LayerGrads(d_latent.data(), cache.hidden.data(), rows, grads.layers[1], scratch);
    std::vector<T> d_pre_hidden;
    BackpropThroughRelu(net.layers[1], d_latent.data(), rows, cache.pre_hidden, d_pre_hidden);

    LayerGrads(d_pre_hidden.data(), batch.data(), rows, grads.layers[0], scratch);
    return grads;
}

template <typename T>
AdamState<T>
AdamState<T>::For(const AeNet<T>& net, double beta1, double beta2, double epsilon) {
    AdamState state;
    state.first_moment = AeNet<T>(net.input_dim(), net.hidden_dim(), net.latent_dim());
    state.second_moment = state.first_moment;
    state.beta1 = beta1;
    state.beta2 = beta2;
    state.epsilon = epsilon;
    return state;
}

template <typename T>
void
AdamStep(AeNet<T>& net, const AeNet<T>& grads, AdamState<T>& state, double learning_rate) {
    auto params = net.tensors();
    const auto g = grads.tensors();
    auto m = state.first_moment.tensors();
    auto v = state.second_moment.tensors();
    for (std::size_t t = 0; t < params.size(); ++t) {
        VECPRESS_CHECK(g[t].size() == params[t].size() && m[t].size() == params[t].size(),
                       SHAPE_MISMATCH,
                       "gradient shape does not match parameters");
        for (T value : g[t]) {
            VECPRESS_CHECK(std::isfinite(value), NON_FINITE_GRADIENT, "non-finite gradient component");
        }
    }
    const std::uint64_t step = state.step + 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            const double grad = g[t][i];
            const double m_new = b1 * static_cast<double>(m[t][i]) + (1.0 - b1) * grad;
            const double v_new = b2 * static_cast<double>(v[t][i]) + (1.0 - b2) * grad * grad;
            m[t][i] = static_cast<T>(m_new);
            v[t][i] = static_cast<T>(v_new);
            const double m_hat = m_new / correction1;
            const double v_hat = v_new / correction2;
            params[t][i] = static_cast<T>(static_cast<double>(params[t][i]) -
                                          learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon));
        }
    }
    state.step = step;
}

std::string
TrainingLog::ToCsv() const {
    std::string csv = "epoch,train_mse,val_mse\n";
    for (const auto& e : epochs) {
        csv += std::to_string(e.epoch) + "," + FormatDouble(e.train_mse) + "," + FormatDouble(e.val_mse) +
               "\n";
    }
    return csv;
}

double
ReconstructionMse(const AeModel& model, const EmbeddingSet& set) {
    VECPRESS_CHECK(set.dim == model.input_dim(),
                   DIM_MISMATCH,
                   "set dim " + std::to_string(set.dim) + " != model input dim " +
                       std::to_string(model.input_dim()));
    VECPRESS_CHECK(set.count() > 0, TOO_FEW_ROWS, "empty set");
    const PreparedNet<float> prepared(model);
    std::vector<float> scratch;
    std::vector<float> latent;
    std::vector<float> recon;
    double sum = 0.0;
    for (std::size_t begin = 0; begin < set.count(); begin += kInferenceRows) {
        const std::size_t rows = std::min(kInferenceRows, set.count() - begin);
        const float* x = set.data.data() + begin * set.dim;
        latent.resize(rows * model.latent_dim());
        recon.resize(rows * set.dim);
        EncodeRows(model, prepared, x, rows, scratch, latent.data());
        DecodeRows(model, prepared, latent.data(), rows, scratch, recon.data());
        for (std::size_t i = 0; i < recon.size(); ++i) {
            const double diff = static_cast<double>(recon[i]) - static_cast<double>(x[i]);
            sum += diff * diff;
        }
    }
    return sum / static_cast<double>(set.count() * set.dim);
}

namespace {

EmbeddingSet
GatherRows(const EmbeddingSet& set, const std::vector<std::size_t>& rows) {
    EmbeddingSet out;
    out.dim = set.dim;
    out.ids.reserve(rows.size());
    out.data.reserve(rows.size() * set.dim);
    for (std::size_t r : rows) {
        out.ids.push_back(set.ids[r]);
        const auto row = set.row(r);
        out.data.insert(out.data.end(), row.begin(), row.end());
    }
    return out;
}

}  // namespace

std::pair<AeModel, TrainingLog>
TrainAutoencoder(const EmbeddingSet& corpus, const AeConfig& config) {
    config.Validate();
    VECPRESS_CHECK(corpus.count() >= 2, TOO_FEW_ROWS, "autoencoder training needs at least 2 rows");
    VECPRESS_CHECK(corpus.dim == config.input_dim,
                   DIM_MISMATCH,
                   "corpus dim " + std::to_string(corpus.dim) + " != configured input dim " +
                       std::to_string(config.input_dim));

    Rng rng(config.seed);
    AeModel model = InitAeNet<float>(config.input_dim, config.hidden_dim, config.latent_dim, rng.Next());

    std::vector<std::size_t> order(corpus.count());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    rng.Shuffle(order);
    const auto n = static_cast<double>(corpus.count());
    std::size_t val_count = static_cast<std::size_t>(std::nearbyint(config.validation_fraction * n));
    val_count = std::clamp<std::size_t>(val_count, 1, corpus.count() - 1);
    const EmbeddingSet validation =
        GatherRows(corpus, std::vector<std::size_t>(order.begin(), order.begin() + val_count));
    std::vector<std::size_t> train_rows(order.begin() + val_count, order.end());

    AdamState<float> adam = AdamState<float>::For(model, config.beta1, config.beta2, config.epsilon);
    TrainingLog log;
    log.best_val_mse = std::numeric_limits<double>::infinity();
    AeModel best = model;
    std::size_t stale_epochs = 0;
    std::vector<float> batch;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.Shuffle(train_rows);
        double weighted_loss = 0.0;
        for (std::size_t begin = 0; begin < train_rows.size(); begin += config.batch_size) {
            const std::size_t rows = std::min(config.batch_size, train_rows.size() - begin);
            batch.resize(rows * corpus.dim);
            for (std::size_t r = 0; r < rows; ++r) {
                const auto src = corpus.row(train_rows[begin + r]);
                std::copy(src.begin(), src.end(), batch.begin() + r * corpus.dim);
            }
            const std::span<const float> view(batch);
            const auto cache = Forward(model, view);
            weighted_loss += MseLoss<float>(cache.recon, view) * static_cast<double>(rows);
            const auto grads = Backward(model, view, cache);
            AdamStep(model, grads, adam, config.learning_rate);
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = weighted_loss / static_cast<double>(train_rows.size());
        stats.val_mse = ReconstructionMse(model, validation);
        log.epochs.push_back(stats);

        if (stats.val_mse < log.best_val_mse) {
            log.best_val_mse = stats.val_mse;
            log.best_epoch = epoch;
            best = model;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.patience) {
            break;
        }
    }
    return {std::move(best), std::move(log)};
}

EmbeddingSet
Encode(const AeModel& model, const EmbeddingSet& set) {
    set.Validate();
    VECPRESS_CHECK(set.count() == 0 || set.dim == model.input_dim(),
                   DIM_MISMATCH,
                   "set dim " + std::to_string(set.dim) + " != model input dim " +
                       std::to_string(model.input_dim()));
    EmbeddingSet latent;
    latent.ids = set.ids;
    latent.dim = model.latent_dim();
    latent.data.resize(set.count() * latent.dim);
    const PreparedNet<float> prepared(model);
    std::vector<float> scratch;
    for (std::size_t begin = 0; begin < set.count(); begin += kInferenceRows) {
        const std::size_t rows = std::min(kInferenceRows, set.count() - begin);
        EncodeRows(model,
                   prepared,
                   set.data.data() + begin * set.dim,
                   rows,
                   scratch,
                   latent.data.data() + begin * latent.dim);
    }
    return latent;
}

EmbeddingSet
Decode(const AeModel& model, const EmbeddingSet& latent) {
    latent.Validate();
    VECPRESS_CHECK(latent.count() == 0 || latent.dim == model.latent_dim(),
                   DIM_MISMATCH,
                   "latent dim " + std::to_string(latent.dim) + " != model latent dim " +
                       std::to_string(model.latent_dim()));
    EmbeddingSet out;
    out.ids = latent.ids;
    out.dim = model.input_dim();
    out.data.resize(latent.count() * out.dim);
    const PreparedNet<float> prepared(model);
    std::vector<float> scratch;
    for (std::size_t begin = 0; begin < latent.count(); begin += kInferenceRows) {
        const std::size_t rows = std::min(kInferenceRows, latent.count() - begin);
        DecodeRows(model,
                   prepared,
                   latent.data.data() + begin * model.latent_dim(),
                   rows,
                   scratch,
                   out.data.data() + begin * out.dim);
    }
    return out;
}

EmbeddingSet
Reconstruct(const AeModel& model, const EmbeddingSet& set) {
    return Decode(model, Encode(model, set));
}

CompressedSet
EncodeCompressed(const AeModel& model, const EmbeddingSet& set) {
    const EmbeddingSet latent = Encode(model, set);
    CompressedSet out;
    out.method = Method::AE_LATENT;
    out.dim = model.input_dim();
    out.latent_dim = model.latent_dim();
    out.ids = latent.ids;
    out.payload.resize(latent.data.size() * sizeof(float));
    std::memcpy(out.payload.data(), latent.data.data(), out.payload.size());
    return out;
}

EmbeddingSet
DecodeCompressed(const AeModel& model, const CompressedSet& set) {
    VECPRESS_CHECK(set.method == Method::AE_LATENT,
                   METHOD_MISMATCH,
                   "expected ae-latent payload, got " + std::string(MethodName(set.method)));
    VECPRESS_CHECK(set.latent_dim == model.latent_dim() && set.dim == model.input_dim(),
                   DIM_MISMATCH,
                   "latent set does not match the model's dimensions");
    VECPRESS_CHECK(set.payload.size() == set.count() * set.row_bytes(),
                   CORRUPT_RECORD,
                   "payload size does not match count x bytes per vector");
    EmbeddingSet latent;
    latent.ids = set.ids;
    latent.dim = set.latent_dim;
    latent.data.resize(set.count() * set.latent_dim);
    std::memcpy(latent.data.data(), set.payload.data(), set.payload.size());
    return Decode(model, latent);
}

std::string
SerializeModel(const AeModel& model) {
    std::string bytes(kModelMagic);
    AppendU32(bytes, static_cast<std::uint32_t>(model.input_dim()));
    AppendU32(bytes, static_cast<std::uint32_t>(model.hidden_dim()));
    AppendU32(bytes, static_cast<std::uint32_t>(model.latent_dim()));
    for (const auto& tensor : model.tensors()) {
        for (float v : tensor) {
            AppendF32(bytes, v);
        }
    }
    return bytes;
}

AeModel
ParseModel(std::string_view bytes) {
    ByteCursor cursor(bytes);
    const char* magic = cursor.Take(4);
    VECPRESS_CHECK(magic != nullptr && std::string_view(magic, 4) == kModelMagic,
                   CORRUPT_RECORD,
                   "not a VAE1 model file");
    const char* header = cursor.Take(12);
    VECPRESS_CHECK(header != nullptr, CORRUPT_RECORD, "truncated model header");
    const std::size_t input_dim = LoadU32(header);
    const std::size_t hidden_dim = LoadU32(header + 4);
    const std::size_t latent_dim = LoadU32(header + 8);
    VECPRESS_CHECK(input_dim > 0 && hidden_dim > 0 && latent_dim > 0,
                   CORRUPT_RECORD,
                   "model dimensions must be positive");
    AeModel model(input_dim, hidden_dim, latent_dim);
    std::size_t total = 0;
    for (const auto& tensor : model.tensors()) {
        total += tensor.size();
    }
    VECPRESS_CHECK(cursor.remaining() == total * sizeof(float),
                   CORRUPT_RECORD,
                   "model file holds " + std::to_string(cursor.remaining()) + " parameter bytes, expected " +
                       std::to_string(total * sizeof(float)));
    for (auto& tensor : model.tensors()) {
        const char* p = cursor.Take(tensor.size() * sizeof(float));
        for (std::size_t i = 0; i < tensor.size(); ++i) {
            tensor[i] = LoadF32(p + 4 * i);
            VECPRESS_CHECK(std::isfinite(tensor[i]), NON_FINITE_VALUE, "non-finite model parameter");
        }
    }
    return model;
}

void
WriteModel(const AeModel& model, const std::filesystem::path& path) {
    WriteFileAtomic(path, SerializeModel(model));
}

AeModel
ReadModel(const std::filesystem::path& path) {
    return ParseModel(ReadFileBytes(path));
}

#define VECPRESS_INSTANTIATE_AE(T)                                                               \
    template struct AeNet<T>;                                                                   \
    template struct AdamState<T>;                                                               \
    template AeNet<T> InitAeNet<T>(std::size_t, std::size_t, std::size_t, std::uint64_t);       \
    template ForwardCache<T> Forward<T>(const AeNet<T>&, std::span<const T>);                   \
    template double MseLoss<T>(std::span<const T>, std::span<const T>);                         \
    template AeNet<T> Backward<T>(const AeNet<T>&, std::span<const T>, const ForwardCache<T>&); \
    template void AdamStep<T>(AeNet<T>&, const AeNet<T>&, AdamState<T>&, double);

VECPRESS_INSTANTIATE_AE(float)
VECPRESS_INSTANTIATE_AE(double)

template AeNet<double> CastNet<double, float>(const AeNet<float>&);
template AeNet<float> CastNet<float, double>(const AeNet<double>&);

}  // namespace vecpress
