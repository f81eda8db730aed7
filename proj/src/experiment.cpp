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

#include "vecpress/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>

#include <json.hpp>

#include "vecpress/embedding_io.h"
#include "vecpress/error.h"
#include "vecpress/quant.h"
#include "vecpress/util/atomic_file.h"
#include "vecpress/util/checksum.h"

namespace vecpress {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kManifestName = "manifest.json";

bool
IsSafeName(std::string_view name) {
    if (name.empty() || name == "." || name == "..") {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
               c == '_' || c == '-';
    });
}

[[noreturn]] void
ConfigError(const std::string& message) {
    Fail(ErrorType::INVALID_CONFIG, "experiment config: " + message);
}

void
RejectUnknownKeys(const Json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

const Json&
Require(const Json& object, const char* key, std::string_view where) {
    const auto it = object.find(key);
    if (it == object.end()) {
        ConfigError("missing '" + std::string(key) + "' in " + std::string(where));
    }
    return *it;
}

std::string
GetString(const Json& value, std::string_view what) {
    if (!value.is_string()) {
        ConfigError(std::string(what) + " must be a string");
    }
    return value.get<std::string>();
}

std::uint64_t
GetUnsigned(const Json& value, std::string_view what) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        ConfigError(std::string(what) + " must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

double
GetDouble(const Json& value, std::string_view what) {
    if (!value.is_number()) {
        ConfigError(std::string(what) + " must be a number");
    }
    return value.get<double>();
}

EmbeddingSource
ParseSource(const Json& value, std::string_view where) {
    EmbeddingSource source;
    if (value.is_string()) {
        source.vectors = value.get<std::string>();
        return source;
    }
    if (!value.is_object()) {
        ConfigError(std::string(where) + " must be a path or {vectors, ids}");
    }
    RejectUnknownKeys(value, {"vectors", "ids"}, where);
    source.vectors = GetString(Require(value, "vectors", where), "vectors");
    if (const auto it = value.find("ids"); it != value.end()) {
        source.ids = GetString(*it, "ids");
    }
    return source;
}

Json
SourceJson(const EmbeddingSource& source) {
    Json out = Json::object();
    out["vectors"] = source.vectors;
    out["ids"] = source.ids.empty() ? Json(nullptr) : Json(source.ids);
    return out;
}

Json
AeConfigJson(const AeConfig& ae) {
    Json out = Json::object();
    out["input_dim"] = ae.input_dim;
    out["hidden_dim"] = ae.hidden_dim;
    out["latent_dim"] = ae.latent_dim;
    out["learning_rate"] = ae.learning_rate;
    out["beta1"] = ae.beta1;
    out["beta2"] = ae.beta2;
    out["epsilon"] = ae.epsilon;
    out["batch_size"] = ae.batch_size;
    out["max_epochs"] = ae.max_epochs;
    out["patience"] = ae.patience;
    out["validation_fraction"] = ae.validation_fraction;
    out["seed"] = ae.seed;
    return out;
}

std::string
PrecisionLabel(ArmMethod method) {
    switch (method) {
        case ArmMethod::F16:
            return "float16";
        case ArmMethod::INT8:
            return "int8";
        case ArmMethod::BINARY:
            return "binary";
        case ArmMethod::BASELINE:
        case ArmMethod::AE:
            return "float32";
    }
    return "float32";
}

Method
CodecFor(ArmMethod method) {
    switch (method) {
        case ArmMethod::F16:
            return Method::F16;
        case ArmMethod::INT8:
            return Method::INT8;
        case ArmMethod::BINARY:
            return Method::BINARY;
        case ArmMethod::AE:
            return Method::AE_LATENT;
        case ArmMethod::BASELINE:
            return Method::F32;
    }
    return Method::F32;
}

std::string
FormatLoss(double loss) {
    if (loss == 0.0) {
        return "0.0";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f", loss);
    return buf;
}

std::string
DataChecksum(const EmbeddingSet& set) {
    std::string bytes = std::to_string(set.dim) + "\n";
    for (const auto& id : set.ids) {
        bytes += id;
        bytes += '\n';
    }
    const std::size_t offset = bytes.size();
    bytes.resize(offset + set.data.size() * sizeof(float));
    std::memcpy(bytes.data() + offset, set.data.data(), set.data.size() * sizeof(float));
    return Sha256Hex(bytes);
}

// Collects written files (relative to the output directory) for the manifest.
class OutputTree {
public:
    explicit OutputTree(fs::path root) : root_(std::move(root)) {
    }

    const fs::path&
    root() const {
        return root_;
    }

    void
    Write(const fs::path& relative, std::string_view bytes) {
        const fs::path target = root_ / relative;
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            Fail(ErrorType::IO_FAILURE, "cannot create directory " + target.parent_path().string());
        }
        WriteFileAtomic(target, bytes);
        Track(relative);
    }

    void
    Track(const fs::path& relative) {
        files_.insert(relative.generic_string());
    }

    void
    WriteManifest(const std::string& config_hash,
                  std::string_view status,
                  const std::vector<std::string>& completed,
                  const std::optional<std::pair<std::string, std::string>>& error) {
        Json manifest = Json::object();
        manifest["config_hash"] = config_hash;
        manifest["status"] = status;
        manifest["arms"] = completed;
        Json files = Json::array();
        for (const auto& relative : files_) {
            Json entry = Json::object();
            entry["path"] = relative;
            entry["sha256"] = Sha256File(root_ / relative);
            files.push_back(std::move(entry));
        }
        manifest["files"] = std::move(files);
        if (error) {
            Json record = Json::object();
            record["arm"] = error->first;
            record["message"] = error->second;
            manifest["error"] = std::move(record);
        } else {
            manifest["error"] = nullptr;
        }
        WriteFileAtomic(root_ / kManifestName, manifest.dump(2) + "\n");
    }

private:
    fs::path root_;
    std::set<std::string> files_;
};

struct Inputs {
    EmbeddingSet corpus;
    EmbeddingSet queries;
    Qrels qrels;
    std::optional<EmbeddingSet> ae_train;
};

// Trains or reloads the arm's model. Reuse requires the stored config hash,
// training-data checksum and model checksum to match.
AeModel
ObtainModel(const ArmConfig& arm,
            const AeConfig& ae,
            const EmbeddingSet& train,
            OutputTree& out,
            ArmResult& result) {
    const fs::path dir = fs::path("arms") / arm.name;
    const std::string config_hash = Sha256Hex(AeConfigJson(ae).dump());
    const std::string data_hash = DataChecksum(train);
    const fs::path model_path = out.root() / dir / "model.vae";
    const fs::path info_path = out.root() / dir / "model.json";
    std::error_code ec;
    if (fs::exists(model_path, ec) && fs::exists(info_path, ec)) {
        try {
            const Json info = Json::parse(ReadFileBytes(info_path));
            if (info.value("config_hash", "") == config_hash && info.value("data_sha256", "") == data_hash &&
                info.value("model_sha256", "") == Sha256File(model_path)) {
                AeModel model = ReadModel(model_path);
                result.model_reused = true;
                out.Track(dir / "model.vae");
                out.Track(dir / "model.json");
                if (fs::exists(out.root() / dir / "training_log.csv", ec)) {
                    out.Track(dir / "training_log.csv");
                }
                return model;
            }
        } catch (const nlohmann::json::exception&) {
            // Unreadable cache record: retrain.
        } catch (const VecpressError&) {
        }
    }
    auto [model, log] = TrainAutoencoder(train, ae);
    const std::string model_bytes = SerializeModel(model);
    out.Write(dir / "model.vae", model_bytes);
    out.Write(dir / "training_log.csv", log.ToCsv());
    Json info = Json::object();
    info["config"] = AeConfigJson(ae);
    info["config_hash"] = config_hash;
    info["data_sha256"] = data_hash;
    info["model_sha256"] = Sha256Hex(model_bytes);
    info["best_epoch"] = log.best_epoch;
    info["best_val_mse"] = log.best_val_mse;
    out.Write(dir / "model.json", info.dump(2) + "\n");
    result.training = std::move(log);
    return model;
}

ArmResult
RunArm(const ExperimentConfig& config,
       const ArmConfig& arm,
       const Inputs& inputs,
       const MetricReport* baseline,
       OutputTree& out) {
    ArmResult result;
    result.arm = arm;
    const SearchParams params{config.search_depth()};
    const std::size_t dim = inputs.corpus.dim;
    switch (arm.method) {
        case ArmMethod::BASELINE:
            result.dimensions = dim;
            result.bytes_per_vector = BytesPerVector(Method::F32, dim);
            result.run = Search(inputs.queries, inputs.corpus, params);
            break;
        case ArmMethod::F16:
        case ArmMethod::INT8:
        case ArmMethod::BINARY: {
            const Method codec = CodecFor(arm.method);
            std::optional<Int8Params> calibration;
            if (codec == Method::INT8) {
                calibration = CalibrateInt8(inputs.corpus);
            }
            const CompressedSet docs = Compress(inputs.corpus, codec, calibration ? &*calibration : nullptr);
            result.dimensions = dim;
            result.bytes_per_vector = docs.row_bytes();
            result.run = SearchCompressed(inputs.queries, docs, config.mode, params);
            break;
        }
        case ArmMethod::AE: {
            const EmbeddingSet& train = inputs.ae_train ? *inputs.ae_train : inputs.corpus;
            VECPRESS_CHECK(train.dim == dim,
                           DIM_MISMATCH,
                           "ae_train dim " + std::to_string(train.dim) + " != corpus dim " + std::to_string(dim));
            AeConfig ae = arm.ae;
            ae.input_dim = dim;
            ae.seed = config.ArmSeed(arm);
            const AeModel model = ObtainModel(arm, ae, train, out, result);
            const CompressedSet docs = EncodeCompressed(model, inputs.corpus);
            result.dimensions = model.latent_dim();
            result.bytes_per_vector = docs.row_bytes();
            result.run = SearchCompressed(inputs.queries, docs, config.mode, params, &model);
            break;
        }
    }

    const fs::path dir = fs::path("arms") / arm.name;
    out.Write(dir / "run.trec", FormatRun(result.run));
    result.report = Evaluate(result.run, inputs.qrels, config.k_grid, arm.name);
    out.Write(dir / "metrics.json", MetricsToJson(std::span(&result.report, 1)));
    out.Write(dir / "per_query.csv", PerQueryToCsv(result.report));
    if (baseline != nullptr) {
        result.delta = Delta(result.report, *baseline);
        out.Write(dir / "deltas.csv", DeltasToCsv(std::span(&*result.delta, 1)));
    }
    return result;
}

}  // namespace

std::string_view
ArmMethodName(ArmMethod method) {
    switch (method) {
        case ArmMethod::BASELINE:
            return "baseline";
        case ArmMethod::F16:
            return "f16";
        case ArmMethod::INT8:
            return "int8";
        case ArmMethod::BINARY:
            return "binary";
        case ArmMethod::AE:
            return "ae";
    }
    return "unknown";
}

ArmMethod
ParseArmMethod(std::string_view name) {
    for (ArmMethod method :
         {ArmMethod::BASELINE, ArmMethod::F16, ArmMethod::INT8, ArmMethod::BINARY, ArmMethod::AE}) {
        if (ArmMethodName(method) == name) {
            return method;
        }
    }
    ConfigError("unknown arm method '" + std::string(name) + "'");
}

void
ExperimentConfig::Validate() const {
    if (corpus.vectors.empty() || queries.vectors.empty() || qrels.empty()) {
        ConfigError("corpus, queries and qrels paths are required");
    }
    if (output_dir.empty()) {
        ConfigError("output_dir is required");
    }
    if (k_grid.empty()) {
        ConfigError("k_grid is empty");
    }
    for (std::size_t k : k_grid) {
        if (k == 0) {
            ConfigError("k_grid entries must be positive");
        }
    }
    std::size_t baselines = 0;
    std::set<std::string> names;
    for (const auto& arm : arms) {
        if (!IsSafeName(arm.name)) {
            ConfigError("arm name '" + arm.name + "' must match [A-Za-z0-9._-]+");
        }
        if (!names.insert(arm.name).second) {
            ConfigError("duplicate arm name '" + arm.name + "'");
        }
        baselines += arm.method == ArmMethod::BASELINE ? 1 : 0;
        if (arm.method == ArmMethod::AE) {
            if (!arm.ae_seed_set && !seed) {
                ConfigError("ae arm '" + arm.name + "' has no seed and the experiment sets none");
            }
            AeConfig check = arm.ae;
            check.input_dim = std::max<std::size_t>(check.input_dim, 1);
            check.Validate();
        }
    }
    if (baselines != 1) {
        ConfigError("exactly one baseline arm is required, found " + std::to_string(baselines));
    }
}

std::size_t
ExperimentConfig::search_depth() const {
    if (k_max != 0) {
        return k_max;
    }
    return *std::max_element(k_grid.begin(), k_grid.end());
}

fs::path
ExperimentConfig::Resolve(const std::string& path) const {
    const fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) {
        return p;
    }
    return base_dir / p;
}

std::uint64_t
ExperimentConfig::ArmSeed(const ArmConfig& arm) const {
    if (arm.ae_seed_set) {
        return arm.ae.seed;
    }
    return seed.value_or(0);
}

std::string
ExperimentConfig::CanonicalJson() const {
    Json root = Json::object();
    root["corpus"] = SourceJson(corpus);
    root["queries"] = SourceJson(queries);
    root["ae_train"] = ae_train ? SourceJson(*ae_train) : Json(nullptr);
    root["qrels"] = qrels;
    root["output_dir"] = output_dir;
    root["seed"] = seed ? Json(*seed) : Json(nullptr);
    root["k_grid"] = k_grid;
    root["k_max"] = search_depth();
    root["mode"] = ScoringModeName(mode);
    Json arm_list = Json::array();
    for (const auto& arm : arms) {
        Json entry = Json::object();
        entry["name"] = arm.name;
        entry["method"] = ArmMethodName(arm.method);
        if (arm.method == ArmMethod::AE) {
            Json ae = AeConfigJson(arm.ae);
            ae.erase("input_dim");
            ae["seed"] = ArmSeed(arm);
            entry["ae"] = std::move(ae);
        } else {
            entry["ae"] = nullptr;
        }
        arm_list.push_back(std::move(entry));
    }
    root["arms"] = std::move(arm_list);
    return root.dump(2) + "\n";
}

std::string
ExperimentConfig::Hash() const {
    return Sha256Hex(CanonicalJson());
}

ExperimentConfig
ParseExperimentConfig(std::string_view text, const fs::path& base_dir) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        Fail(ErrorType::JSON_PARSE_ERROR, std::string("experiment config: ") + e.what());
    }
    if (!root.is_object()) {
        ConfigError("top level must be an object");
    }
    RejectUnknownKeys(root,
                      {"corpus", "queries", "ae_train", "qrels", "arms", "k_grid", "k_max", "mode", "seed",
                       "output_dir"},
                      "config");
    ExperimentConfig config;
    config.base_dir = base_dir;
    config.corpus = ParseSource(Require(root, "corpus", "config"), "corpus");
    config.queries = ParseSource(Require(root, "queries", "config"), "queries");
    if (const auto it = root.find("ae_train"); it != root.end() && !it->is_null()) {
        config.ae_train = ParseSource(*it, "ae_train");
    }
    config.qrels = GetString(Require(root, "qrels", "config"), "qrels");
    if (const auto it = root.find("output_dir"); it != root.end()) {
        config.output_dir = GetString(*it, "output_dir");
    }
    if (const auto it = root.find("seed"); it != root.end() && !it->is_null()) {
        config.seed = GetUnsigned(*it, "seed");
    }
    if (const auto it = root.find("k_grid"); it != root.end()) {
        if (!it->is_array()) {
            ConfigError("k_grid must be an array");
        }
        config.k_grid.clear();
        for (const auto& k : *it) {
            config.k_grid.push_back(GetUnsigned(k, "k_grid entry"));
        }
    }
    if (const auto it = root.find("k_max"); it != root.end()) {
        config.k_max = GetUnsigned(*it, "k_max");
        if (config.k_max == 0) {
            ConfigError("k_max must be positive");
        }
    }
    if (const auto it = root.find("mode"); it != root.end()) {
        config.mode = ParseScoringMode(GetString(*it, "mode"));
    }
    const Json& arms = Require(root, "arms", "config");
    if (!arms.is_array()) {
        ConfigError("arms must be an array");
    }
    for (const auto& item : arms) {
        if (!item.is_object()) {
            ConfigError("each arm must be an object");
        }
        RejectUnknownKeys(item, {"name", "method", "ae"}, "arm");
        ArmConfig arm;
        arm.name = GetString(Require(item, "name", "arm"), "arm name");
        arm.method = ParseArmMethod(GetString(Require(item, "method", "arm"), "arm method"));
        if (const auto it = item.find("ae"); it != item.end() && !it->is_null()) {
            if (arm.method != ArmMethod::AE) {
                ConfigError("arm '" + arm.name + "' is not an ae arm but has ae settings");
            }
            if (!it->is_object()) {
                ConfigError("ae settings must be an object");
            }
            const Json& ae = *it;
            RejectUnknownKeys(ae,
                              {"hidden_dim", "latent_dim", "learning_rate", "beta1", "beta2", "epsilon",
                               "batch_size", "max_epochs", "patience", "validation_fraction", "seed"},
                              "ae settings");
            auto set_size = [&](const char* key, std::size_t& field) {
                if (const auto f = ae.find(key); f != ae.end()) {
                    field = GetUnsigned(*f, key);
                }
            };
            auto set_double = [&](const char* key, double& field) {
                if (const auto f = ae.find(key); f != ae.end()) {
                    field = GetDouble(*f, key);
                }
            };
            set_size("hidden_dim", arm.ae.hidden_dim);
            set_size("latent_dim", arm.ae.latent_dim);
            set_size("batch_size", arm.ae.batch_size);
            set_size("max_epochs", arm.ae.max_epochs);
            set_size("patience", arm.ae.patience);
            set_double("learning_rate", arm.ae.learning_rate);
            set_double("beta1", arm.ae.beta1);
            set_double("beta2", arm.ae.beta2);
            set_double("epsilon", arm.ae.epsilon);
            set_double("validation_fraction", arm.ae.validation_fraction);
            if (const auto f = ae.find("seed"); f != ae.end()) {
                arm.ae.seed = GetUnsigned(*f, "seed");
                arm.ae_seed_set = true;
            }
        }
        config.arms.push_back(std::move(arm));
    }
    return config;
}

ExperimentConfig
LoadExperimentConfig(const fs::path& path) {
    return ParseExperimentConfig(ReadFileBytes(path), path.parent_path());
}

EmbeddingSet
LoadEmbeddings(const fs::path& vectors, const fs::path& ids) {
    if (vectors.extension() == ".jsonl") {
        return ReadJsonlEmbeddings(vectors);
    }
    return ReadFvecs(vectors, ids.empty() ? DefaultIdsPath(vectors) : ids);
}

std::string
FormatCompression(double ratio) {
    const double rounded = std::round(ratio * 10.0) / 10.0;
    char buf[64];
    if (rounded == std::floor(rounded)) {
        std::snprintf(buf, sizeof(buf), "%.0fx", rounded);
    } else {
        std::snprintf(buf, sizeof(buf), "%.1fx", rounded);
    }
    return buf;
}

ComparisonTable
BuildTable(const std::vector<ArmResult>& arms, std::size_t baseline_bytes) {
    ComparisonTable table;
    const MetricReport* baseline = nullptr;
    for (const auto& arm : arms) {
        if (arm.arm.method == ArmMethod::BASELINE) {
            baseline = &arm.report;
        }
    }
    VECPRESS_CHECK(baseline != nullptr, INVALID_CONFIG, "table needs a baseline arm");
    const auto& ks = baseline->ks;
    table.loss_k = std::find(ks.begin(), ks.end(), 10) != ks.end() ? 10 : ks.back();
    for (const auto& arm : arms) {
        TableRow row;
        row.method = arm.arm.name;
        row.arm_method = arm.arm.method;
        row.dimensions = arm.dimensions;
        row.precision = PrecisionLabel(arm.arm.method);
        row.bytes_per_vector = arm.bytes_per_vector;
        row.compression = static_cast<double>(baseline_bytes) / static_cast<double>(arm.bytes_per_vector);
        row.deltas = arm.delta ? *arm.delta : Delta(arm.report, *baseline);
        row.loss = -row.deltas.at(Metric::NDCG, table.loss_k);
        if (row.loss == 0.0) {
            row.loss = 0.0;  // drop the sign of -0.0
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string
RenderTable(const ComparisonTable& table) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Method",
                     "Dimensions",
                     "Precision",
                     "Bytes / Vector",
                     "Compression",
                     "nDCG@" + std::to_string(table.loss_k) + " Loss"});
    for (const auto& row : table.rows) {
        cells.push_back({row.method,
                         std::to_string(row.dimensions),
                         row.precision,
                         std::to_string(row.bytes_per_vector),
                         FormatCompression(row.compression),
                         FormatLoss(row.loss)});
    }
    std::vector<std::size_t> widths(cells[0].size(), 3);
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            widths[c] = std::max(widths[c], line[c].size());
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        std::string text = "|";
        for (std::size_t c = 0; c < line.size(); ++c) {
            text += " " + line[c] + std::string(widths[c] - line[c].size(), ' ') + " |";
        }
        return text + "\n";
    };
    std::string out = emit(cells[0]);
    out += "|";
    for (std::size_t w : widths) {
        out += std::string(w + 2, '-') + "|";
    }
    out += "\n";
    for (std::size_t r = 1; r < cells.size(); ++r) {
        out += emit(cells[r]);
    }
    return out;
}

std::string
TableToJson(const ComparisonTable& table) {
    Json root = Json::object();
    root["loss_metric"] = "ndcg";
    root["loss_k"] = table.loss_k;
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json entry = Json::object();
        entry["method"] = row.method;
        entry["arm_method"] = ArmMethodName(row.arm_method);
        entry["dimensions"] = row.dimensions;
        entry["precision"] = row.precision;
        entry["bytes_per_vector"] = row.bytes_per_vector;
        entry["compression"] = row.compression;
        entry["loss"] = row.loss;
        entry["baseline"] = row.deltas.baseline;
        Json deltas = Json::object();
        for (const auto& e : row.deltas.entries) {
            deltas[std::string(MetricName(e.metric))][std::to_string(e.k)] = e.delta;
        }
        entry["deltas"] = std::move(deltas);
        rows.push_back(std::move(entry));
    }
    root["rows"] = std::move(rows);
    return root.dump(2) + "\n";
}

ComparisonTable
TableFromJson(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text);
        ComparisonTable table;
        table.loss_k = root.at("loss_k").get<std::size_t>();
        for (const auto& entry : root.at("rows")) {
            TableRow row;
            row.method = entry.at("method").get<std::string>();
            row.arm_method = ParseArmMethod(entry.at("arm_method").get<std::string>());
            row.dimensions = entry.at("dimensions").get<std::size_t>();
            row.precision = entry.at("precision").get<std::string>();
            row.bytes_per_vector = entry.at("bytes_per_vector").get<std::size_t>();
            row.compression = entry.at("compression").get<double>();
            row.loss = entry.at("loss").get<double>();
            row.deltas.method = row.method;
            row.deltas.baseline = entry.at("baseline").get<std::string>();
            for (const auto& [name, by_k] : entry.at("deltas").items()) {
                const Metric metric = ParseMetric(name);
                for (const auto& [key, value] : by_k.items()) {
                    row.deltas.entries.push_back(
                        {metric, static_cast<std::size_t>(std::stoull(key)), 0.0, 0.0, value.get<double>()});
                }
            }
            table.rows.push_back(std::move(row));
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        Fail(ErrorType::JSON_PARSE_ERROR, std::string("table JSON: ") + e.what());
    } catch (const std::logic_error& e) {
        Fail(ErrorType::JSON_PARSE_ERROR, std::string("table JSON: ") + e.what());
    }
}

std::map<Metric, std::string>
EmitPlotData(const std::vector<MetricReport>& reports, const std::vector<DeltaReport>& deltas) {
    std::map<Metric, std::string> files;
    for (Metric metric : kAllMetrics) {
        std::string csv = "method,k,value,delta\n";
        if (!reports.empty()) {
            const auto& ks = reports.front().ks;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                for (const auto& report : reports) {
                    VECPRESS_CHECK(report.ks == ks, GRID_MISMATCH, "reports use different k grids");
                    double delta = 0.0;
                    for (const auto& d : deltas) {
                        if (d.method == report.method) {
                            delta = d.at(metric, ks[i]);
                        }
                    }
                    csv += report.method + "," + std::to_string(ks[i]) + "," +
                           FormatExact(report.scores[static_cast<std::size_t>(metric)][i]) + "," +
                           FormatExact(delta) + "\n";
                }
            }
        }
        files.emplace(metric, std::move(csv));
    }
    return files;
}

ExperimentResult
RunExperiment(const ExperimentConfig& config) {
    config.Validate();
    ExperimentResult result;
    result.config_hash = config.Hash();
    OutputTree out(config.Resolve(config.output_dir));
    out.Write("experiment.json", config.CanonicalJson());

    std::vector<std::string> completed;
    std::vector<std::optional<ArmResult>> slots(config.arms.size());
    std::string current;
    try {
        current = "<inputs>";
        Inputs inputs;
        inputs.corpus = LoadEmbeddings(config.Resolve(config.corpus.vectors),
                                       config.corpus.ids.empty() ? fs::path() : config.Resolve(config.corpus.ids));
        inputs.queries = LoadEmbeddings(config.Resolve(config.queries.vectors),
                                        config.queries.ids.empty() ? fs::path()
                                                                   : config.Resolve(config.queries.ids));
        inputs.qrels = ReadQrelsTsv(config.Resolve(config.qrels));
        if (config.ae_train) {
            inputs.ae_train = LoadEmbeddings(
                config.Resolve(config.ae_train->vectors),
                config.ae_train->ids.empty() ? fs::path() : config.Resolve(config.ae_train->ids));
        }

        std::size_t baseline_index = 0;
        for (std::size_t i = 0; i < config.arms.size(); ++i) {
            if (config.arms[i].method == ArmMethod::BASELINE) {
                baseline_index = i;
            }
        }
        current = config.arms[baseline_index].name;
        slots[baseline_index] = RunArm(config, config.arms[baseline_index], inputs, nullptr, out);
        completed.push_back(current);
        const MetricReport& baseline = slots[baseline_index]->report;
        for (std::size_t i = 0; i < config.arms.size(); ++i) {
            if (i == baseline_index) {
                continue;
            }
            current = config.arms[i].name;
            slots[i] = RunArm(config, config.arms[i], inputs, &baseline, out);
            completed.push_back(current);
        }
    } catch (const VecpressError& e) {
        out.WriteManifest(result.config_hash, "failed", completed, std::make_pair(current, std::string(e.what())));
        const std::string prefix = current == "<inputs>" ? "loading inputs: " : "arm '" + current + "': ";
        throw VecpressError(e.type(), prefix + e.what());
    } catch (const std::exception& e) {
        out.WriteManifest(result.config_hash, "failed", completed, std::make_pair(current, std::string(e.what())));
        throw;
    }

    std::vector<MetricReport> reports;
    std::vector<DeltaReport> deltas;
    std::size_t baseline_bytes = 0;
    for (auto& slot : slots) {
        reports.push_back(slot->report);
        if (slot->delta) {
            deltas.push_back(*slot->delta);
        }
        if (slot->arm.method == ArmMethod::BASELINE) {
            baseline_bytes = slot->bytes_per_vector;
        }
        result.arms.push_back(std::move(*slot));
    }
    result.table = BuildTable(result.arms, baseline_bytes);
    out.Write("metrics.json", MetricsToJson(reports));
    out.Write("deltas.csv", DeltasToCsv(deltas));
    out.Write("table.md", RenderTable(result.table));
    out.Write("table.json", TableToJson(result.table));
    for (const auto& [metric, csv] : EmitPlotData(reports, deltas)) {
        out.Write(fs::path("plots") / (std::string(MetricName(metric)) + ".csv"), csv);
    }
    out.WriteManifest(result.config_hash, "complete", completed, std::nullopt);
    return result;
}

}  // namespace vecpress
