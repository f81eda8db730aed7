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

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vecpress/ae.h"
#include "vecpress/embedding_io.h"
#include "vecpress/error.h"
#include "vecpress/experiment.h"
#include "vecpress/metrics.h"
#include "vecpress/quant.h"
#include "vecpress/retrieval.h"
#include "vecpress/util/atomic_file.h"
#include "vecpress/util/parallel.h"

namespace fs = std::filesystem;
using namespace vecpress;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool g_json = false;

void
Diagnose(int code, std::string_view kind, std::string_view message) {
    if (g_json) {
        nlohmann::ordered_json d;
        d["status"] = "error";
        d["exit_code"] = code;
        d["type"] = kind;
        d["message"] = message;
        std::cerr << d.dump() << "\n";
    } else {
        std::cerr << "vecpress: " << kind << ": " << message << "\n";
    }
}

fs::path
IdsFor(const std::string& vectors, const std::string& ids) {
    return ids.empty() ? DefaultIdsPath(vectors) : fs::path(ids);
}

bool
IsJsonl(const fs::path& path) {
    return path.extension() == ".jsonl";
}

bool
IsContainer(const fs::path& path) {
    return path.extension() == ".vqc";
}

void
WriteEmbeddings(const EmbeddingSet& set, const std::string& path, const std::string& ids) {
    if (IsJsonl(path)) {
        WriteJsonlEmbeddings(set, path);
    } else {
        WriteFvecs(set, path, IdsFor(path, ids));
    }
}

std::vector<std::size_t>
ParseKs(const std::string& text) {
    std::vector<std::size_t> ks;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        unsigned long long k = 0;
        try {
            k = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || k == 0 || item[0] == '-') {
            throw UsageError("--ks: '" + item + "' is not a positive integer");
        }
        ks.push_back(k);
    }
    if (ks.empty()) {
        throw UsageError("--ks: empty list");
    }
    return ks;
}

Method
ParseCodec(const std::string& name) {
    if (name == "f16") {
        return Method::F16;
    }
    if (name == "int8") {
        return Method::INT8;
    }
    return Method::BINARY;
}

AeModel
ModelFor(const std::string& path) {
    return ReadModel(path);
}

// Documents for the search subcommand: a .vqc container, or float vectors
// (raw, or AE latents when a model is given).
struct DocSource {
    std::optional<EmbeddingSet> floats;
    std::optional<CompressedSet> compressed;
};

DocSource
LoadDocs(const std::string& path, const std::string& ids, const AeModel* model) {
    DocSource docs;
    if (IsContainer(path)) {
        docs.compressed = ReadContainer(path, IdsFor(path, ids));
        return docs;
    }
    EmbeddingSet set = LoadEmbeddings(path, ids);
    if (model == nullptr) {
        docs.floats = std::move(set);
        return docs;
    }
    if (set.dim == model->input_dim()) {
        docs.compressed = EncodeCompressed(*model, set);
        return docs;
    }
    VECPRESS_CHECK(set.dim == model->latent_dim(),
                   DIM_MISMATCH,
                   "documents have dim " + std::to_string(set.dim) + ", model expects " +
                       std::to_string(model->input_dim()) + " or latent " + std::to_string(model->latent_dim()));
    CompressedSet latent;
    latent.method = Method::AE_LATENT;
    latent.dim = model->input_dim();
    latent.latent_dim = model->latent_dim();
    latent.ids = set.ids;
    latent.payload.resize(set.data.size() * sizeof(float));
    std::memcpy(latent.payload.data(), set.data.data(), latent.payload.size());
    docs.compressed = std::move(latent);
    return docs;
}

void
AddAeFlags(CLI::App* cmd, AeConfig& ae) {
    cmd->add_option("--hidden-dim", ae.hidden_dim, "Hidden layer width")->capture_default_str();
    cmd->add_option("--learning-rate", ae.learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--beta1", ae.beta1, "Adam first-moment decay")->capture_default_str();
    cmd->add_option("--beta2", ae.beta2, "Adam second-moment decay")->capture_default_str();
    cmd->add_option("--epsilon", ae.epsilon, "Adam epsilon")->capture_default_str();
    cmd->add_option("--batch-size", ae.batch_size, "Mini-batch rows")->capture_default_str();
    cmd->add_option("--max-epochs", ae.max_epochs, "Epoch budget")->capture_default_str();
    cmd->add_option("--patience", ae.patience, "Epochs without validation improvement before stopping")
        ->capture_default_str();
    cmd->add_option("--validation-fraction", ae.validation_fraction, "Held-out share of the training rows")
        ->capture_default_str();
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"vecpress: vector compression retrieval benchmark"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Cap on worker threads (0: hardware concurrency)");
    app.add_flag("--json", g_json, "Emit diagnostics as JSON lines on stderr");

    // convert
    std::string conv_in, conv_in_ids, conv_out, conv_out_ids;
    auto* convert = app.add_subcommand("convert", "Convert between .jsonl and .fvecs embeddings");
    convert->add_option("--in", conv_in, "Input .fvecs or .jsonl")->required();
    convert->add_option("--in-ids", conv_in_ids, "Input id sidecar (default: <in> with a .ids extension)");
    convert->add_option("--out", conv_out, "Output .fvecs or .jsonl")->required();
    convert->add_option("--out-ids", conv_out_ids, "Output id sidecar (default: <out> with a .ids extension)");

    // compress
    std::string comp_method, comp_in, comp_in_ids, comp_out, comp_calib, comp_calib_ids, comp_params_from;
    auto* compress = app.add_subcommand("compress", "Quantize embeddings into a .vqc container");
    compress->add_option("--method", comp_method, "Codec")->required()->check(
        CLI::IsMember({"f16", "int8", "binary"}));
    compress->add_option("--in", comp_in, "Input .fvecs or .jsonl")->required();
    compress->add_option("--ids", comp_in_ids, "Input id sidecar (default: <in> with a .ids extension)");
    compress->add_option("--out", comp_out, "Output .vqc (ids beside it with a .ids extension)")->required();
    auto* calib_opt = compress->add_option("--calib", comp_calib, "int8: calibrate on this set instead of --in");
    compress->add_option("--calib-ids", comp_calib_ids, "Id sidecar for --calib");
    compress->add_option("--params-from", comp_params_from, "int8: reuse the calibration of an existing .vqc")
        ->excludes(calib_opt);

    // decompress
    std::string dec_in, dec_out;
    auto* decompress = app.add_subcommand("decompress", "Expand a .vqc container to float vectors");
    decompress->add_option("--in", dec_in, "Input .vqc (ids beside it with a .ids extension)")->required();
    decompress->add_option("--out", dec_out, "Output .fvecs or .jsonl")->required();

    // ae-train
    AeConfig ae_cfg;
    std::optional<std::uint64_t> ae_seed;
    std::string ae_in, ae_in_ids, ae_out, ae_log;
    auto* ae_train = app.add_subcommand("ae-train", "Train an autoencoder on an embedding set");
    ae_train->add_option("--in", ae_in, "Training .fvecs or .jsonl")->required();
    ae_train->add_option("--ids", ae_in_ids, "Id sidecar (default: <in> with a .ids extension)");
    ae_train->add_option("--latent-dim", ae_cfg.latent_dim, "Bottleneck width")->required();
    ae_train->add_option("--seed", ae_seed, "Seed for initialization and shuffling")->required();
    ae_train->add_option("--out", ae_out, "Output model file")->required();
    ae_train->add_option("--log", ae_log, "Write per-epoch losses as CSV");
    AddAeFlags(ae_train, ae_cfg);

    // ae-apply
    std::string apply_model, apply_in, apply_in_ids, apply_out, apply_mode = "reconstruct";
    auto* ae_apply = app.add_subcommand("ae-apply", "Encode, decode or reconstruct vectors with a model");
    ae_apply->add_option("--model", apply_model, "Model file")->required();
    ae_apply->add_option("--in", apply_in, "Input .fvecs or .jsonl")->required();
    ae_apply->add_option("--ids", apply_in_ids, "Id sidecar (default: <in> with a .ids extension)");
    ae_apply->add_option("--out", apply_out, "Output .fvecs or .jsonl")->required();
    ae_apply->add_option("--mode", apply_mode, "What to compute")
        ->check(CLI::IsMember({"reconstruct", "encode", "decode"}))
        ->capture_default_str();

    // search
    std::string s_queries, s_query_ids, s_docs, s_doc_ids, s_model, s_out, s_mode = "symmetric",
                                                                          s_tag(kDefaultRunTag);
    std::size_t s_k = 100;
    auto* search = app.add_subcommand("search", "Exact cosine top-k retrieval, written as a TREC run");
    search->add_option("--queries", s_queries, "Query .fvecs or .jsonl")->required();
    search->add_option("--query-ids", s_query_ids, "Query id sidecar");
    search->add_option("--docs", s_docs, "Documents: .fvecs, .jsonl or .vqc")->required();
    search->add_option("--doc-ids", s_doc_ids, "Document id sidecar");
    search->add_option("--model", s_model, "Autoencoder; documents are raw or latent vectors");
    search->add_option("--k", s_k, "Documents retrieved per query")->capture_default_str()->check(
        CLI::PositiveNumber);
    search->add_option("--mode", s_mode, "Query treatment for compressed documents")
        ->check(CLI::IsMember({"symmetric", "asymmetric"}))
        ->capture_default_str();
    search->add_option("--tag", s_tag, "Run tag column")->capture_default_str();
    search->add_option("--out", s_out, "Output run file")->required();

    // eval
    std::string e_run, e_qrels, e_ks = "1,3,5,10,25,50,100", e_name = "baseline", e_out, e_per_query;
    auto* eval = app.add_subcommand("eval", "Score a run against qrels");
    eval->add_option("--run", e_run, "TREC run file")->required();
    eval->add_option("--qrels", e_qrels, "Qrels TSV")->required();
    eval->add_option("--ks", e_ks, "Comma-separated cutoffs")->capture_default_str();
    eval->add_option("--name", e_name, "Method name recorded in the output")->capture_default_str();
    eval->add_option("--out", e_out, "Output metrics.json")->required();
    eval->add_option("--per-query", e_per_query, "Also write per-query scores as CSV");

    // compare
    std::string c_base, c_method, c_out;
    auto* compare = app.add_subcommand("compare", "Metric deltas of methods against a baseline");
    compare->add_option("--baseline", c_base, "metrics.json holding one baseline method")->required();
    compare->add_option("--method", c_method, "metrics.json holding one or more methods")->required();
    compare->add_option("--out", c_out, "Output deltas.csv")->required();

    // run
    std::string r_config, r_output_dir;
    std::optional<std::uint64_t> r_seed;
    auto* run = app.add_subcommand("run", "Execute a full experiment from a JSON config");
    run->add_option("--config", r_config, "experiment.json")->required();
    run->add_option("--output-dir", r_output_dir, "Override the config's output_dir");
    run->add_option("--seed", r_seed, "Override the config's seed");

    // report
    std::string rep_dir, rep_out;
    auto* report = app.add_subcommand("report", "Render the comparison table of a finished experiment");
    report->add_option("--dir", rep_dir, "Experiment output directory")->required();
    report->add_option("--out", rep_out, "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        Diagnose(kExitUsage, "usage", e.what());
        std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitUsage;
    }

    try {
        if (threads > 0) {
            SetMaxThreads(threads);
        }
        if (*convert) {
            const EmbeddingSet set = LoadEmbeddings(conv_in, conv_in_ids);
            WriteEmbeddings(set, conv_out, conv_out_ids);
        } else if (*compress) {
            const EmbeddingSet set = LoadEmbeddings(comp_in, comp_in_ids);
            const Method method = ParseCodec(comp_method);
            std::optional<Int8Params> params;
            if (method == Method::INT8) {
                if (!comp_params_from.empty()) {
                    const CompressedSet ref = ReadContainer(comp_params_from, DefaultIdsPath(comp_params_from));
                    VECPRESS_CHECK(ref.int8.has_value(), METHOD_MISMATCH, "--params-from is not an int8 container");
                    params = *ref.int8;
                } else if (!comp_calib.empty()) {
                    params = CalibrateInt8(LoadEmbeddings(comp_calib, comp_calib_ids));
                } else {
                    params = CalibrateInt8(set);
                }
            } else if (!comp_calib.empty() || !comp_params_from.empty()) {
                throw UsageError("--calib and --params-from apply to int8 only");
            }
            WriteContainer(Compress(set, method, params ? &*params : nullptr), comp_out, DefaultIdsPath(comp_out));
        } else if (*decompress) {
            WriteEmbeddings(Decompress(ReadContainer(dec_in, DefaultIdsPath(dec_in))), dec_out, "");
        } else if (*ae_train) {
            const EmbeddingSet set = LoadEmbeddings(ae_in, ae_in_ids);
            ae_cfg.input_dim = set.dim;
            ae_cfg.seed = *ae_seed;
            auto [model, log] = TrainAutoencoder(set, ae_cfg);
            WriteModel(model, ae_out);
            if (!ae_log.empty()) {
                WriteFileAtomic(ae_log, log.ToCsv());
            }
        } else if (*ae_apply) {
            const AeModel model = ModelFor(apply_model);
            const EmbeddingSet set = LoadEmbeddings(apply_in, apply_in_ids);
            if (apply_mode == "encode") {
                WriteEmbeddings(Encode(model, set), apply_out, "");
            } else if (apply_mode == "decode") {
                WriteEmbeddings(Decode(model, set), apply_out, "");
            } else {
                WriteEmbeddings(Reconstruct(model, set), apply_out, "");
            }
        } else if (*search) {
            const EmbeddingSet queries = LoadEmbeddings(s_queries, s_query_ids);
            std::optional<AeModel> model;
            if (!s_model.empty()) {
                model = ModelFor(s_model);
            }
            const DocSource docs = LoadDocs(s_docs, s_doc_ids, model ? &*model : nullptr);
            const SearchParams params{s_k};
            const RunRanking ranking =
                docs.compressed
                    ? SearchCompressed(queries, *docs.compressed, ParseScoringMode(s_mode), params,
                                       model ? &*model : nullptr)
                    : Search(queries, *docs.floats, params);
            WriteRun(ranking, s_out, s_tag);
        } else if (*eval) {
            const std::vector<std::size_t> ks = ParseKs(e_ks);
            const MetricReport result = Evaluate(ReadRun(e_run), ReadQrelsTsv(e_qrels), ks, e_name);
            if (!e_per_query.empty()) {
                WriteFileAtomic(e_per_query, PerQueryToCsv(result));
            }
            WriteFileAtomic(e_out, MetricsToJson(std::span(&result, 1)));
        } else if (*compare) {
            const auto baseline = MetricsFromJson(ReadFileBytes(c_base));
            VECPRESS_CHECK(baseline.size() == 1, INVALID_CONFIG, "--baseline must hold exactly one method");
            std::vector<DeltaReport> deltas;
            for (const auto& method : MetricsFromJson(ReadFileBytes(c_method))) {
                deltas.push_back(Delta(method, baseline.front()));
            }
            WriteFileAtomic(c_out, DeltasToCsv(deltas));
        } else if (*run) {
            ExperimentConfig config = LoadExperimentConfig(r_config);
            if (!r_output_dir.empty()) {
                config.output_dir = fs::absolute(r_output_dir).lexically_normal().string();
            }
            if (r_seed) {
                config.seed = *r_seed;
            }
            const ExperimentResult result = RunExperiment(config);
            std::cout << RenderTable(result.table);
        } else if (*report) {
            const std::string table = RenderTable(TableFromJson(ReadFileBytes(fs::path(rep_dir) / "table.json")));
            if (rep_out.empty()) {
                std::cout << table;
            } else {
                WriteFileAtomic(rep_out, table);
            }
        }
    } catch (const UsageError& e) {
        Diagnose(kExitUsage, "usage", e.what());
        std::cerr << app.get_subcommands().front()->help();
        return kExitUsage;
    } catch (const VecpressError& e) {
        Diagnose(kExitData, ErrorTypeName(e.type()), e.what());
        return kExitData;
    } catch (const std::exception& e) {
        Diagnose(kExitInternal, "internal", e.what());
        return kExitInternal;
    }
    return kExitOk;
}
