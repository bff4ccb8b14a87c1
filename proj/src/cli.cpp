#include "dkge/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dkge/baselines.hpp"
#include "dkge/bitpack.hpp"
#include "dkge/dataset.hpp"
#include "dkge/dkge.hpp"
#include "dkge/eval.hpp"
#include "dkge/io.hpp"
#include "dkge/quantize.hpp"

namespace dkge::cli {

namespace fs = std::filesystem;

namespace {

// Flat `key = value` config files. `#` starts a comment; parsing stops at a
// `[history]` marker so run manifests can embed their epoch log and still be
// fed back through --config. Values are whitespace-split for multi-valued
// options.
class FlatConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        std::ostringstream out;
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames()[0];
            if (name == "help" || name == "config") continue;
            std::string value;
            if (opt->get_expected_min() == 0) {
                if (opt->count() == 0) continue;  // unset flags stay absent
                value = "true";
            } else if (opt->count() > 0) {
                const auto& results = opt->results();
                for (size_t i = 0; i < results.size(); ++i)
                    value += (i ? " " : "") + results[i];
            } else if (default_also) {
                value = opt->get_default_str();
            } else {
                continue;
            }
            out << name << " = " << value << "\n";
        }
        return out.str();
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::vector<CLI::ConfigItem> items;
        std::string line;
        while (std::getline(input, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                const size_t a = s.find_first_not_of(" \t");
                const size_t b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed == "[history]") break;
            const size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw CLI::ConfigError("expected `key = value`, got: " + trimmed);
            CLI::ConfigItem item;
            item.name = trim(trimmed.substr(0, eq));
            std::istringstream values(trim(trimmed.substr(eq + 1)));
            std::string token;
            while (values >> token) item.inputs.push_back(token);
            items.push_back(std::move(item));
        }
        return items;
    }
};

void attach_common(CLI::App& app) {
    app.set_config("--config", "", "flat key = value config file; flags take precedence");
    app.config_formatter(std::make_shared<FlatConfig>());
    app.allow_config_extras(false);
}

void write_manifest(const CLI::App& app, const fs::path& path, const std::string& history = {}) {
    io::AtomicFile file(path);
    file.stream() << "# dkge run manifest (re-usable via --config)\n"
                  << app.config_to_str(true, false);
    if (!history.empty()) file.stream() << "[history]\n" << history;
    file.commit();
}

std::map<std::string, std::string> read_kv_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t");
            const size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<Split> parse_filter_splits(const std::string& spec) {
    std::vector<Split> splits;
    if (spec == "none") return splits;
    std::istringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token == "train")
            splits.push_back(Split::train);
        else if (token == "valid")
            splits.push_back(Split::valid);
        else if (token == "test")
            splits.push_back(Split::test);
        else
            throw std::invalid_argument("unknown filter split: " + token);
    }
    return splits;
}

int cmd_prepare(CLI::App& app, int argc, const char* const* argv) {
    std::string train_path, valid_path, test_path, out_path;
    app.add_option("--train", train_path, "training triple file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--valid", valid_path, "validation triple file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--test", test_path, "test triple file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "output dataset bundle (.dkgd)")->required();
    app.parse(argc, argv);

    const Dataset ds = load_dataset(train_path, valid_path, test_path);
    write_bundle(ds, out_path);
    write_manifest(app, out_path + ".manifest.txt");
    std::printf("wrote %s: %llu entities, %llu relations, %zu/%zu/%zu triples\n",
                out_path.c_str(), static_cast<unsigned long long>(ds.vocab.entity_count()),
                static_cast<unsigned long long>(ds.vocab.relation_count()), ds.train.size(),
                ds.valid.size(), ds.test.size());
    return 0;
}

int cmd_train(CLI::App& app, int argc, const char* const* argv) {
    std::string data_path, out_prefix;
    TrainConfig cfg;
    app.add_option("--data", data_path, "dataset bundle from `prepare`")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--dim", cfg.k, "code length in bits")->capture_default_str();
    app.add_option("--margin", cfg.gamma, "margin gamma; < 0 selects 2*dim")
        ->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "balance/decorrelation weight for entities")
        ->capture_default_str();
    app.add_option("--beta", cfg.beta, "balance/decorrelation weight for relations")
        ->capture_default_str();
    app.add_option("--negatives", cfg.negatives_per_positive, "corruptions per positive")
        ->capture_default_str();
    app.add_option("--epochs", cfg.max_epochs, "maximum training epochs")->capture_default_str();
    app.add_option("--seed", cfg.seed, "rng seed")->capture_default_str();
    app.add_option("--convergence-tol", cfg.convergence_tol,
                   "relative objective-change stop threshold")
        ->capture_default_str();
    app.add_flag("--filter-false-negatives", cfg.filter_false_negatives,
                 "resample corruptions that exist in train");
    app.add_flag("--resample-negatives", cfg.resample_negatives,
                 "draw fresh corruptions every epoch instead of once");
    app.add_option("--out", out_prefix, "output model prefix")->required();
    app.parse(argc, argv);

    const Dataset ds = read_bundle(data_path);
    const FitResult res = fit(ds, cfg);
    write_codes(res.model.entities, out_prefix + ".entities.dkgb");
    write_codes(res.model.relations, out_prefix + ".relations.dkgb");

    std::ostringstream history;
    history << "epoch,objective,entity_flips,relation_flips\n";
    history.precision(17);
    for (uint32_t e = 0; e < res.state.epoch; ++e)
        history << e << ',' << res.state.objective[e] << ',' << res.state.entity_flips[e] << ','
                << res.state.relation_flips[e] << "\n";
    write_manifest(app, out_prefix + ".manifest.txt", history.str());
    std::printf("trained %u epochs (%s); wrote %s.{entities,relations}.dkgb\n", res.state.epoch,
                stop_reason_name(res.state.stop_reason), out_prefix.c_str());
    return 0;
}

int cmd_train_baseline(CLI::App& app, int argc, const char* const* argv) {
    std::string data_path, out_path, model = "transe", norm = "l1";
    BaselineConfig cfg;
    app.add_option("--data", data_path, "dataset bundle from `prepare`")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--model", model, "baseline kind")
        ->check(CLI::IsMember({"transe", "distmult"}))
        ->capture_default_str();
    app.add_option("--dim", cfg.dim, "embedding dimension")->capture_default_str();
    app.add_option("--margin", cfg.margin, "ranking margin")->capture_default_str();
    app.add_option("--lr", cfg.learning_rate, "SGD learning rate")->capture_default_str();
    app.add_option("--epochs", cfg.epochs, "training epochs")->capture_default_str();
    app.add_option("--negatives", cfg.negatives, "corruptions per positive per epoch")
        ->capture_default_str();
    app.add_option("--norm", norm, "transe distance norm")
        ->check(CLI::IsMember({"l1", "l2"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "rng seed")->capture_default_str();
    app.add_option("--out", out_path, "output embedding file (.dkgc)")->required();
    app.parse(argc, argv);

    cfg.kind = model == "transe" ? BaselineKind::transe : BaselineKind::distmult;
    cfg.norm = norm == "l1" ? Norm::l1 : Norm::l2;
    const Dataset ds = read_bundle(data_path);
    const BaselineFitResult res = train_baseline(ds, cfg);
    write_embedding(res.embedding, out_path);
    write_manifest(app, out_path + ".manifest.txt");
    std::printf("trained %s for %u epochs (final loss %.6g); wrote %s\n", model.c_str(),
                cfg.epochs, res.loss_history.empty() ? 0.0 : res.loss_history.back(),
                out_path.c_str());
    return 0;
}

int cmd_quantize(CLI::App& app, int argc, const char* const* argv) {
    std::string in_path, out_prefix, method = "sign";
    uint32_t bits = 8;
    app.add_option("--in", in_path, "continuous embedding (.dkgc)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--method", method, "quantization method")
        ->check(CLI::IsMember({"sign", "equal", "lloyd"}))
        ->capture_default_str();
    app.add_option("--bits", bits, "bits per value for equal/lloyd")
        ->check(CLI::Range(1u, 16u))
        ->capture_default_str();
    app.add_option("--out", out_prefix, "output model prefix")->required();
    app.parse(argc, argv);

    const ContinuousEmbedding emb = read_embedding(in_path);
    const QuantizeMethod m = parse_quantize_method(method);
    const uint32_t levels = m == QuantizeMethod::sign ? 2 : (1u << bits);
    const QuantizedModel qm = quantize_embedding(emb, m, levels);
    write_codes(qm.entities, out_prefix + ".entities.dkgb");
    write_codes(qm.relations, out_prefix + ".relations.dkgb");
    write_quantizer_sidecar(qm, out_prefix + ".quant.txt");
    write_manifest(app, out_prefix + ".manifest.txt");
    std::printf("quantized %s (%s, k=%u); wrote %s.{entities,relations}.dkgb + .quant.txt\n",
                in_path.c_str(), method.c_str(), qm.entities.code_length(), out_prefix.c_str());
    return 0;
}

int cmd_eval(CLI::App& app, int argc, const char* const* argv) {
    std::string data_path, model_path, out_dir;
    std::string filter_spec = "train,valid,test", ties = "midrank", score_mode = "binary";
    std::string directions = "head,tail", norm = "l1";
    uint32_t continuous_bits = 32;
    app.add_option("--data", data_path, "dataset bundle from `prepare`")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--model", model_path,
                   "model prefix (DKGE or quantized) or .dkgc continuous embedding")
        ->required();
    app.add_option("--filter", filter_spec, "splits removed from candidates, or `none`")
        ->capture_default_str();
    app.add_option("--ties", ties, "rank tie policy")
        ->check(CLI::IsMember({"midrank", "optimistic", "pessimistic"}))
        ->capture_default_str();
    app.add_option("--score-mode", score_mode, "quantized model scoring")
        ->check(CLI::IsMember({"binary", "reconstruct"}))
        ->capture_default_str();
    app.add_option("--directions", directions, "ranked directions (head,tail)")
        ->capture_default_str();
    app.add_option("--norm", norm, "transe norm for continuous scoring")
        ->check(CLI::IsMember({"l1", "l2"}))
        ->capture_default_str();
    app.add_option("--continuous-bits", continuous_bits,
                   "per-value bits assumed for continuous model memory")
        ->check(CLI::IsMember({32u, 64u}))
        ->capture_default_str();
    app.add_option("--out", out_dir, "output metrics directory")->required();
    app.parse(argc, argv);

    const Dataset ds = read_bundle(data_path);
    if (ds.test.empty()) throw std::runtime_error("dataset bundle has an empty test split");

    EvalConfig cfg;
    cfg.filter_splits = parse_filter_splits(filter_spec);
    cfg.ties = parse_tie_policy(ties);
    cfg.eval_head = directions.find("head") != std::string::npos;
    cfg.eval_tail = directions.find("tail") != std::string::npos;

    FilterIndex filter;
    const FilterIndex* filter_ptr = nullptr;
    if (!cfg.filter_splits.empty()) {
        filter = FilterIndex::build(ds, cfg.filter_splits);
        filter_ptr = &filter;
    }

    // Resolve the model: quantized prefix (sidecar present), continuous
    // embedding file, or DKGE code prefix.
    std::vector<std::pair<std::string, std::string>> extra{{"model", model_path}};
    ModelParams dkge_model;
    QuantizedModel quant_model;
    ContinuousEmbedding cont_model;
    std::unique_ptr<Scorer> scorer;
    ModelDescriptor desc;
    desc.n = ds.vocab.entity_count();
    desc.m = ds.vocab.relation_count();
    desc.continuous_value_bits = continuous_bits;
    if (fs::exists(model_path + ".quant.txt")) {
        quant_model = read_quantizer_sidecar(model_path + ".quant.txt");
        quant_model.entities = read_codes(model_path + ".entities.dkgb");
        quant_model.relations = read_codes(model_path + ".relations.dkgb");
        scorer = std::make_unique<QuantizedScorer>(
            quant_model, score_mode == "binary" ? ScoreMode::binary : ScoreMode::reconstruct);
        desc.storage = ModelDescriptor::Storage::binary;
        desc.code_bits = quant_model.entities.code_length();
        extra.emplace_back("model_kind",
                           std::string("quantized-") + baseline_kind_name(quant_model.source_kind) +
                               "-" + quantize_method_name(quant_model.quantizer.method));
        extra.emplace_back("score_mode", score_mode);
    } else if (fs::exists(model_path) && !fs::is_directory(model_path)) {
        cont_model = read_embedding(model_path);
        scorer = std::make_unique<ContinuousScorer>(cont_model,
                                                    norm == "l1" ? Norm::l1 : Norm::l2);
        desc.storage = ModelDescriptor::Storage::continuous;
        desc.code_bits = cont_model.dim;
        extra.emplace_back("model_kind",
                           std::string("continuous-") + baseline_kind_name(cont_model.kind));
    } else {
        dkge_model.entities = read_codes(model_path + ".entities.dkgb");
        dkge_model.relations = read_codes(model_path + ".relations.dkgb");
        scorer = std::make_unique<DkgeScorer>(dkge_model);
        desc.storage = ModelDescriptor::Storage::binary;
        desc.code_bits = dkge_model.entities.code_length();
        extra.emplace_back("model_kind", "dkge");
    }
    if (scorer->entity_count() != ds.vocab.entity_count())
        throw std::runtime_error("model entity count does not match the dataset bundle");

    MetricsReport report = evaluate(ds.test, *scorer, filter_ptr, cfg);
    report.memory_bits = memory_footprint_bits(desc);

    fs::create_directories(out_dir);
    write_metrics_file(fs::path(out_dir) / "metrics.txt", report, cfg, extra);
    write_rank_records_csv(fs::path(out_dir) / "ranks.csv", report.records);
    write_manifest(app, fs::path(out_dir) / "manifest.txt");
    std::printf("evaluated %llu records: MR %.2f MRR %.4f Hits@10 %.4f (memory %llu bits)\n",
                static_cast<unsigned long long>(report.record_count), report.mr, report.mrr,
                report.hits.at(10), static_cast<unsigned long long>(report.memory_bits));
    return 0;
}

int cmd_report(CLI::App& app, int argc, const char* const* argv) {
    std::vector<std::string> run_dirs;
    std::string out_path;
    app.add_option("--runs", run_dirs, "metrics directories produced by `eval`")
        ->required()
        ->expected(-1);
    app.add_option("--out", out_path, "output curve CSV")->required();
    app.parse(argc, argv);

    std::ostringstream rows;
    rows << "memory_bits,mrr,hits_at_10\n";
    for (const std::string& dir : run_dirs) {
        const auto kv = read_kv_file(fs::path(dir) / "metrics.txt");
        for (const char* key : {"memory_bits", "mrr", "hits_at_10"})
            if (!kv.contains(key))
                throw std::runtime_error(dir + "/metrics.txt is missing key " + key);
        rows << kv.at("memory_bits") << ',' << kv.at("mrr") << ',' << kv.at("hits_at_10")
             << "\n";
    }
    io::AtomicFile file(out_path);
    file.stream() << rows.str();
    file.commit();
    write_manifest(app, out_path + ".manifest.txt");
    std::printf("wrote %s (%zu runs)\n", out_path.c_str(), run_dirs.size());
    return 0;
}

void print_usage() {
    std::fprintf(stderr,
                 "usage: dkge <command> [options]\n"
                 "\n"
                 "commands:\n"
                 "  prepare         parse triple files into a dataset bundle\n"
                 "  train           learn binary codes with discrete coordinate descent\n"
                 "  train-baseline  train a continuous TransE/DistMult embedding\n"
                 "  quantize        hash a continuous embedding into binary codes\n"
                 "  eval            filtered link-prediction metrics for a model\n"
                 "  report          collect (memory, MRR, Hits@10) rows across runs\n"
                 "\n"
                 "run `dkge <command> --help` for the command's options.\n");
}

}  // namespace

int run(int argc, const char* const* argv) {
    if (argc < 2) {
        print_usage();
        return 2;
    }
    const std::string command = argv[1];
    if (command == "--help" || command == "-h" || command == "help") {
        print_usage();
        return 0;
    }

    using Handler = int (*)(CLI::App&, int, const char* const*);
    static const std::map<std::string, Handler> handlers{
        {"prepare", cmd_prepare},         {"train", cmd_train},
        {"train-baseline", cmd_train_baseline}, {"quantize", cmd_quantize},
        {"eval", cmd_eval},               {"report", cmd_report},
    };
    const auto it = handlers.find(command);
    if (it == handlers.end()) {
        std::fprintf(stderr, "dkge: unknown command '%s'\n", command.c_str());
        print_usage();
        return 2;
    }

    CLI::App app{"dkge " + command};
    attach_common(app);
    try {
        return it->second(app, argc - 1, argv + 1);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "dkge %s: error: %s\n", command.c_str(), e.what());
        return 1;
    }
}

}  // namespace dkge::cli
