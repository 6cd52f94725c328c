#pragma once

// Command-line front end. Precedence: flags, then the --config file, then
// built-in defaults. Exit codes: 0 ok, 1 other failure, 2 usage, 3 missing or
// unwritable file, 4 schema/model mismatch, 5 malformed data, 6 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chardecomp/attribution/candidates.hpp"
#include "chardecomp/attribution/interaction.hpp"
#include "chardecomp/attribution/patterns.hpp"
#include "chardecomp/attribution/ranking.hpp"
#include "chardecomp/attribution/segeval.hpp"
#include "chardecomp/attribution/synthetic_experiment.hpp"
#include "chardecomp/cd/contribution.hpp"
#include "chardecomp/corpus/conllu.hpp"
#include "chardecomp/corpus/schema.hpp"
#include "chardecomp/corpus/segmentation.hpp"
#include "chardecomp/corpus/toy_corpus.hpp"
#include "chardecomp/error.hpp"
#include "chardecomp/models/evaluate.hpp"
#include "chardecomp/models/model_io.hpp"
#include "chardecomp/models/train.hpp"
#include "chardecomp/report/heatmap.hpp"
#include "chardecomp/report/manifest.hpp"
#include "chardecomp/report/records.hpp"
#include "chardecomp/utf8.hpp"
#include "chardecomp/version.hpp"

namespace chardecomp::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIo = 3,
    kSchema = 4,
    kDataFormat = 5,
    kNumeric = 6,
};

inline constexpr const char* kDataDirEnv = "CHARDECOMP_DATA_DIR";
inline constexpr std::size_t kFinnishSkipLines = 520;

namespace detail {

namespace fs = std::filesystem;

/// Relative paths that do not exist are looked up under the data directory.
inline std::string resolve_input(const std::string& path, const std::string& data_dir) {
    if (path.empty()) throw std::invalid_argument("missing input path");
    if (fs::exists(path)) return path;
    if (!data_dir.empty() && fs::path(path).is_relative()) {
        const fs::path joined = fs::path(data_dir) / path;
        if (fs::exists(joined)) return joined.string();
    }
    throw IoError("input file '" + path + "' not found" +
                  (data_dir.empty() ? std::string() : " (also looked in " + data_dir + ")"));
}

inline std::vector<WordSample> read_conllu(const std::string& path, const FeatureSchema& schema, std::size_t skip,
                                           bool lenient) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    ConlluOptions opt;
    opt.skip_lines = skip;
    opt.strict_values = !lenient;
    try {
        return parse_conllu(in, schema, opt);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline std::vector<SegmentAnnotation> read_segments(const std::string& path, const FeatureSchema* schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return parse_segmentation(in, schema);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes `content` to `path`, or to `out` when no path is given.
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
    } else {
        report::write_text_file(path, content);
    }
}

/// Resolved option values of one subcommand, flags and config file merged.
inline nlohmann::ordered_json resolved_config(const CLI::App& sub) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config") continue;
        if (opt->count() > 0) {
            const auto& r = opt->results();
            if (r.size() == 1) {
                j[name] = r.front();
            } else {
                j[name] = r;
            }
        } else {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

inline std::string fmt(double v, int precision = 4) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(precision) << v;
    return o.str();
}

inline std::string percent(std::size_t num, std::size_t den) {
    return den == 0 ? "n/a" : fmt(100.0 * static_cast<double>(num) / static_cast<double>(den), 2) + "%";
}

inline std::string join_positions(const cd::IndexSet& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out;
}

inline cd::IndexSet parse_positions(const std::string& text) {
    cd::IndexSet out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        const unsigned long v = std::stoul(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("bad position '" + tok + "'");
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct TrainOptions {
    std::uint64_t seed = 1;
    double lr = 0.001;
    std::size_t batch_size = 20;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    double unk_prob = 0.1;
    double stop_at = 2.0;
    std::size_t embed_dim = 50;
    std::size_t hidden = 100;
    std::vector<std::size_t> widths{1, 2, 3, 4, 5, 6};
    std::vector<std::size_t> counts{25, 50, 75, 100, 125, 150};

    void add_to(CLI::App* app) {
        app->add_option("--seed", seed, "Random seed");
        app->add_option("--lr", lr, "Adam learning rate");
        app->add_option("--batch-size", batch_size, "Words per minibatch");
        app->add_option("--max-epochs", max_epochs, "Epoch limit");
        app->add_option("--patience", patience, "Early-stopping patience in epochs");
        app->add_option("--unk-prob", unk_prob, "Singleton-to-unknown replacement probability");
        app->add_option("--stop-at-accuracy", stop_at, "Stop once validation accuracy reaches this value");
        app->add_option("--embed-dim", embed_dim, "Character embedding size");
        app->add_option("--hidden", hidden, "LSTM hidden size per direction");
        app->add_option("--filter-widths", widths, "CNN filter widths")->delimiter(',');
        app->add_option("--filter-counts", counts, "CNN filters per width")->delimiter(',');
    }

    TrainConfig config() const {
        TrainConfig c;
        c.seed = seed;
        c.lr = lr;
        c.batch_size = batch_size;
        c.max_epochs = max_epochs;
        c.patience = patience;
        c.unknown_replace_prob = unk_prob;
        c.target_valid_accuracy = stop_at;
        c.dims.cnn.embed_dim = embed_dim;
        c.dims.cnn.widths = widths;
        c.dims.cnn.counts = counts;
        c.dims.lstm.embed_dim = embed_dim;
        c.dims.lstm.hidden = hidden;
        return c;
    }
};

struct CorpusOptions {
    std::string lang = "es";
    std::string schema_path;
    long skip_lines = -1;
    bool lenient = false;

    void add_to(CLI::App* app) {
        app->add_option("--lang", lang, "Built-in schema: es, fi or sv");
        app->add_option("--schema", schema_path, "Schema JSON file (overrides --lang)");
        app->add_option("--skip-lines", skip_lines, "Lines skipped at the top of the training file (-1: 520 for fi, else 0)");
        app->add_flag("--lenient", lenient, "Count unknown feature values instead of failing");
    }

    FeatureSchema schema(const std::string& data_dir, std::vector<std::pair<std::string, std::string>>& inputs) const {
        if (!schema_path.empty()) {
            const std::string p = resolve_input(schema_path, data_dir);
            inputs.emplace_back(p, report::file_digest(p));
            return report::load_schema(p);
        }
        return builtin_schema(lang);
    }

    std::size_t train_skip(const FeatureSchema& s) const {
        if (skip_lines >= 0) return static_cast<std::size_t>(skip_lines);
        return s.language == "fi" ? kFinnishSkipLines : 0;
    }
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string data_dir;
    report::RunManifest manifest;

    std::string input(const std::string& path) {
        const std::string p = resolve_input(path, data_dir);
        manifest.inputs.emplace_back(p, report::file_digest(p));
        return p;
    }

    void finish(const CLI::App& sub, const std::string& out_path, const std::string& manifest_path = {}) {
        if (out_path.empty() && manifest_path.empty()) return;
        manifest.subcommand = sub.get_name();
        manifest.config = resolved_config(sub);
        report::write_manifest(manifest, manifest_path.empty() ? out_path + ".manifest.json" : manifest_path);
    }
};

inline std::size_t predicted_label(const Model& m, std::size_t head, std::u32string_view word) {
    return predict(m, m.encode(word)).at(head);
}

}  // namespace detail

/// Runs the tool on argv and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Character-level morphological taggers with contextual decomposition", "chardecomp"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "TOML/INI file with option values; flags take precedence");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    std::string data_dir;
    if (const char* env = std::getenv(kDataDirEnv)) data_dir = env;
    app.add_option("--data-dir", data_dir, std::string("Directory searched for relative inputs (default $") + kDataDirEnv + ")");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a tagger");
    detail::CorpusOptions train_corpus;
    detail::TrainOptions train_opts;
    std::string arch_name = "cnn", train_path, valid_path, test_path, model_out;
    train_corpus.add_to(train_cmd);
    train_opts.add_to(train_cmd);
    train_cmd->add_option("--arch", arch_name, "cnn or bilstm");
    train_cmd->add_option("--train", train_path, "Training CoNLL-U file")->required();
    train_cmd->add_option("--valid", valid_path, "Validation CoNLL-U file")->required();
    train_cmd->add_option("--test", test_path, "Test CoNLL-U file, evaluated after training");
    train_cmd->add_option("--out", model_out, "Model file to write")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy per feature class and majority-vote baseline");
    std::string eval_model, eval_test, eval_train, eval_out;
    long eval_skip = -1;
    bool eval_lenient = false;
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--test", eval_test, "Test CoNLL-U file")->required();
    eval_cmd->add_option("--train", eval_train, "Training CoNLL-U file for the majority-vote baseline");
    eval_cmd->add_option("--skip-lines", eval_skip, "Lines skipped at the top of the training file (-1: 520 for fi)");
    eval_cmd->add_flag("--lenient", eval_lenient, "Count unknown feature values instead of failing");
    eval_cmd->add_option("--out", eval_out, "JSON-lines report");

    // attribute
    auto* attr_cmd = app.add_subcommand("attribute", "Contribution of character sets of one word");
    std::string attr_model, attr_word, attr_class, attr_value, attr_mode = "singleton", attr_out;
    std::size_t attr_size = 1;
    attr_cmd->add_option("--model", attr_model, "Model file")->required();
    attr_cmd->add_option("--word", attr_word, "Word to explain")->required();
    attr_cmd->add_option("--class", attr_class, "Feature class")->required();
    attr_cmd->add_option("--value", attr_value, "Feature value (default: the predicted one)");
    attr_cmd->add_option("--mode", attr_mode, "singleton, consecutive or all");
    attr_cmd->add_option("--size", attr_size, "Set size for consecutive and all");
    attr_cmd->add_option("--out", attr_out, "JSON-lines output (default stdout)");

    // segeval
    auto* seg_cmd = app.add_subcommand("segeval", "Top-k agreement with ground-truth segmentations");
    std::string seg_model, seg_segments, seg_mode = "consecutive", seg_out;
    std::size_t seg_topk = 3;
    seg_cmd->add_option("--model", seg_model, "Model file")->required();
    seg_cmd->add_option("--segments", seg_segments, "Segmentation TSV")->required();
    seg_cmd->add_option("--mode", seg_mode, "consecutive (cons) or all");
    seg_cmd->add_option("--topk", seg_topk, "Largest k reported (1-3)");
    seg_cmd->add_option("--out", seg_out, "JSON-lines report");

    // synthetic
    auto* syn_cmd = app.add_subcommand("synthetic", "Synthetic-token validation");
    detail::CorpusOptions syn_corpus;
    detail::TrainOptions syn_train;
    std::string syn_train_path, syn_valid_path, syn_test_path, syn_segments, syn_out;
    std::string syn_class = "Number", syn_pos = "Sing", syn_neg = "Plur", syn_symbol = "\xE2\x80\xA1";
    std::vector<double> syn_levels{1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
    std::vector<std::uint64_t> syn_seeds{1, 2, 3, 4, 5};
    syn_corpus.add_to(syn_cmd);
    syn_train.add_to(syn_cmd);
    syn_cmd->add_option("--train", syn_train_path, "Training CoNLL-U file")->required();
    syn_cmd->add_option("--valid", syn_valid_path, "Validation CoNLL-U file")->required();
    syn_cmd->add_option("--test", syn_test_path, "Test CoNLL-U file")->required();
    syn_cmd->add_option("--segments", syn_segments, "Ground-truth segmentation TSV for the test words");
    syn_cmd->add_option("--target-class", syn_class, "Binary feature class");
    syn_cmd->add_option("--positive", syn_pos, "Value mapped to t=1");
    syn_cmd->add_option("--negative", syn_neg, "Value mapped to t=0");
    syn_cmd->add_option("--symbol", syn_symbol, "Synthetic character");
    syn_cmd->add_option("--levels", syn_levels, "p_syn values")->delimiter(',');
    syn_cmd->add_option("--seeds", syn_seeds, "Seeds per level")->delimiter(',');
    syn_cmd->add_option("--out", syn_out, "JSON-lines report");

    // patterns
    auto* pat_cmd = app.add_subcommand("patterns", "Most frequent highest-contributing character sets");
    std::string pat_model, pat_test, pat_class, pat_value, pat_out;
    std::vector<std::size_t> pat_lengths{1, 2, 3};
    std::size_t pat_top = 4;
    bool pat_lenient = false;
    pat_cmd->add_option("--model", pat_model, "Model file")->required();
    pat_cmd->add_option("--test", pat_test, "Test CoNLL-U file")->required();
    pat_cmd->add_option("--class", pat_class, "Feature class")->required();
    pat_cmd->add_option("--value", pat_value, "Feature value")->required();
    pat_cmd->add_option("--lengths", pat_lengths, "Set sizes")->delimiter(',');
    pat_cmd->add_option("--top", pat_top, "Patterns listed per size on stdout");
    pat_cmd->add_flag("--lenient", pat_lenient, "Count unknown feature values instead of failing");
    pat_cmd->add_option("--out", pat_out, "JSON-lines report");

    // interaction
    auto* int_cmd = app.add_subcommand("interaction", "Max/min contributions across prediction-outcome groups");
    std::string int_model, int_test, int_suffix = "a", int_class = "Gender", int_value = "Fem", int_out;
    bool int_lenient = false;
    int_cmd->add_option("--model", int_model, "Model file")->required();
    int_cmd->add_option("--test", int_test, "Test CoNLL-U file")->required();
    int_cmd->add_option("--suffix", int_suffix, "Selected words end with this string");
    int_cmd->add_option("--class", int_class, "Feature class");
    int_cmd->add_option("--value", int_value, "Feature value");
    int_cmd->add_flag("--lenient", int_lenient, "Count unknown feature values instead of failing");
    int_cmd->add_option("--out", int_out, "JSON-lines report");

    // heatmap
    auto* heat_cmd = app.add_subcommand("heatmap", "SVG heatmap of character contributions");
    std::string heat_model, heat_compare, heat_word, heat_class, heat_value, heat_mode = "singleton", heat_gt, heat_out;
    heat_cmd->add_option("--model", heat_model, "Model file")->required();
    heat_cmd->add_option("--compare", heat_compare, "Second model: extra row, or lower triangle in bigram mode");
    heat_cmd->add_option("--word", heat_word, "Word to explain")->required();
    heat_cmd->add_option("--class", heat_class, "Feature class")->required();
    heat_cmd->add_option("--value", heat_value, "Feature value (default: predicted by --model)");
    heat_cmd->add_option("--mode", heat_mode, "singleton or bigram");
    heat_cmd->add_option("--gt", heat_gt, "Ground-truth positions, e.g. 8 or 4,5");
    heat_cmd->add_option("--out", heat_out, "SVG path; .txt and .jsonl sidecars share its stem")->required();

    // toycorpus
    auto* toy_cmd = app.add_subcommand("toycorpus", "Generate a rule-based corpus with segmentations");
    std::string toy_rules, toy_dir;
    std::size_t toy_words = 2000;
    std::uint64_t toy_seed = 1;
    double toy_valid = 0.1, toy_test = 0.1;
    toy_cmd->add_option("--rules", toy_rules, "Ruleset file")->required();
    toy_cmd->add_option("--words", toy_words, "Words generated before deduplication");
    toy_cmd->add_option("--seed", toy_seed, "Random seed");
    toy_cmd->add_option("--valid-frac", toy_valid, "Validation fraction");
    toy_cmd->add_option("--test-frac", toy_test, "Test fraction");
    toy_cmd->add_option("--out-dir", toy_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    detail::Context ctx{out, err, data_dir, {}};
    try {
        if (*train_cmd) {
            const FeatureSchema schema = train_corpus.schema(data_dir, ctx.manifest.inputs);
            const Architecture arch = parse_architecture(arch_name);
            auto tr = dedupe(detail::read_conllu(ctx.input(train_path), schema, train_corpus.train_skip(schema), train_corpus.lenient));
            auto va = dedupe(detail::read_conllu(ctx.input(valid_path), schema, 0, train_corpus.lenient));
            err << "train: " << tr.samples.size() << " unique words (" << tr.duplicates << " duplicates, "
                << tr.conflicts << " conflicting), valid: " << va.samples.size() << "\n";
            const TrainConfig cfg = train_opts.config();
            ctx.manifest.seed = cfg.seed;
            TrainResult result = train(arch, schema, tr.samples, va.samples, cfg, [&](const EpochRecord& e) {
                err << "epoch " << e.epoch << " loss " << detail::fmt(e.train_loss) << " valid "
                    << detail::fmt(e.valid_accuracy) << "\n";
            });
            save_model(result.model, model_out);
            std::vector<report::Json> history;
            for (const auto& e : result.history) history.push_back(report::epoch_json(e));
            history.push_back(report::Json{{"record", "best"}, {"epoch", result.best_epoch}});
            if (!test_path.empty()) {
                const auto te = dedupe(detail::read_conllu(ctx.input(test_path), schema, 0, train_corpus.lenient)).samples;
                const auto acc = evaluate_accuracy(result.model, te);
                history.push_back(report::accuracy_json(to_string(arch), acc));
                out << "test average accuracy " << detail::fmt(100.0 * acc.average, 2) << "% over " << acc.words
                    << " words\n";
            }
            report::write_text_file(model_out + ".history.jsonl", report::to_jsonl(history));
            out << "best epoch " << result.best_epoch << ", model written to " << model_out << "\n";
            ctx.finish(*train_cmd, model_out);
        } else if (*eval_cmd) {
            const Model m = load_model(ctx.input(eval_model));
            const auto te = dedupe(detail::read_conllu(ctx.input(eval_test), m.schema, 0, eval_lenient)).samples;
            const auto acc = evaluate_accuracy(m, te);
            std::vector<report::Json> records{report::accuracy_json(to_string(m.architecture), acc)};
            std::optional<AccuracyReport> base;
            if (!eval_train.empty()) {
                const std::size_t skip =
                    eval_skip >= 0 ? static_cast<std::size_t>(eval_skip) : (m.schema.language == "fi" ? kFinnishSkipLines : 0);
                const auto tr = dedupe(detail::read_conllu(ctx.input(eval_train), m.schema, skip, eval_lenient)).samples;
                base = evaluate_baseline(majority_vote(m.schema, tr), te);
                records.push_back(report::accuracy_json("majority_vote", *base));
            }
            out << std::left << std::setw(16) << "class" << std::setw(12) << to_string(m.architecture)
                << (base ? "majority" : "") << "\n";
            for (std::size_t i = 0; i < acc.classes.size(); ++i) {
                out << std::setw(16) << acc.classes[i] << std::setw(12) << detail::fmt(100.0 * acc.per_class[i], 2)
                    << (base ? detail::fmt(100.0 * base->per_class[i], 2) : "") << "\n";
            }
            out << std::setw(16) << "average" << std::setw(12) << detail::fmt(100.0 * acc.average, 2)
                << (base ? detail::fmt(100.0 * base->average, 2) : "") << "\n";
            if (!eval_out.empty()) report::write_text_file(eval_out, report::to_jsonl(records));
            ctx.finish(*eval_cmd, eval_out);
        } else if (*attr_cmd) {
            const Model m = load_model(ctx.input(attr_model));
            const std::u32string word = utf8::decode(attr_word);
            if (word.empty()) throw std::invalid_argument("--word must not be empty");
            const FeatureClass& cls = m.schema.at(attr_class);
            const std::string value =
                attr_value.empty() ? cls.labels[detail::predicted_label(m, *m.schema.class_index(attr_class), word)] : attr_value;
            std::vector<cd::IndexSet> sets;
            if (attr_mode == "singleton") {
                sets = enumerate_candidates(word.size(), 1, CandidateMode::Consecutive).sets;
            } else {
                sets = enumerate_candidates(word.size(), attr_size, parse_candidate_mode(attr_mode)).sets;
            }
            auto ranked = rank_candidates(m, word, attr_class, value, sets);
            if (attr_mode == "singleton") {
                std::sort(ranked.begin(), ranked.end(),
                          [](const AttributionResult& a, const AttributionResult& b) { return a.index_set < b.index_set; });
            }
            std::vector<report::Json> records;
            for (const auto& r : ranked) records.push_back(report::attribution_record(word, r));
            detail::emit(attr_out, report::to_jsonl(records), out);
            ctx.finish(*attr_cmd, attr_out);
        } else if (*seg_cmd) {
            if (seg_topk == 0 || seg_topk > kTopkMax) throw std::invalid_argument("--topk must be 1, 2 or 3");
            const Model m = load_model(ctx.input(seg_model));
            const auto annotations = detail::read_segments(ctx.input(seg_segments), nullptr);
            const TopkReport r = topk_segmentation_eval(m, annotations, parse_candidate_mode(seg_mode));
            out << "mode " << to_string(r.mode) << ": " << r.evaluated << " pairs evaluated, " << r.skipped.size()
                << " skipped, " << r.capped << " capped\n";
            for (std::size_t k = 1; k <= seg_topk; ++k) {
                out << "top" << k << " " << r.correct[k - 1] << "/" << r.evaluated << " ("
                    << detail::percent(r.correct[k - 1], r.evaluated) << ")\n";
            }
            if (!seg_out.empty()) report::write_text_file(seg_out, report::to_jsonl(report::topk_json(r)));
            ctx.finish(*seg_cmd, seg_out);
        } else if (*syn_cmd) {
            const FeatureSchema schema = syn_corpus.schema(data_dir, ctx.manifest.inputs);
            const auto tr = dedupe(detail::read_conllu(ctx.input(syn_train_path), schema, syn_corpus.train_skip(schema), syn_corpus.lenient)).samples;
            const auto va = dedupe(detail::read_conllu(ctx.input(syn_valid_path), schema, 0, syn_corpus.lenient)).samples;
            const auto te = dedupe(detail::read_conllu(ctx.input(syn_test_path), schema, 0, syn_corpus.lenient)).samples;
            std::vector<SegmentAnnotation> gt;
            if (!syn_segments.empty()) gt = detail::read_segments(ctx.input(syn_segments), nullptr);
            SyntheticExperimentConfig cfg;
            const std::u32string symbol = utf8::decode(syn_symbol);
            if (symbol.size() != 1) throw std::invalid_argument("--symbol must be a single character");
            cfg.injection.symbol = symbol.front();
            cfg.injection.target_class = syn_class;
            cfg.injection.positive_value = syn_pos;
            cfg.injection.negative_value = syn_neg;
            cfg.levels = syn_levels;
            cfg.seeds = syn_seeds;
            cfg.training = syn_train.config();
            ctx.manifest.seed = syn_train.seed;
            const SyntheticCurves curves = synthetic_experiment(tr, va, te, gt, cfg, [&](double p, const SyntheticRun& r) {
                err << "p_syn " << detail::fmt(p, 2) << " seed " << r.seed << ": predicted " << r.predicted << "/"
                    << r.words << ", synthetic top " << r.synthetic_top << ", gt top " << r.gt_top << "/"
                    << r.words_with_gt << (r.failed ? " (failed)" : "") << "\n";
            });
            out << "p_syn  prediction  syn_attr  gt_attr\n";
            for (const auto& lv : curves.levels) {
                out << detail::fmt(lv.p_syn, 2) << "   " << detail::fmt(lv.prediction_rate) << "      "
                    << detail::fmt(lv.synthetic_rate) << "    " << detail::fmt(lv.gt_rate) << "\n";
            }
            if (!syn_out.empty()) report::write_text_file(syn_out, report::to_jsonl(report::synthetic_json(curves, cfg.injection)));
            ctx.finish(*syn_cmd, syn_out);
        } else if (*pat_cmd) {
            const Model m = load_model(ctx.input(pat_model));
            const auto te = dedupe(detail::read_conllu(ctx.input(pat_test), m.schema, 0, pat_lenient)).samples;
            const PatternReport r = pattern_frequency(m, te, pat_class, pat_value, pat_lengths);
            out << pat_class << "=" << pat_value << ": " << r.correct << " of " << r.scanned
                << " words correctly predicted\n";
            for (const auto& t : r.tables) {
                out << "length " << t.length << ":";
                for (std::size_t i = 0; i < std::min(pat_top, t.patterns.size()); ++i) {
                    out << (i ? ", " : " ") << t.patterns[i].pattern << " ("
                        << detail::fmt(100.0 * t.patterns[i].frequency, 0) << "%)";
                }
                out << "\n";
            }
            if (!pat_out.empty()) report::write_text_file(pat_out, report::to_jsonl(report::patterns_json(r)));
            ctx.finish(*pat_cmd, pat_out);
        } else if (*int_cmd) {
            const Model m = load_model(ctx.input(int_model));
            const auto te = dedupe(detail::read_conllu(ctx.input(int_test), m.schema, 0, int_lenient)).samples;
            InteractionSelector sel{utf8::decode(int_suffix), int_class, int_value};
            const InteractionReport r = interaction_analysis(m, te, sel);
            for (const auto& g : r.groups) {
                out << g.name << ": " << g.size << " words, mean max " << detail::fmt(g.mean_max) << ", mean min "
                    << detail::fmt(g.mean_min) << "\n";
            }
            for (const auto* t : {&r.max_test, &r.min_test}) {
                out << (t == &r.max_test ? "max scores: " : "min scores: ");
                if (!t->skipped.empty()) {
                    out << "skipped (" << t->skipped << ")\n";
                    continue;
                }
                out << "H(" << t->kruskal.df << ") = " << detail::fmt(t->kruskal.h, 3) << ", p = "
                    << detail::fmt(t->kruskal.p, 4) << (t->kruskal.degenerate ? " (degenerate)" : "") << "\n";
                for (const auto& p : t->pairwise) {
                    out << "  " << p.a << " vs " << p.b << ": z = " << detail::fmt(p.z, 3)
                        << ", adjusted p = " << detail::fmt(p.p_adjusted, 3) << "\n";
                }
            }
            for (const auto& n : r.notices) err << "notice: " << n << "\n";
            if (!int_out.empty()) report::write_text_file(int_out, report::to_jsonl(report::interaction_json(r)));
            ctx.finish(*int_cmd, int_out);
        } else if (*heat_cmd) {
            const Model m = load_model(ctx.input(heat_model));
            std::optional<Model> other;
            if (!heat_compare.empty()) other = load_model(ctx.input(heat_compare));
            const std::u32string word = utf8::decode(heat_word);
            if (word.empty()) throw std::invalid_argument("--word must not be empty");
            const auto head = m.schema.class_index(heat_class);
            if (!head) throw SchemaError("feature class '" + heat_class + "' not in model schema");
            const std::string value =
                heat_value.empty() ? m.schema.classes[*head].labels[detail::predicted_label(m, *head, word)] : heat_value;
            const cd::IndexSet gt = detail::parse_positions(heat_gt);
            for (std::size_t p : gt) {
                if (p >= word.size()) throw std::invalid_argument("--gt position outside the word");
            }
            const std::string title = heat_class + "=" + value + ": " + heat_word;
            auto label_of = [](const std::string& path) { return std::filesystem::path(path).stem().string(); };
            report::HeatmapSpec spec;
            if (heat_mode == "singleton") {
                spec.title = title;
                spec.column_labels.push_back("^");
                for (char32_t c : word) spec.column_labels.push_back(utf8::encode(c));
                spec.column_labels.push_back("$");
                for (std::size_t p : gt) spec.bold_columns.insert(p + 1);
                auto row = [&](const Model& model) {
                    const ClassTarget target = resolve_target(model.schema, heat_class, value);
                    const cd::WordDecomposer dec(model, model.encode(word));
                    std::vector<double> scores;
                    for (std::size_t p = 0; p < word.size() + 2; ++p) scores.push_back(dec.contribution({p}, target.head, target.label).score);
                    return scores;
                };
                spec.row_labels.push_back(label_of(heat_model));
                spec.scores.push_back(row(m));
                if (other) {
                    spec.row_labels.push_back(label_of(heat_compare));
                    spec.scores.push_back(row(*other));
                }
            } else if (heat_mode == "bigram") {
                if (word.size() < 2) throw std::invalid_argument("bigram heatmaps need at least two characters");
                auto grid = [&](const Model& model) {
                    const ClassTarget target = resolve_target(model.schema, heat_class, value);
                    const cd::WordDecomposer dec(model, model.encode(word));
                    std::vector<std::vector<double>> g(word.size(), std::vector<double>(word.size(), 0.0));
                    for (std::size_t i = 0; i < word.size(); ++i) {
                        for (std::size_t j = i + 1; j < word.size(); ++j) {
                            g[i][j] = dec.contribution({i + 1, j + 1}, target.head, target.label).score;
                        }
                    }
                    return g;
                };
                std::vector<std::string> labels;
                for (char32_t c : word) labels.push_back(utf8::encode(c));
                std::optional<std::vector<std::vector<double>>> lower;
                if (other) lower = grid(*other);
                spec = report::bigram_grid(title + (other ? " (upper: " + label_of(heat_model) + ", lower: " +
                                                                label_of(heat_compare) + ")"
                                                          : std::string()),
                                           labels, grid(m), lower);
                for (std::size_t p : gt) {
                    spec.bold_columns.insert(p);
                    spec.bold_rows.insert(p);
                }
            } else {
                throw std::invalid_argument("unknown heatmap mode '" + heat_mode + "' (expected singleton or bigram)");
            }
            for (const auto& p : report::emit_heatmap(spec, heat_out)) out << "wrote " << p << "\n";
            ctx.finish(*heat_cmd, heat_out);
        } else if (*toy_cmd) {
            std::ifstream rules_in(ctx.input(toy_rules));
            const ToyRuleset rules = ToyRuleset::parse(rules_in);
            const ToySplits s = make_toy_splits(rules, toy_words, toy_seed, toy_valid, toy_test);
            std::filesystem::create_directories(toy_dir);
            const std::filesystem::path dir(toy_dir);
            auto write = [&](const std::string& name, const auto& fn) {
                std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
                if (!f) throw IoError("cannot open '" + (dir / name).string() + "' for writing");
                fn(f);
            };
            write("train.conllu", [&](std::ostream& o) { write_conllu(o, s.train); });
            write("valid.conllu", [&](std::ostream& o) { write_conllu(o, s.valid); });
            write("test.conllu", [&](std::ostream& o) { write_conllu(o, s.test); });
            write("test_segments.tsv", [&](std::ostream& o) { write_segmentation(o, s.test_annotations); });
            write("schema.json", [&](std::ostream& o) { o << report::schema_json(s.schema).dump(2) << '\n'; });
            out << "train " << s.train.size() << ", valid " << s.valid.size() << ", test " << s.test.size()
                << " words, " << s.test_annotations.size() << " test segmentations in " << toy_dir << "\n";
            ctx.manifest.seed = toy_seed;
            ctx.finish(*toy_cmd, {}, (dir / "manifest.json").string());
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kSchema;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kDataFormat;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kDataFormat;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

}  // namespace chardecomp::cli
