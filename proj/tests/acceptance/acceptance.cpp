// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "chardecomp/cli.hpp"

using namespace chardecomp;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::string num(double v, int precision = 4) {
    std::ostringstream o;
    o.precision(precision);
    o << v;
    return o.str();
}

std::string data_file(const std::string& name) { return std::string(CHARDECOMP_SOURCE_DIR) + "/data/" + name; }

ToyRuleset load_rules(const std::string& name) {
    std::ifstream in(data_file(name));
    if (!in) throw IoError("cannot open " + data_file(name));
    return ToyRuleset::parse(in);
}

std::vector<double> sum_parts(const cd::Decomposition& d) {
    std::vector<double> s(d.beta.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = d.beta[i] + d.gamma[i];
    return s;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "chardecomp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (code != 0) std::cerr << err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<nlohmann::json> read_jsonl(const fs::path& p) {
    std::vector<nlohmann::json> out;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("chardecomp_acceptance_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// 1. CD exactness: beta + gamma reproduces the forward representation; S = {} gives beta = 0.
Outcome cd_exactness() {
    Rng rng(2024);
    double worst = 0.0;
    bool null_exact = true;
    for (Architecture arch : {Architecture::Cnn, Architecture::Bilstm}) {
        for (int i = 0; i < 1000; ++i) {
            const Model m = oracle::random_model(arch, rng, rng.uniform(0.25, 2.0));
            const auto ids = m.encode(oracle::random_word(rng, 1, 12));
            const auto forward = representation(m, ids);
            worst = std::max(worst, oracle::max_abs_diff(sum_parts(cd::decompose(m, ids, oracle::random_subset(rng, ids))), forward));
            for (double b : cd::decompose(m, ids, {}).beta) null_exact = null_exact && b == 0.0;
        }
    }
    return verdict(worst <= 1e-9 && null_exact,
                   "max |beta+gamma-forward| = " + num(worst) + " (limit 1e-09), empty set beta exactly 0: " +
                       (null_exact ? "yes" : "no"));
}

// 2. Linearization against all-permutation brute force, plus the hand case.
Outcome linearization() {
    const std::vector<double> hand{2.0, -3.0, 0.5};
    const auto got = cd::linearize_activation(std::span<const double>(hand), cd::relu);
    const bool hand_ok = got == std::vector<double>{1.0, -1.25, 0.25};
    Rng rng(6);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::vector<double> y{3.0 * rng.normal(), 3.0 * rng.normal(), 3.0 * rng.normal()};
        if (cd::linearize_activation(std::span<const double>(y), cd::relu) != oracle::brute_linearize(y, oracle::relu)) {
            ++mismatches;
        }
    }
    return verdict(hand_ok && mismatches == 0, "hand case (2,-3,0.5) -> (" + num(got[0]) + "," + num(got[1]) + "," +
                                                   num(got[2]) + "); brute-force mismatches " +
                                                   std::to_string(mismatches) + "/10000");
}

// 3. Tape gradients against central differences.
Outcome gradient_check() {
    Rng rng(31);
    double worst = 0.0;
    std::string where;
    for (Architecture arch : {Architecture::Cnn, Architecture::Bilstm}) {
        for (int i = 0; i < 100; ++i) {
            Model m = oracle::random_model(arch, rng);
            const auto ids = m.encode(oracle::random_word(rng, 1, 8));
            const auto r = oracle::gradient_check(m, ids, {rng.below(3), rng.below(3)});
            if (r.worst > worst) {
                worst = r.worst;
                where = to_string(arch) + " " + r.where;
            }
        }
    }
    return verdict(worst <= 1e-4, "worst relative error " + num(worst) + " (limit 1e-04) at " + where);
}

// 4. Synthetic-token validation on the noisy Number toy corpus.
Outcome synthetic_validation() {
    const ToySplits s = make_toy_splits(load_rules("number_rules.tsv"), 2000, 1);
    SyntheticExperimentConfig cfg;
    cfg.levels = {1.0, 0.5};
    cfg.seeds = {1, 2, 3};
    cfg.training.max_epochs = 30;
    const SyntheticCurves c = synthetic_experiment(s.train, s.valid, s.test, s.test_annotations, cfg);
    const SyntheticLevel& full = c.levels.at(0);
    const SyntheticLevel& half = c.levels.at(1);
    std::size_t failed = 0;
    for (const auto& lv : c.levels) {
        for (const auto& r : lv.runs) failed += r.failed ? 1 : 0;
    }
    const bool ok = failed == 0 && full.prediction_rate == 1.0 && full.synthetic_rate >= 0.95 &&
                    half.synthetic_rate <= 0.10 && half.gt_rate >= 0.60;
    return verdict(ok, "p=1.0: prediction " + num(100 * full.prediction_rate) + "% (need 100), synthetic top-1 " +
                           num(100 * full.synthetic_rate) + "% (need >=95); p=0.5: synthetic " +
                           num(100 * half.synthetic_rate) + "% (need <=10), ground truth " + num(100 * half.gt_rate) +
                           "% (need >=60); failed runs " + std::to_string(failed));
}

// 5. Deterministic suffix corpus: accuracy and top-1 singleton on the rule suffix.
Outcome toy_rule_attribution() {
    const ToySplits s = make_toy_splits(load_rules("suffix_rules.tsv"), 2000, 1);
    TrainConfig cfg;
    cfg.max_epochs = 20;
    cfg.target_valid_accuracy = 0.99;
    const Model m = train(Architecture::Cnn, s.schema, s.train, s.valid, cfg).model;
    const double acc = evaluate_accuracy(m, s.test).average;
    std::size_t correct = 0, hits = 0;
    for (const auto& a : s.test_annotations) {
        const auto head = *m.schema.class_index(a.feature_class);
        if (m.schema.classes[head].labels[predict(m, m.encode(a.surface))[head]] != a.value) continue;
        ++correct;
        const auto ranked = rank_candidates(m, a.surface, a.feature_class, a.value,
                                            enumerate_candidates(a.surface.size(), 1, CandidateMode::Consecutive).sets);
        hits += ranked.front().index_set == a.index_set ? 1 : 0;
    }
    const double hit_rate = correct == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(correct);
    return verdict(acc >= 0.99 && hit_rate >= 0.90, "test accuracy " + num(100 * acc) + "% (need >=99), suffix top-1 " +
                                                        std::to_string(hits) + "/" + std::to_string(correct) + " = " +
                                                        num(100 * hit_rate) + "% (need >=90)");
}

std::optional<fs::path> find_file(const fs::path& root, const std::string& name) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().filename() == name) return e.path();
    }
    return std::nullopt;
}

// 6. Tagging accuracy on UD 1.4 data supplied by the user.
Outcome ud_reproduction() {
    const char* root = std::getenv("CHARDECOMP_UD_DIR");
    if (!root || !*root) return {Status::Skip, "set CHARDECOMP_UD_DIR to a directory holding the UD 1.4 treebanks"};
    struct Target {
        std::string lang;
        Architecture arch;
        double accuracy;
    };
    const std::vector<Target> targets{{"es", Architecture::Cnn, 0.8893},
                                      {"es", Architecture::Bilstm, 0.8933},
                                      {"fi", Architecture::Cnn, 0.9481},
                                      {"sv", Architecture::Cnn, 0.9009}};
    const std::map<std::string, double> majority{{"es", 0.7239}, {"fi", 0.8220}, {"sv", 0.6979}};
    const fs::path work = scratch_dir("ud");
    bool ok = true;
    std::string detail;
    for (const auto& t : targets) {
        const auto tr = find_file(root, t.lang + "-ud-train.conllu");
        const auto dev = find_file(root, t.lang + "-ud-dev.conllu");
        const auto te = find_file(root, t.lang + "-ud-test.conllu");
        if (!tr || !dev || !te) {
            ok = false;
            detail += t.lang + ": treebank files missing; ";
            continue;
        }
        const std::string model = (work / (t.lang + "_" + to_string(t.arch) + ".bin")).string();
        const std::string report = model + ".eval.jsonl";
        if (run_cli({"train", "--lang", t.lang, "--arch", to_string(t.arch), "--train", tr->string(), "--valid",
                     dev->string(), "--out", model}) != 0 ||
            run_cli({"evaluate", "--model", model, "--test", te->string(), "--train", tr->string(), "--out", report}) != 0) {
            ok = false;
            detail += t.lang + " " + to_string(t.arch) + ": run failed; ";
            continue;
        }
        const auto records = read_jsonl(report);
        const double acc = records.at(0)["average"].get<double>();
        const double base = records.at(1)["average"].get<double>();
        const bool acc_ok = std::abs(acc - t.accuracy) <= 0.015;
        const bool base_ok = std::abs(base - majority.at(t.lang)) <= 0.001;
        ok = ok && acc_ok && base_ok;
        detail += t.lang + " " + to_string(t.arch) + " " + num(100 * acc) + "% (target " + num(100 * t.accuracy) +
                  "+-1.5), majority " + num(100 * base) + "% (target " + num(100 * majority.at(t.lang)) + "+-0.1); ";
        if (t.lang == "es" && t.arch == Architecture::Cnn) {
            const auto seg = find_file(root, "es-segments.tsv");
            if (!seg) {
                ok = false;
                detail += "es-segments.tsv missing; ";
                continue;
            }
            const std::string seg_out = model + ".seg.jsonl";
            if (run_cli({"segeval", "--model", model, "--segments", seg->string(), "--mode", "consecutive", "--out", seg_out}) != 0) {
                ok = false;
                detail += "segeval failed; ";
                continue;
            }
            const auto sum = read_jsonl(seg_out).back();
            const long top1 = sum["top1"].get<long>();
            ok = ok && std::labs(top1 - 273) <= 15;
            detail += "es CNN consecutive top-1 " + std::to_string(top1) + "/" + std::to_string(sum["evaluated"].get<long>()) +
                      " (target 273+-15); ";
        }
    }
    fs::remove_all(work);
    return verdict(ok, detail);
}

// 7. Statistics oracle.
Outcome statistics() {
    const std::vector<stats::NamedGroup> g{{"a", {1, 2, 3}}, {"b", {4, 5, 6}}, {"c", {7, 8, 9}}};
    const auto kw = stats::kruskal_wallis(g);
    const double tail = stats::chi2_upper_tail(7.2, 2);
    bool bounded = true;
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<stats::NamedGroup> groups(2 + trial % 4);
        for (std::size_t i = 0; i < groups.size(); ++i) {
            groups[i].name = std::to_string(i);
            for (int k = 0; k < 3 + trial % 7; ++k) groups[i].values.push_back(rng.normal() + 0.4 * static_cast<double>(i));
        }
        for (const auto& p : stats::dunn_pairwise(groups)) bounded = bounded && p.p <= p.p_adjusted && p.p_adjusted <= 1.0;
    }
    for (const auto& p : stats::dunn_pairwise(g)) bounded = bounded && p.p <= p.p_adjusted && p.p_adjusted <= 1.0;
    const bool h_ok = kw.h == 7.2 && kw.df == 2;
    const bool tail_ok = std::abs(tail - std::exp(-3.6)) <= 1e-10;
    return verdict(h_ok && tail_ok && bounded, "H = " + num(kw.h, 17) + ", chi2 tail(7.2, 2) - e^-3.6 = " +
                                                   num(tail - std::exp(-3.6)) + ", Dunn p in [unadjusted, 1]: " +
                                                   (bounded ? "yes" : "no"));
}

// 8. Same inputs and options give byte-identical outputs.
Outcome determinism() {
    const fs::path d = scratch_dir("determinism");
    const auto at = [&](const std::string& n) { return (d / n).string(); };
    if (run_cli({"toycorpus", "--rules", data_file("suffix_rules.tsv"), "--words", "600", "--out-dir", d.string()}) != 0) {
        return {Status::Fail, "toycorpus failed"};
    }
    const auto train_args = [&](const std::string& out) {
        return std::vector<std::string>{"train", "--schema", at("schema.json"), "--train", at("train.conllu"), "--valid",
                                        at("valid.conllu"), "--out", out, "--max-epochs", "3"};
    };
    bool ok = run_cli(train_args(at("a.bin"))) == 0 && run_cli(train_args(at("b.bin"))) == 0;
    const bool models = ok && slurp(at("a.bin")) == slurp(at("b.bin"));
    bool reports = ok;
    for (const std::string tag : {"1", "2"}) {
        reports = reports &&
                  run_cli({"segeval", "--model", at("a.bin"), "--segments", at("test_segments.tsv"), "--mode", "all",
                           "--out", at("seg" + tag + ".jsonl")}) == 0 &&
                  run_cli({"patterns", "--model", at("a.bin"), "--test", at("test.conllu"), "--class", "Gender",
                           "--value", "Fem", "--out", at("pat" + tag + ".jsonl")}) == 0;
    }
    reports = reports && slurp(at("seg1.jsonl")) == slurp(at("seg2.jsonl")) &&
              slurp(at("pat1.jsonl")) == slurp(at("pat2.jsonl")) && !slurp(at("seg1.jsonl")).empty();
    fs::remove_all(d);
    return verdict(models && reports, std::string("model files identical: ") + (models ? "yes" : "no") +
                                          ", segeval/patterns reports identical: " + (reports ? "yes" : "no"));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"CD exactness", cd_exactness},
        {"linearization oracle", linearization},
        {"gradient check", gradient_check},
        {"synthetic-token validation", synthetic_validation},
        {"toy-rule attribution", toy_rule_attribution},
        {"UD tagging and segmentation", ud_reproduction},
        {"statistics oracle", statistics},
        {"determinism", determinism},
    };
    bool any_fail = false;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        any_fail = any_fail || o.status == Status::Fail;
        std::printf("criterion %zu %s: %s (%s) [%.1fs]\n", i + 1, tag, criteria[i].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return any_fail ? 1 : 0;
}
