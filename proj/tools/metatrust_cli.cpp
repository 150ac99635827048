#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "metatrust/fakeness.hpp"
#include "metatrust/harness.hpp"
#include "metatrust/intention.hpp"
#include "metatrust/metrics.hpp"
#include "metatrust/sidecar.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace metatrust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitModel = 3;
constexpr int kExitInternal = 4;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("METATRUST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw MalformedInput("METATRUST_SEED is not an unsigned integer");
        }
    }
    return kDefaultSeed;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedInput("cannot write output file: " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedInput("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Pairs a merged corpus (originals plus "<id>_suffix" candidates).
PairingResult pair_corpus(const std::vector<ImageServiceRecord>& records) {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.id);
    std::vector<ImageServiceRecord> originals, candidates;
    for (const auto& r : records) {
        size_t us = r.id.rfind('_');
        bool is_candidate = us != std::string::npos && us > 0 && ids.count(r.id.substr(0, us));
        (is_candidate ? candidates : originals).push_back(r);
    }
    return pair_records(originals, candidates);
}

NormalizationMode parse_norm_mode(const std::string& s) {
    if (s == "per-channel") return NormalizationMode::PerChannel;
    if (s == "paper") return NormalizationMode::PaperLiteral;
    throw MalformedInput("normalization must be 'per-channel' or 'paper'");
}

// "energy:0.9" or "fixed:8"
RankRule parse_rank_rule(const std::string& s) {
    size_t colon = s.find(':');
    if (colon == std::string::npos) throw MalformedInput("--rank expects kind:value");
    std::string kind = s.substr(0, colon);
    std::string value = s.substr(colon + 1);
    if (kind == "energy") return RankRule::energy_threshold(std::stod(value));
    if (kind == "fixed") return RankRule::fixed(std::stoul(value));
    throw MalformedInput("--rank kind must be 'energy' or 'fixed'");
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& format, const std::string& out,
               const std::string& report_path, bool strict) {
    std::vector<ImageServiceRecord> records;
    json report;
    report["skipped"] = json::array();
    report["violations"] = json::object();

    if (format == "csv") {
        records = parse_csv_corpus(read_file(input));
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                records.push_back(
                    parse_sidecar(read_file(file.string()), SidecarFormat::JsonSidecar));
            } catch (const std::exception& e) {
                if (strict)
                    throw MalformedInput("malformed sidecar '" + file.string() +
                                         "': " + e.what());
                std::cerr << "warning: skipping '" << file.string() << "': " << e.what()
                          << "\n";
                report["skipped"].push_back(file.filename().string());
            }
        }
    }

    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    size_t violation_count = 0;
    for (const auto& r : records) {
        auto violations = validate(r);
        auto findings = intrinsic_consistency_lint(r);
        if (violations.empty() && findings.empty()) continue;
        json entry = json::array();
        for (const auto& v : violations)
            entry.push_back({{"field", v.field}, {"rule", v.rule}, {"message", v.message}});
        for (const auto& f : findings)
            entry.push_back({{"rule", f.rule},
                             {"shutter_speed", f.shutter_speed},
                             {"exposure_time", f.exposure_time},
                             {"relative_deviation", f.relative_deviation}});
        report["violations"][r.id] = std::move(entry);
        violation_count += violations.size() + findings.size();
    }
    report["record_count"] = records.size();
    report["violation_count"] = violation_count;

    save_corpus(records, out);
    if (!report_path.empty()) write_file(report_path, report.dump(2) + "\n");
    std::cout << "ingested " << records.size() << " records, " << violation_count
              << " findings\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

int cmd_diff(const std::string& corpus_path, const std::string& out,
             const std::string& policy_str, const std::string& norm_str) {
    auto records = load_corpus(corpus_path);
    auto pairing = pair_corpus(records);
    if (pairing.pairs.empty()) throw EmptyCorpus("corpus has no pairable records");

    ChannelPolicy policy = policy_from_string(policy_str);
    SemanticSpaces spaces = build_spaces(pairing.pairs, policy, RankRule{});
    auto deltas = compute_pair_deltas(pairing.pairs, policy, spaces);
    auto normalized = normalize_deltas(deltas, parse_norm_mode(norm_str));
    write_file(out, deltas_to_csv(deltas, normalized));
    for (const auto& id : pairing.unmatched)
        std::cerr << "warning: unmatched candidate '" << id << "'\n";
    std::cout << "wrote " << deltas.size() << " delta rows\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const std::string& corpus_path, const std::string& labels_path,
              const std::string& out, int planes, std::uint64_t seed,
              const std::string& policy_str, const std::string& norm_str,
              const std::vector<int>& weights, const std::string& rank_str) {
    auto records = load_corpus(corpus_path);
    auto pairing = pair_corpus(records);
    if (pairing.pairs.empty()) throw EmptyCorpus("corpus has no pairable records");
    auto labels = labels_from_csv(read_file(labels_path));

    TrainOptions opts;
    opts.plane_count = planes;
    opts.seed = seed;
    opts.policy = policy_from_string(policy_str);
    opts.normalization_mode = parse_norm_mode(norm_str);
    opts.rank_rule = parse_rank_rule(rank_str);
    if (weights.size() == 3) opts.weights = {weights[0], weights[1], weights[2]};

    IntentionModel model = train_intention_model(pairing.pairs, labels, opts);
    save_model(model, out);
    std::cout << "trained model with " << model.planes.size()
              << " planes, theta training accuracy "
              << format_double(model.theta.training_accuracy) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

int cmd_score(const std::string& corpus_path, const std::string& model_path,
              const std::string& profile_path, const std::string& out,
              const std::string& csv_out, const std::string& strategy_str,
              std::uint64_t seed) {
    auto records = load_corpus(corpus_path);
    auto pairing = pair_corpus(records);
    if (pairing.pairs.empty()) throw EmptyCorpus("corpus has no pairable records");

    IntentionModel model = load_model(model_path);
    ContextProfile profile = load_profile(profile_path);
    AssignStrategy strategy = strategy_from_name(strategy_str);

    auto estimates =
        estimate_intention(pairing.pairs, model, strategy, KMeansConfig{0, seed});

    // Keyword significance: tokens added on the candidate side, scored against
    // the originals' contextual documents.
    std::vector<std::set<std::string>> documents;
    documents.reserve(pairing.pairs.size());
    for (const auto& p : pairing.pairs) documents.push_back(contextual_token_set(p.original));

    std::vector<FakenessReport> reports;
    std::string jsonl;
    for (size_t i = 0; i < estimates.size(); ++i) {
        const auto& pair = pairing.pairs[i];
        std::set<std::string> orig_tokens = contextual_token_set(pair.original);
        std::vector<std::string> added;
        for (const auto& kw : pair.candidate.contextual.keywords)
            for (const auto& tok : tokenize(kw))
                if (!orig_tokens.count(tok)) added.push_back(tok);
        double max_sig = 0;
        if (!added.empty()) {
            auto sig = keyword_significance(added, documents);
            for (const auto& [tok, s] : sig) max_sig = std::max(max_sig, s);
        }
        FakenessReport report = translate(estimates[i], max_sig, profile);
        jsonl += report_to_jsonl(report);
        reports.push_back(std::move(report));
    }

    write_file(out, jsonl);
    if (!csv_out.empty()) write_file(csv_out, reports_to_csv(reports));
    std::cout << "scored " << reports.size() << " pairs\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& corpus_path, const std::string& labels_path,
                 const std::string& out, const std::string& csv_out,
                 const std::string& planes_list, const std::string& strategy_str,
                 std::uint64_t seed, const std::string& policy_str,
                 const std::string& norm_str, const std::string& rank_str) {
    auto records = load_corpus(corpus_path);
    auto pairing = pair_corpus(records);
    if (pairing.pairs.empty()) throw EmptyCorpus("corpus has no pairable records");

    EvalCorpus corpus;
    corpus.pairs = pairing.pairs;
    corpus.labels = labels_from_csv(read_file(labels_path));

    std::vector<int> plane_counts;
    std::stringstream ss(planes_list);
    std::string item;
    while (std::getline(ss, item, ',')) plane_counts.push_back(std::stoi(trim(item)));
    if (plane_counts.empty()) throw MalformedInput("--planes list is empty");

    std::vector<AssignStrategy> strategies;
    if (strategy_str == "all")
        strategies = {AssignStrategy::BruteForce, AssignStrategy::Heuristic,
                      AssignStrategy::Clustered};
    else
        strategies = {strategy_from_name(strategy_str)};

    std::vector<EvalResult> results;
    for (int planes : plane_counts) {
        TrainOptions opts;
        opts.plane_count = planes;
        opts.seed = seed;
        opts.policy = policy_from_string(policy_str);
        opts.normalization_mode = parse_norm_mode(norm_str);
        opts.rank_rule = parse_rank_rule(rank_str);
        IntentionModel model = train_intention_model(corpus.pairs, corpus.labels, opts);
        for (AssignStrategy strategy : strategies) {
            auto acc = evaluate_accuracy(model, corpus, strategy, KMeansConfig{0, seed});
            auto prec = evaluate_precision(model, corpus, strategy, KMeansConfig{0, seed});
            EvalResult r;
            r.strategy = strategy_name(strategy);
            r.plane_count = planes;
            r.accuracy = acc.accuracy;
            r.precision_ill = prec.precision_ill;
            r.confusion = acc.confusion;
            results.push_back(std::move(r));
        }
    }

    write_file(out, report_json(results));
    if (!csv_out.empty()) write_file(csv_out, report_csv(results));
    for (const auto& r : results)
        std::cout << r.strategy << " planes=" << r.plane_count
                  << " accuracy=" << format_double(r.accuracy) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(size_t n, size_t plane_count, const std::string& out, std::uint64_t seed,
              int runs) {
    auto points = synthetic_points(n, seed);
    auto planes = stacked_planes(plane_count);
    auto timings = benchmark_runtime(points, planes, KMeansConfig{0, seed}, runs);

    std::string csv = "strategy,ns_per_record\n";
    for (const auto& t : timings) {
        csv += t.strategy + "," + format_double(t.ns_per_record) + "\n";
        std::cout << t.strategy << " " << format_double(t.ns_per_record) << " ns/record\n";
    }
    if (!out.empty()) write_file(out, csv);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mutate
// ---------------------------------------------------------------------------

int cmd_mutate(const std::string& out_dir, size_t pairs_per_level, int levels, double noise,
               std::uint64_t seed, bool baseline) {
    fs::create_directories(out_dir);
    EvalCorpus corpus;
    json manifest;
    if (baseline) {
        corpus = generate_baseline_corpus(pairs_per_level, seed);
        manifest["generator"] = "baseline-synonym-paraphrase";
        manifest["pairs_per_class"] = pairs_per_level;
    } else {
        GeneratorConfig cfg;
        cfg.pairs_per_level = pairs_per_level;
        cfg.levels = levels;
        cfg.seed = seed;
        cfg.noise = noise;
        corpus = generate_eval_corpus(cfg);
        manifest["generator"] = "systematic-ladder";
        manifest["pairs_per_level"] = pairs_per_level;
        manifest["levels"] = levels;
        manifest["noise"] = noise;
    }
    manifest["seed"] = seed;

    std::vector<ImageServiceRecord> merged;
    for (const auto& p : corpus.pairs) {
        merged.push_back(p.original);
        merged.push_back(p.candidate);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    save_corpus(merged, out_dir + "/corpus.json");
    write_file(out_dir + "/labels.csv", labels_to_csv(corpus.labels));
    write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    std::cout << "generated " << corpus.pairs.size() << " pairs into " << out_dir << "\n";
    return kExitOk;
}

json error_json(const char* type, const std::string& message) {
    json j;
    j["error"] = {{"type", type}, {"message", message}};
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metatrust: fake-image analytics from metadata deltas"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "RNG seed (fallback: METATRUST_SEED, then 1729)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse sidecars into a corpus file");
    std::string in_dir, in_format = "json", corpus_out = "corpus.json", report_out;
    bool strict = false;
    ingest->add_option("--input", in_dir, "sidecar directory or CSV file")->required();
    ingest->add_option("--format", in_format, "json|csv");
    ingest->add_option("--out", corpus_out, "corpus output path");
    ingest->add_option("--report", report_out, "validation report path");
    ingest->add_flag("--strict", strict, "fail on the first malformed sidecar");

    // diff
    auto* diff = app.add_subcommand("diff", "export per-pair deltas as CSV");
    std::string diff_corpus, diff_out = "deltas.csv";
    std::string diff_policy = "quantitative,quantitative,semantic";
    std::string diff_norm = "per-channel";
    diff->add_option("--corpus", diff_corpus)->required();
    diff->add_option("--out", diff_out);
    diff->add_option("--channel-policy", diff_policy,
                     "per-channel delta kind: spatial,temporal,contextual");
    diff->add_option("--normalization", diff_norm, "per-channel|paper");

    // train
    auto* train = app.add_subcommand("train", "fit an intention model");
    std::string train_corpus, train_labels, train_out = "model.json";
    std::string train_policy = "quantitative,quantitative,semantic";
    std::string train_norm = "per-channel";
    int train_planes = 5;
    std::vector<int> train_weights;
    train->add_option("--corpus", train_corpus)->required();
    train->add_option("--labels", train_labels)->required();
    train->add_option("--out", train_out);
    train->add_option("--planes", train_planes, "intention levels to train (2..5)");
    train->add_option("--channel-policy", train_policy);
    train->add_option("--normalization", train_norm);
    train->add_option("--weights", train_weights, "channel weights 1..5 (3 values)")
        ->expected(3);
    std::string train_rank = "energy:0.9";
    train->add_option("--rank", train_rank, "LSA rank rule: energy:<theta>|fixed:<r>");

    // score
    auto* score = app.add_subcommand("score", "score pairs into fakeness reports");
    std::string score_corpus, score_model, score_profile, score_out = "reports.jsonl";
    std::string score_csv, score_strategy = "brute";
    score->add_option("--corpus", score_corpus)->required();
    score->add_option("--model", score_model)->required();
    score->add_option("--profile", score_profile)->required();
    score->add_option("--out", score_out);
    score->add_option("--csv", score_csv, "also write a CSV report");
    score->add_option("--strategy", score_strategy, "brute|heur|cluster");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "accuracy/precision across plane counts");
    std::string eval_corpus, eval_labels, eval_out = "eval.json", eval_csv;
    std::string eval_planes = "2,3,4", eval_strategy = "all";
    std::string eval_policy = "quantitative,quantitative,semantic";
    std::string eval_norm = "per-channel";
    evaluate->add_option("--corpus", eval_corpus)->required();
    evaluate->add_option("--labels", eval_labels)->required();
    evaluate->add_option("--out", eval_out);
    evaluate->add_option("--csv", eval_csv);
    evaluate->add_option("--planes", eval_planes, "comma-separated plane counts");
    evaluate->add_option("--strategy", eval_strategy, "brute|heur|cluster|all");
    evaluate->add_option("--channel-policy", eval_policy);
    evaluate->add_option("--normalization", eval_norm);
    std::string eval_rank = "energy:0.9";
    evaluate->add_option("--rank", eval_rank, "LSA rank rule: energy:<theta>|fixed:<r>");

    // bench
    auto* bench = app.add_subcommand("bench", "strategy scoring-time benchmark");
    size_t bench_n = 10000, bench_planes = 8;
    int bench_runs = 5;
    std::string bench_out;
    bench->add_option("--n", bench_n, "number of synthetic points");
    bench->add_option("--planes", bench_planes, "number of stacked planes");
    bench->add_option("--runs", bench_runs, "timing runs (median reported)");
    bench->add_option("--out", bench_out, "CSV output path");

    // mutate
    auto* mut = app.add_subcommand("mutate", "generate a labeled mutated corpus");
    std::string mut_out = "dataset";
    size_t mut_pairs = 250;
    int mut_levels = 4;
    double mut_noise = 1.0;
    bool mut_baseline = false;
    mut->add_option("--out-dir", mut_out);
    mut->add_option("--pairs-per-level", mut_pairs);
    mut->add_option("--levels", mut_levels, "intention levels (2..5)");
    mut->add_option("--noise", mut_noise, "band-overlap noise factor");
    mut->add_flag("--baseline", mut_baseline, "synonym-paraphrase baseline corpus");

    for (CLI::App* sub : {ingest, diff, train, score, evaluate, bench, mut})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        std::uint64_t seed = resolve_seed(seed_flag);
        if (*ingest) return cmd_ingest(in_dir, in_format, corpus_out, report_out, strict);
        if (*diff) return cmd_diff(diff_corpus, diff_out, diff_policy, diff_norm);
        if (*train)
            return cmd_train(train_corpus, train_labels, train_out, train_planes, seed,
                             train_policy, train_norm, train_weights, train_rank);
        if (*score)
            return cmd_score(score_corpus, score_model, score_profile, score_out, score_csv,
                             score_strategy, seed);
        if (*evaluate)
            return cmd_evaluate(eval_corpus, eval_labels, eval_out, eval_csv, eval_planes,
                                eval_strategy, seed, eval_policy, eval_norm, eval_rank);
        if (*bench) return cmd_bench(bench_n, bench_planes, bench_out, seed, bench_runs);
        if (*mut)
            return cmd_mutate(mut_out, mut_pairs, mut_levels, mut_noise, seed, mut_baseline);
        std::cerr << error_json("Usage", "no subcommand selected").dump() << "\n";
        return kExitInput;
    } catch (const ModelVersionMismatch& e) {
        std::cerr << error_json("ModelVersionMismatch", e.what()).dump() << "\n";
        return kExitModel;
    } catch (const MalformedInput& e) {
        std::cerr << error_json("MalformedInput", e.what()).dump() << "\n";
        return kExitInput;
    } catch (const SchemaViolation& e) {
        std::cerr << error_json("SchemaViolation", e.what()).dump() << "\n";
        return kExitInput;
    } catch (const DuplicateId& e) {
        std::cerr << error_json("DuplicateId", e.what()).dump() << "\n";
        return kExitInput;
    } catch (const EmptyCorpus& e) {
        std::cerr << error_json("EmptyCorpus", e.what()).dump() << "\n";
        return kExitInput;
    } catch (const ChannelMissing& e) {
        std::cerr << error_json("ChannelMissing", e.what()).dump() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << error_json("Internal", e.what()).dump() << "\n";
        return kExitInternal;
    }
}
