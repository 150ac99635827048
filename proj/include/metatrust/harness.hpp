#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metatrust/intention.hpp"
#include "metatrust/sidecar.hpp"

namespace metatrust {

// ---------------------------------------------------------------------------
// Mutation plans
// ---------------------------------------------------------------------------

enum class Magnitude { None, Minor, Major };

const char* magnitude_name(Magnitude m);
Magnitude magnitude_from_name(const std::string& name);

struct MutationPlan {
    Magnitude spatial = Magnitude::None;
    Magnitude temporal = Magnitude::None;
    Magnitude contextual = Magnitude::None;
    IntentionLevel intent_label = IntentionLevel::WellIntention;
    std::uint64_t seed = kDefaultSeed;
};

// Fixed pattern -> level table: one step per spatial/temporal major, two per
// contextual major (topic replacement moves the image semantics most), capped
// at extremely-ill. Minor changes count as zero.
IntentionLevel pattern_label(Magnitude spatial, Magnitude temporal, Magnitude contextual);

// Plan with the label filled in from the table. At least one channel must be
// touched.
MutationPlan make_plan(Magnitude spatial, Magnitude temporal, Magnitude contextual,
                       std::uint64_t seed);

struct ChannelMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric ranges behind minor/major realizations. The stock table couples
// severity to the full pattern so that each intention level occupies its own
// band in delta space; pass an explicit override for flat experiments.
struct MutationRanges {
    double spatial_minor_km_lo = 0.05, spatial_minor_km_hi = 1.0;
    double spatial_major_km_lo = 800.0, spatial_major_km_hi = 2000.0;
    int temporal_minor_lo = 1, temporal_minor_hi = 10;  // exact Manhattan target
    // Major temporal: +years plus exact component-distance targets for
    // month/day/hour/minute/second. Real shift always exceeds a year (a
    // backward month step costs one extra year).
    int tmaj_years_lo = 1, tmaj_years_hi = 3;
    int tmaj_months_lo = 1, tmaj_months_hi = 4;
    int tmaj_day_lo = 1, tmaj_day_hi = 7;
    int tmaj_hour_lo = 1, tmaj_hour_hi = 8;
    int tmaj_minute_lo = 1, tmaj_minute_hi = 22;
    int tmaj_second_lo = 1, tmaj_second_hi = 22;
    double ctx_minor_frac_lo = 0.2, ctx_minor_frac_hi = 0.45;  // synonym swaps
    double ctx_major_frac_lo = 0.45, ctx_major_frac_hi = 0.75; // topic replacement
};

MutationRanges ranges_for_pattern(Magnitude spatial, Magnitude temporal, Magnitude contextual,
                                  double noise = 1.0);

// Deterministic mutation: same record + same plan -> identical output.
// Throws ChannelMissing when the plan touches a channel the record lacks.
std::pair<ImageServiceRecord, IntentionLevel> mutate(const ImageServiceRecord& record,
                                                     const MutationPlan& plan,
                                                     const MutationRanges* ranges = nullptr);

// Re-derives the pattern from a pair's observable deltas (spatial km,
// real-time shift, contextual token / semantic change). The contextual
// semantic cut separates synonym swaps from topic replacement.
struct PatternThresholds {
    double spatial_major_km = 50.0;
    double temporal_major_seconds = 30.0 * 86400.0;
    double contextual_major_semantic = 0.45;
};

struct DerivedPattern {
    Magnitude spatial = Magnitude::None;
    Magnitude temporal = Magnitude::None;
    Magnitude contextual = Magnitude::None;
};

DerivedPattern derive_pattern(const ServicePair& pair, const SemanticSpace& contextual_space,
                              const PatternThresholds& thresholds = {});

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

// Application domains from which base records draw their vocabulary.
const std::vector<std::string>& context_domains();

// Deterministic base record: GPS near a fixed city, a capture timestamp, and
// a caption/keyword set of one word per sampled synonym group of the domain.
ImageServiceRecord make_base_record(size_t domain_index, size_t index, std::uint64_t seed);

struct EvalCorpus {
    std::vector<ServicePair> pairs;
    std::map<std::string, IntentionLevel> labels;  // by candidate id
};

struct GeneratorConfig {
    size_t pairs_per_level = 250;
    int levels = 4;  // 2..5, ordinals 0..levels-1
    std::uint64_t seed = kDefaultSeed;
    double noise = 1.0;  // widens magnitude bands toward each other
};

// Systematically mutated corpus with one ladder pattern per level.
EvalCorpus generate_eval_corpus(const GeneratorConfig& config);

// Two-level corpus (well-intention vs moderately-ill by the table) whose only
// informative channel is contextual: one class paraphrased with synonyms, the
// other topic-replaced. Spatial/temporal changes are identically distributed
// in both classes.
EvalCorpus generate_baseline_corpus(size_t pairs_per_class, std::uint64_t seed);

// Labels CSV: header "id,intention", one row per candidate.
std::string labels_to_csv(const std::map<std::string, IntentionLevel>& labels);
std::map<std::string, IntentionLevel> labels_from_csv(const std::string& text);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct AccuracyResult {
    double accuracy = 0;
    // confusion[true][predicted], indexed by level ordinal.
    std::vector<std::vector<size_t>> confusion;
};

AccuracyResult evaluate_accuracy(const IntentionModel& model, const EvalCorpus& corpus,
                                 AssignStrategy strategy, const KMeansConfig& kmeans_cfg = {});

struct PrecisionResult {
    std::optional<double> precision_ill;  // empty when nothing predicted ill
    size_t predicted_ill = 0;
    size_t true_positive_ill = 0;
};

PrecisionResult evaluate_precision(const IntentionModel& model, const EvalCorpus& corpus,
                                   AssignStrategy strategy, const KMeansConfig& kmeans_cfg = {});

// tf-idf baseline: the contextual channel's LSA delta is replaced by the
// cosine distance between raw tf-idf rows (no SVD); planes are refit with the
// same procedure, then accuracy is measured with the given strategy.
AccuracyResult baseline_tfidf(const EvalCorpus& corpus, const TrainOptions& opts,
                              AssignStrategy strategy = AssignStrategy::BruteForce,
                              const KMeansConfig& kmeans_cfg = {});

// ---------------------------------------------------------------------------
// Runtime benchmark (scoring phase only; clustering is trained outside the
// timed region and amortized separately)
// ---------------------------------------------------------------------------

struct StrategyTiming {
    std::string strategy;
    double ns_per_record = 0;  // median over runs
};

std::vector<ModificationPoint> synthetic_points(size_t n, std::uint64_t seed);
std::vector<IntentionPlane> stacked_planes(size_t count);

std::vector<StrategyTiming> benchmark_runtime(const std::vector<ModificationPoint>& points,
                                              const std::vector<IntentionPlane>& planes,
                                              const KMeansConfig& kmeans_cfg, int runs = 5);

// ---------------------------------------------------------------------------
// Structured report
// ---------------------------------------------------------------------------

struct EvalResult {
    std::string strategy;
    int plane_count = 0;
    double accuracy = 0;
    std::optional<double> precision_ill;
    std::optional<double> runtime_ns_per_record;
    std::vector<std::vector<size_t>> confusion;
};

// Deterministic field order; byte-identical for identical inputs.
std::string report_json(const std::vector<EvalResult>& results);
std::string report_csv(const std::vector<EvalResult>& results);

}  // namespace metatrust
