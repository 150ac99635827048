#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metatrust/intention.hpp"
#include "metatrust/logistic.hpp"
#include "metatrust/planes.hpp"

namespace metatrust {

// ---------------------------------------------------------------------------
// Attribute weight rules (significance x precision band -> 1..5)
// ---------------------------------------------------------------------------

enum class Significance { High, Medium, Low };

Significance significance_from_name(const std::string& name);
const char* significance_name(Significance s);

struct WeightRule {
    Significance significance = Significance::Medium;
    double precision_low = 0;    // percent, exclusive lower edge
    double precision_high = 100; // percent, inclusive upper edge
    int weight = 3;
};

// Default rule table: (high, >90) -> 5, (high, 80-90) -> 4,
// (medium, 60-70) -> 3, (low, <90) -> 2. Unmatched precisions fall to the
// nearest band below, or the tier's lowest band when none is below.
const std::vector<WeightRule>& default_weight_rules();

int resolve_weight(Significance significance, double precision_percent,
                   const std::vector<WeightRule>& rules = default_weight_rules());

// ---------------------------------------------------------------------------
// Keyword significance via tf-idf
// ---------------------------------------------------------------------------

// Smoothed idf = ln((1+N)/(1+df)) + 1; scores normalized to [0,1] by the
// maximum over the modified set. Tokens absent from the corpus get the df=0
// idf, i.e. the maximum. Throws EmptyKeywordSet / EmptyCorpus.
std::map<std::string, double> keyword_significance(
    const std::vector<std::string>& modified_keywords,
    const std::vector<std::set<std::string>>& corpus_documents);

// ---------------------------------------------------------------------------
// Context profiles and reports
// ---------------------------------------------------------------------------

enum class RuleField { SpatialDelta, TemporalDelta, ContextualDelta, IntentionOrdinal };
enum class RuleOp { Greater, GreaterEqual, Less, LessEqual };

struct RuleCondition {
    RuleField field = RuleField::ContextualDelta;
    RuleOp op = RuleOp::Greater;
    double threshold = 0;
};

struct ExpertRule {
    std::string name;
    std::vector<RuleCondition> conditions;  // conjunction
    bool harmful = true;
    double confidence = 0;  // [0, 1]
};

enum class Verdict { Trustworthy, Suspect, Fake };

const char* verdict_name(Verdict v);

struct ContextProfile {
    std::string context_name;
    std::array<int, 3> channel_weights = {5, 5, 5};  // from resolve_weight
    std::vector<ExpertRule> expert_rules;
    std::optional<BinaryModel> trained;
    double suspect_threshold = 0.33;  // trustworthy < s <= suspect < f <= fake
    double fake_threshold = 0.66;
};

struct FakenessReport {
    std::string record_id;
    IntentionLevel intention = IntentionLevel::WellIntention;
    double fakeness_score = 0;  // [0, 1]
    Verdict verdict = Verdict::Trustworthy;
    // Explanation terms; on the trained path they sum to the pre-sigmoid logit.
    std::vector<std::pair<std::string, double>> contributions;
    bool no_applicable_rule = false;
};

// Trained path: logistic over (intention ordinal / 4, weighted deltas, max
// keyword significance). Rule path: max over matching rules of
// harmful * confidence; no match -> score 0 with a warning flag.
FakenessReport translate(const IntentionEstimate& intention_result,
                         double max_keyword_significance, const ContextProfile& profile);

struct TranslatorOptions {
    LogisticOptions logistic;
    // Calibration anchor: cap the zero-feature score at this value by
    // clamping the intercept after the fit. Disable with nullopt.
    std::optional<double> anchor_cap = 0.30;
};

struct TranslatorSample {
    double intention_ordinal = 0;  // 0..4
    double dz_hat = 0, dt_hat = 0, dc_hat = 0;
    double keyword_significance = 0;
    int fake_label = 0;  // 0 | 1
};

// Deterministic logistic fit with the intention coefficient constrained
// non-negative (ill intent must not lower fakeness). Throws DegenerateLabels.
BinaryModel train_translator(const std::vector<TranslatorSample>& labeled, std::uint64_t seed,
                             const TranslatorOptions& opts = {});

// Profile files are JSON documents; reports export as JSON lines and CSV.
std::string serialize_profile(const ContextProfile& profile);
ContextProfile deserialize_profile(const std::string& text);
void save_profile(const ContextProfile& profile, const std::string& path);
ContextProfile load_profile(const std::string& path);

std::string report_to_jsonl(const FakenessReport& report);
std::string reports_to_csv(const std::vector<FakenessReport>& reports);

}  // namespace metatrust
