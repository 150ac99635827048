#include "metatrust/fakeness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace metatrust {

using nlohmann::json;

Significance significance_from_name(const std::string& name) {
    if (name == "high") return Significance::High;
    if (name == "medium") return Significance::Medium;
    if (name == "low") return Significance::Low;
    throw MalformedInput("unknown significance '" + name + "'");
}

const char* significance_name(Significance s) {
    switch (s) {
        case Significance::High: return "high";
        case Significance::Medium: return "medium";
        case Significance::Low: return "low";
    }
    return "medium";
}

const std::vector<WeightRule>& default_weight_rules() {
    static const std::vector<WeightRule> rules = {
        {Significance::High, 90, 100, 5},
        {Significance::High, 80, 90, 4},
        {Significance::Medium, 60, 70, 3},
        {Significance::Low, 0, 90, 2},
    };
    return rules;
}

int resolve_weight(Significance significance, double precision_percent,
                   const std::vector<WeightRule>& rules) {
    precision_percent = std::clamp(precision_percent, 0.0, 100.0);
    const WeightRule* exact = nullptr;
    const WeightRule* below = nullptr;   // band nearest beneath the precision
    const WeightRule* lowest = nullptr;  // tier's lowest band
    for (const auto& r : rules) {
        if (r.significance != significance) continue;
        if (precision_percent > r.precision_low && precision_percent <= r.precision_high)
            exact = &r;
        if (r.precision_high <= precision_percent &&
            (!below || r.precision_high > below->precision_high))
            below = &r;
        if (!lowest || r.precision_low < lowest->precision_low) lowest = &r;
    }
    if (exact) return exact->weight;
    if (below) return below->weight;
    if (lowest) return lowest->weight;
    return 3;  // significance tier absent from the table
}

std::map<std::string, double> keyword_significance(
    const std::vector<std::string>& modified_keywords,
    const std::vector<std::set<std::string>>& corpus_documents) {
    if (modified_keywords.empty())
        throw EmptyKeywordSet("no modified keywords to score");
    if (corpus_documents.empty())
        throw EmptyCorpus("keyword significance needs a corpus");

    std::map<std::string, double> tf;
    for (const auto& raw : modified_keywords)
        for (const auto& tok : tokenize(raw)) tf[tok] += 1.0;
    if (tf.empty()) throw EmptyKeywordSet("modified keywords tokenize to nothing");

    const double n = static_cast<double>(corpus_documents.size());
    std::map<std::string, double> scores;
    double max_score = 0;
    for (const auto& [tok, count] : tf) {
        double df = 0;
        for (const auto& doc : corpus_documents) df += doc.count(tok);
        double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
        double score = count * idf;
        scores[tok] = score;
        max_score = std::max(max_score, score);
    }
    if (max_score > 0)
        for (auto& [tok, score] : scores) score /= max_score;
    return scores;
}

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Trustworthy: return "trustworthy";
        case Verdict::Suspect: return "suspect";
        case Verdict::Fake: return "fake";
    }
    return "trustworthy";
}

static Verdict verdict_for(double score, const ContextProfile& p) {
    if (score < p.suspect_threshold) return Verdict::Trustworthy;
    if (score < p.fake_threshold) return Verdict::Suspect;
    return Verdict::Fake;
}

static double rule_field_value(RuleField f, const IntentionEstimate& e,
                               const std::array<int, 3>& weights) {
    switch (f) {
        case RuleField::SpatialDelta: return e.deltas.dz_hat * weights[0] / 5.0;
        case RuleField::TemporalDelta: return e.deltas.dt_hat * weights[1] / 5.0;
        case RuleField::ContextualDelta: return e.deltas.dc_hat * weights[2] / 5.0;
        case RuleField::IntentionOrdinal: return static_cast<double>(ordinal(e.level));
    }
    return 0;
}

static bool condition_holds(const RuleCondition& c, double value) {
    switch (c.op) {
        case RuleOp::Greater: return value > c.threshold;
        case RuleOp::GreaterEqual: return value >= c.threshold;
        case RuleOp::Less: return value < c.threshold;
        case RuleOp::LessEqual: return value <= c.threshold;
    }
    return false;
}

FakenessReport translate(const IntentionEstimate& e, double max_keyword_significance,
                         const ContextProfile& profile) {
    FakenessReport report;
    report.record_id = e.record_id;
    report.intention = e.level;

    if (profile.trained) {
        const auto& w = profile.trained->weights;  // (bias, intent, dz, dt, dc, kw)
        std::vector<double> x = {
            ordinal(e.level) / 4.0,
            e.deltas.dz_hat * profile.channel_weights[0] / 5.0,
            e.deltas.dt_hat * profile.channel_weights[1] / 5.0,
            e.deltas.dc_hat * profile.channel_weights[2] / 5.0,
            max_keyword_significance,
        };
        if (w.size() != x.size() + 1)
            throw DimensionMismatch("trained translator expects 5 features");
        report.fakeness_score = profile.trained->score(x);
        report.contributions = {
            {"intercept", w[0]},
            {"intention", w[1] * x[0]},
            {"spatial", w[2] * x[1]},
            {"temporal", w[3] * x[2]},
            {"contextual", w[4] * x[3]},
            {"keywords", w[5] * x[4]},
        };
    } else {
        double best = 0;
        bool matched = false;
        std::array<double, 3> channel_scores = {0, 0, 0};
        for (const auto& rule : profile.expert_rules) {
            bool holds = true;
            for (const auto& cond : rule.conditions)
                if (!condition_holds(cond,
                                     rule_field_value(cond.field, e, profile.channel_weights))) {
                    holds = false;
                    break;
                }
            if (!holds) continue;
            matched = true;
            double score = (rule.harmful ? 1.0 : 0.0) * rule.confidence;
            best = std::max(best, score);
            for (const auto& cond : rule.conditions) {
                if (cond.field == RuleField::SpatialDelta)
                    channel_scores[0] = std::max(channel_scores[0], score);
                else if (cond.field == RuleField::TemporalDelta)
                    channel_scores[1] = std::max(channel_scores[1], score);
                else if (cond.field == RuleField::ContextualDelta)
                    channel_scores[2] = std::max(channel_scores[2], score);
            }
        }
        report.fakeness_score = best;
        report.no_applicable_rule = !matched;
        report.contributions = {
            {"spatial", channel_scores[0]},
            {"temporal", channel_scores[1]},
            {"contextual", channel_scores[2]},
        };
    }
    report.verdict = verdict_for(report.fakeness_score, profile);
    return report;
}

BinaryModel train_translator(const std::vector<TranslatorSample>& labeled, std::uint64_t seed,
                             const TranslatorOptions& opts) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    x.reserve(labeled.size());
    for (const auto& s : labeled) {
        x.push_back({s.intention_ordinal / 4.0, s.dz_hat, s.dt_hat, s.dc_hat,
                     s.keyword_significance});
        y.push_back(s.fake_label);
    }
    LogisticOptions lopts = opts.logistic;
    lopts.nonneg_features.push_back(0);  // intention coefficient stays >= 0
    BinaryModel model = fit_binary(x, y, seed, lopts);
    if (opts.anchor_cap) {
        // Zero features reduce the score to sigmoid(bias); cap it so an
        // unmodified record can never leave the trustworthy band.
        double cap = std::log(*opts.anchor_cap / (1.0 - *opts.anchor_cap));
        model.weights[0] = std::min(model.weights[0], cap);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Profile + report serialization
// ---------------------------------------------------------------------------

static constexpr const char* kProfileFormat = "metatrust-profile/1";

static const char* field_name(RuleField f) {
    switch (f) {
        case RuleField::SpatialDelta: return "dz_hat";
        case RuleField::TemporalDelta: return "dt_hat";
        case RuleField::ContextualDelta: return "dc_hat";
        case RuleField::IntentionOrdinal: return "intention";
    }
    return "dc_hat";
}

static RuleField field_from_name(const std::string& s) {
    if (s == "dz_hat") return RuleField::SpatialDelta;
    if (s == "dt_hat") return RuleField::TemporalDelta;
    if (s == "dc_hat") return RuleField::ContextualDelta;
    if (s == "intention") return RuleField::IntentionOrdinal;
    throw MalformedInput("unknown rule field '" + s + "'");
}

static const char* op_name(RuleOp o) {
    switch (o) {
        case RuleOp::Greater: return ">";
        case RuleOp::GreaterEqual: return ">=";
        case RuleOp::Less: return "<";
        case RuleOp::LessEqual: return "<=";
    }
    return ">";
}

static RuleOp op_from_name(const std::string& s) {
    if (s == ">") return RuleOp::Greater;
    if (s == ">=") return RuleOp::GreaterEqual;
    if (s == "<") return RuleOp::Less;
    if (s == "<=") return RuleOp::LessEqual;
    throw MalformedInput("unknown rule operator '" + s + "'");
}

std::string serialize_profile(const ContextProfile& p) {
    json j;
    j["format"] = kProfileFormat;
    j["context"] = p.context_name;
    j["channel_weights"] = p.channel_weights;
    j["suspect_threshold"] = p.suspect_threshold;
    j["fake_threshold"] = p.fake_threshold;
    json rules = json::array();
    for (const auto& r : p.expert_rules) {
        json rj;
        rj["name"] = r.name;
        rj["harmful"] = r.harmful;
        rj["confidence"] = r.confidence;
        json conds = json::array();
        for (const auto& c : r.conditions)
            conds.push_back({{"field", field_name(c.field)},
                             {"op", op_name(c.op)},
                             {"threshold", c.threshold}});
        rj["conditions"] = std::move(conds);
        rules.push_back(std::move(rj));
    }
    j["expert_rules"] = std::move(rules);
    if (p.trained) j["trained"] = {{"weights", p.trained->weights}};
    return j.dump(2) + "\n";
}

ContextProfile deserialize_profile(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw MalformedInput("profile file is not valid JSON");
    if (!j.contains("format") || j["format"] != kProfileFormat)
        throw ModelVersionMismatch("expected profile format " + std::string(kProfileFormat));
    ContextProfile p;
    p.context_name = j.at("context").get<std::string>();
    auto w = j.value("channel_weights", std::vector<int>{5, 5, 5});
    if (w.size() != 3) throw MalformedInput("channel_weights must have 3 entries");
    p.channel_weights = {w[0], w[1], w[2]};
    p.suspect_threshold = j.value("suspect_threshold", 0.33);
    p.fake_threshold = j.value("fake_threshold", 0.66);
    for (const auto& rj : j.value("expert_rules", json::array())) {
        ExpertRule r;
        r.name = rj.value("name", "");
        r.harmful = rj.value("harmful", true);
        r.confidence = rj.at("confidence").get<double>();
        if (r.confidence < 0 || r.confidence > 1)
            throw MalformedInput("rule confidence must lie in [0, 1]");
        for (const auto& cj : rj.value("conditions", json::array()))
            r.conditions.push_back({field_from_name(cj.at("field").get<std::string>()),
                                    op_from_name(cj.at("op").get<std::string>()),
                                    cj.at("threshold").get<double>()});
        p.expert_rules.push_back(std::move(r));
    }
    if (j.contains("trained")) {
        BinaryModel m;
        m.weights = j["trained"].at("weights").get<std::vector<double>>();
        p.trained = std::move(m);
    }
    if (!p.trained && p.expert_rules.empty())
        throw MalformedInput("profile needs expert rules or a trained translator");
    return p;
}

void save_profile(const ContextProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write profile file: " + path);
    out << serialize_profile(p);
}

ContextProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open profile file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_profile(text);
}

std::string report_to_jsonl(const FakenessReport& r) {
    json j;
    j["id"] = r.record_id;
    j["intention"] = intention_label(r.intention);
    j["fakeness_score"] = r.fakeness_score;
    j["verdict"] = verdict_name(r.verdict);
    json contrib = json::object();
    for (const auto& [name, value] : r.contributions) contrib[name] = value;
    j["contributions"] = std::move(contrib);
    if (r.no_applicable_rule) j["warning"] = "no applicable rule";
    return j.dump() + "\n";
}

std::string reports_to_csv(const std::vector<FakenessReport>& reports) {
    std::string out = "id,intention,fakeness_score,verdict,no_applicable_rule\n";
    for (const auto& r : reports) {
        out += r.record_id;
        out += std::string(",") + intention_label(r.intention);
        out += "," + format_double(r.fakeness_score);
        out += std::string(",") + verdict_name(r.verdict);
        out += r.no_applicable_rule ? ",1" : ",0";
        out += "\n";
    }
    return out;
}

}  // namespace metatrust
