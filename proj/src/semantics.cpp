#include "metatrust/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "metatrust/common.hpp"

namespace metatrust {

using nlohmann::json;

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::Spatial: return "spatial";
        case Channel::Temporal: return "temporal";
        case Channel::Contextual: return "contextual";
    }
    return "contextual";
}

Channel channel_from_name(const std::string& name) {
    if (name == "spatial") return Channel::Spatial;
    if (name == "temporal") return Channel::Temporal;
    if (name == "contextual") return Channel::Contextual;
    throw MalformedInput("unknown channel '" + name + "'");
}

const char* weighting_name(Weighting w) {
    switch (w) {
        case Weighting::Binary: return "binary";
        case Weighting::TermFrequency: return "term-frequency";
        case Weighting::TfIdf: return "tf-idf";
    }
    return "term-frequency";
}

Weighting weighting_from_name(const std::string& name) {
    if (name == "binary") return Weighting::Binary;
    if (name == "term-frequency") return Weighting::TermFrequency;
    if (name == "tf-idf") return Weighting::TfIdf;
    throw MalformedInput("unknown weighting '" + name + "'");
}

static std::string grid_token(double lat, double lon) {
    auto cell = [](double deg) { return static_cast<long>(std::floor(deg * 10.0)); };
    return "g" + std::to_string(cell(lat)) + ":" + std::to_string(cell(lon));
}

static std::string pad2(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

std::vector<std::string> channel_tokens(const ImageServiceRecord& record, Channel channel) {
    std::vector<std::string> out;
    switch (channel) {
        case Channel::Contextual:
            return record.contextual.all_tokens();
        case Channel::Spatial: {
            auto absorb = [&out](const std::optional<std::string>& s) {
                if (!s) return;
                for (auto& tok : tokenize(*s)) out.push_back(std::move(tok));
            };
            absorb(record.spatial.city);
            absorb(record.spatial.country);
            absorb(record.spatial.state);
            absorb(record.spatial.location);
            if (record.spatial.has_gps())
                out.push_back(grid_token(*record.spatial.gps_latitude,
                                         *record.spatial.gps_longitude));
            return out;
        }
        case Channel::Temporal: {
            auto t = record.temporal.primary();
            if (!t) return out;
            out.push_back("y" + std::to_string(t->year));
            out.push_back("mo" + pad2(t->month));
            out.push_back("d" + pad2(t->day));
            out.push_back("h" + pad2(t->hour));
            return out;
        }
    }
    return out;
}

VectorizerConfig build_vectorizer(const std::vector<ImageServiceRecord>& records,
                                  Channel channel, Weighting weighting,
                                  int min_token_count) {
    if (records.empty()) throw EmptyCorpus("vectorizer needs at least one record");
    std::map<std::string, int> counts;
    std::map<std::string, int> doc_freq;
    for (const auto& r : records) {
        auto toks = channel_tokens(r, channel);
        std::unordered_set<std::string> uniq;
        for (const auto& t : toks) {
            counts[t] += 1;
            uniq.insert(t);
        }
        for (const auto& t : uniq) doc_freq[t] += 1;
    }
    VectorizerConfig cfg;
    cfg.channel = channel;
    cfg.weighting = weighting;
    cfg.min_token_count = min_token_count;
    for (const auto& [tok, n] : counts)
        if (n >= min_token_count) cfg.vocabulary.push_back(tok);
    if (cfg.vocabulary.empty())
        throw EmptyVocabulary("no channel tokens reached min_token_count");
    if (weighting == Weighting::TfIdf) {
        const double n_docs = static_cast<double>(records.size());
        cfg.idf.reserve(cfg.vocabulary.size());
        for (const auto& tok : cfg.vocabulary) {
            double df = static_cast<double>(doc_freq[tok]);
            cfg.idf.push_back(std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
        }
    }
    return cfg;
}

std::vector<double> vectorize(const ImageServiceRecord& record, const VectorizerConfig& cfg) {
    if (cfg.vocabulary.empty()) throw EmptyVocabulary("vectorizer has no vocabulary");
    std::unordered_map<std::string, size_t> index;
    index.reserve(cfg.vocabulary.size());
    for (size_t i = 0; i < cfg.vocabulary.size(); ++i) index[cfg.vocabulary[i]] = i;

    std::vector<double> row(cfg.vocabulary.size(), 0.0);
    for (const auto& tok : channel_tokens(record, cfg.channel)) {
        auto it = index.find(tok);
        if (it == index.end()) continue;
        if (cfg.weighting == Weighting::Binary)
            row[it->second] = 1.0;
        else
            row[it->second] += 1.0;
    }
    if (cfg.weighting == Weighting::TfIdf) {
        if (cfg.idf.size() != row.size())
            throw DimensionMismatch("tf-idf weighting requires idf computed at build time");
        for (size_t i = 0; i < row.size(); ++i) row[i] *= cfg.idf[i];
    }
    return row;
}

Matrix build_matrix(const std::vector<ImageServiceRecord>& records,
                    const VectorizerConfig& cfg) {
    if (records.empty()) throw EmptyCorpus("build_matrix needs at least one record");
    if (cfg.vocabulary.empty()) throw EmptyVocabulary("build_matrix needs a vocabulary");
    Matrix m(records.size(), cfg.vocabulary.size());
    for (size_t r = 0; r < records.size(); ++r) {
        auto row = vectorize(records[r], cfg);
        for (size_t c = 0; c < row.size(); ++c) m(r, c) = row[c];
    }
    return m;
}

SemanticSpace fit_space(const Matrix& m, const RankRule& rule, VectorizerConfig config) {
    SvdResult full = svd_decompose(m);  // throws ZeroMatrix
    const size_t k = full.s.size();

    size_t r = k;
    if (rule.kind == RankRule::Kind::Fixed) {
        r = std::min(rule.fixed_r == 0 ? k : rule.fixed_r, k);
    } else {
        double total = 0;
        for (double s : full.s) total += s * s;
        double acc = 0;
        for (size_t i = 0; i < k; ++i) {
            acc += full.s[i] * full.s[i];
            if (acc / total >= rule.energy) {
                r = i + 1;
                break;
            }
        }
    }

    SemanticSpace space;
    space.r = r;
    space.config = std::move(config);
    space.s.assign(full.s.begin(), full.s.begin() + r);
    space.u = Matrix(full.u.rows(), r);
    for (size_t i = 0; i < full.u.rows(); ++i)
        for (size_t j = 0; j < r; ++j) space.u(i, j) = full.u(i, j);
    space.v = Matrix(full.v.rows(), r);
    for (size_t i = 0; i < full.v.rows(); ++i)
        for (size_t j = 0; j < r; ++j) space.v(i, j) = full.v(i, j);
    return space;
}

LatentVector embed(const std::vector<double>& row, const SemanticSpace& space) {
    if (row.size() != space.v.rows())
        throw DimensionMismatch("record row has length " + std::to_string(row.size()) +
                                ", space expects " + std::to_string(space.v.rows()));
    const double tiny = space.s.empty() ? 0.0 : 1e-12 * space.s.front();
    LatentVector out;
    out.values.resize(space.r, 0.0);
    for (size_t j = 0; j < space.r; ++j) {
        if (space.s[j] <= tiny)
            throw RankDeficient("retained singular value " + std::to_string(j) + " is zero");
        double dot = 0;
        for (size_t i = 0; i < row.size(); ++i) dot += row[i] * space.v(i, j);
        out.values[j] = dot / space.s[j];
    }
    return out;
}

double semantic_distance(const LatentVector& a, const LatentVector& b) {
    if (a.values.size() != b.values.size())
        throw DimensionMismatch("latent vectors differ in length");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;  // no shared context
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double channel_semantic_delta(const ServicePair& pair, const SemanticSpace& space) {
    LatentVector vo = embed(vectorize(pair.original, space.config), space);
    LatentVector vm = embed(vectorize(pair.candidate, space.config), space);
    return semantic_distance(vo, vm);
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

static constexpr const char* kSpaceFormat = "metatrust-space/1";

static json matrix_to_json(const Matrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    json data = json::array();
    for (double v : m.data()) data.push_back(v);
    j["data"] = std::move(data);
    return j;
}

static Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<size_t>(), j.at("cols").get<size_t>());
    const auto& data = j.at("data");
    if (data.size() != m.data().size()) throw MalformedInput("matrix payload size mismatch");
    for (size_t i = 0; i < m.data().size(); ++i) m.data()[i] = data[i].get<double>();
    return m;
}

std::string serialize_space(const SemanticSpace& space) {
    json j;
    j["format"] = kSpaceFormat;
    j["channel"] = channel_name(space.config.channel);
    j["weighting"] = weighting_name(space.config.weighting);
    j["vocabulary"] = space.config.vocabulary;
    j["min_token_count"] = space.config.min_token_count;
    if (!space.config.idf.empty()) j["idf"] = space.config.idf;
    j["r"] = space.r;
    j["s"] = space.s;
    j["u"] = matrix_to_json(space.u);
    j["v"] = matrix_to_json(space.v);
    return j.dump(2) + "\n";
}

SemanticSpace deserialize_space(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw MalformedInput("space file is not valid JSON");
    if (!j.contains("format") || j["format"] != kSpaceFormat)
        throw ModelVersionMismatch("expected space format " + std::string(kSpaceFormat));
    SemanticSpace space;
    space.config.channel = channel_from_name(j.at("channel").get<std::string>());
    space.config.weighting = weighting_from_name(j.at("weighting").get<std::string>());
    space.config.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    space.config.min_token_count = j.at("min_token_count").get<int>();
    if (j.contains("idf")) space.config.idf = j["idf"].get<std::vector<double>>();
    space.r = j.at("r").get<size_t>();
    space.s = j.at("s").get<std::vector<double>>();
    space.u = matrix_from_json(j.at("u"));
    space.v = matrix_from_json(j.at("v"));
    return space;
}

void save_space(const SemanticSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write space file: " + path);
    out << serialize_space(space);
}

SemanticSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open space file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_space(text);
}

}  // namespace metatrust
