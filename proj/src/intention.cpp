#include "metatrust/intention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace metatrust {

using nlohmann::json;

static const char* kind_name(DeltaKind k) {
    return k == DeltaKind::Quantitative ? "quantitative" : "semantic";
}

static DeltaKind kind_from_name(const std::string& s) {
    if (s == "quantitative") return DeltaKind::Quantitative;
    if (s == "semantic") return DeltaKind::Semantic;
    throw MalformedInput("unknown delta kind '" + s + "'");
}

std::string policy_to_string(const ChannelPolicy& p) {
    return std::string(kind_name(p.spatial)) + "," + kind_name(p.temporal) + "," +
           kind_name(p.contextual);
}

ChannelPolicy policy_from_string(const std::string& s) {
    std::array<std::string, 3> parts;
    size_t start = 0, idx = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            if (idx >= 3) throw MalformedInput("channel policy needs 3 entries");
            parts[idx++] = s.substr(start, i - start);
            start = i + 1;
        }
    }
    if (idx != 3) throw MalformedInput("channel policy needs 3 entries");
    return {kind_from_name(trim(parts[0])), kind_from_name(trim(parts[1])),
            kind_from_name(trim(parts[2]))};
}

SemanticSpaces build_spaces(const std::vector<ServicePair>& pairs, const ChannelPolicy& policy,
                            const RankRule& rule) {
    std::vector<ImageServiceRecord> all;
    all.reserve(pairs.size() * 2);
    for (const auto& p : pairs) {
        all.push_back(p.original);
        all.push_back(p.candidate);
    }
    SemanticSpaces spaces;
    auto fit_channel = [&](Channel ch) -> SemanticSpace {
        auto cfg = build_vectorizer(all, ch, Weighting::TermFrequency);
        Matrix m = build_matrix(all, cfg);
        return fit_space(m, rule, std::move(cfg));
    };
    if (policy.spatial == DeltaKind::Semantic) spaces.spatial = fit_channel(Channel::Spatial);
    if (policy.temporal == DeltaKind::Semantic) spaces.temporal = fit_channel(Channel::Temporal);
    if (policy.contextual == DeltaKind::Semantic)
        spaces.contextual = fit_channel(Channel::Contextual);
    return spaces;
}

std::vector<DeltaVector> compute_pair_deltas(const std::vector<ServicePair>& pairs,
                                             const ChannelPolicy& policy,
                                             const SemanticSpaces& spaces) {
    std::vector<DeltaVector> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        DeltaVector d = quantitative_deltas(pair);

        if (policy.spatial == DeltaKind::Semantic) {
            if (!spaces.spatial) throw MissingChannel("spatial semantic space not fitted");
            d.d_spatial_km = channel_semantic_delta(pair, *spaces.spatial);
            d.spatial_provenance = ChannelProvenance::Semantic;
        }
        if (policy.temporal == DeltaKind::Semantic) {
            if (!spaces.temporal) throw MissingChannel("temporal semantic space not fitted");
            d.d_temporal = channel_semantic_delta(pair, *spaces.temporal);
            d.temporal_provenance = ChannelProvenance::Semantic;
        }
        if (policy.contextual == DeltaKind::Semantic) {
            if (!spaces.contextual)
                throw MissingChannel("contextual semantic space not fitted");
            d.d_contextual = channel_semantic_delta(pair, *spaces.contextual);
            d.contextual_provenance = ChannelProvenance::Semantic;
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<double> theta_features(const ModificationPoint& p, const IntentionModel& m) {
    ModificationPoint w = apply_weights(p, m.weights);
    std::vector<double> f = {w.dz_hat, w.dt_hat, w.dc_hat};
    if (m.use_obfuscation_feature) f.push_back(p.obfuscation.value_or(0.0));
    return f;
}

MultinomialModel fit_theta(const std::vector<std::pair<ModificationPoint, IntentionLevel>>& labeled,
                           std::uint64_t seed, const std::array<int, 3>& weights,
                           bool use_obfuscation) {
    std::map<IntentionLevel, size_t> counts;
    for (const auto& [p, l] : labeled) counts[l] += 1;
    if (counts.size() < 2)
        throw DegenerateLabels("theta regression needs at least two intention levels");
    for (const auto& [l, n] : counts)
        if (n < 4)
            throw DegenerateLabels(std::string("level ") + intention_label(l) +
                                   " has fewer than 4 samples");

    std::vector<int> class_of(kIntentionLevels, -1);
    int next = 0;
    for (const auto& [l, n] : counts) class_of[ordinal(l)] = next++;

    std::vector<std::vector<double>> x;
    std::vector<int> y;
    x.reserve(labeled.size());
    for (const auto& [p, l] : labeled) {
        ModificationPoint w = apply_weights(p, weights);
        std::vector<double> f = {w.dz_hat, w.dt_hat, w.dc_hat};
        if (use_obfuscation) f.push_back(p.obfuscation.value_or(0.0));
        x.push_back(std::move(f));
        y.push_back(class_of[ordinal(l)]);
    }
    return fit_multinomial(x, y, static_cast<int>(counts.size()), seed);
}

// ---------------------------------------------------------------------------
// Assignment strategies
// ---------------------------------------------------------------------------

const char* strategy_name(AssignStrategy s) {
    switch (s) {
        case AssignStrategy::BruteForce: return "brute";
        case AssignStrategy::Heuristic: return "heur";
        case AssignStrategy::Clustered: return "cluster";
    }
    return "brute";
}

AssignStrategy strategy_from_name(const std::string& name) {
    if (name == "brute" || name == "brute-force") return AssignStrategy::BruteForce;
    if (name == "heur" || name == "heuristic") return AssignStrategy::Heuristic;
    if (name == "cluster" || name == "clustered") return AssignStrategy::Clustered;
    throw MalformedInput("unknown strategy '" + name + "'");
}

size_t default_cluster_count(size_t n) {
    return static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(n) / 2.0)));
}

namespace {

PlaneAssignment nearest_plane(const ModificationPoint& p,
                              const std::vector<IntentionPlane>& planes) {
    PlaneAssignment best{planes.front().level,
                         point_plane_distance(p, planes.front())};
    for (size_t i = 1; i < planes.size(); ++i) {
        double d = point_plane_distance(p, planes[i]);
        if (d < best.distance ||
            (d == best.distance && ordinal(planes[i].level) < ordinal(best.level))) {
            best = {planes[i].level, d};
        }
    }
    return best;
}

// Minimum pairwise inter-plane distance: |d_i - d_j| for parallel pairs,
// 0 as soon as any pair is non-parallel (which disables the early exit).
double min_interplane_distance(const std::vector<IntentionPlane>& planes) {
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < planes.size(); ++i) {
        for (size_t j = i + 1; j < planes.size(); ++j) {
            const auto ni = planes[i].normalized();
            const auto nj = planes[j].normalized();
            double dot = ni.a * nj.a + ni.b * nj.b + ni.c * nj.c;
            double gap = std::abs(dot) >= 1.0 - 1e-12 ? std::abs(ni.d - nj.d) : 0.0;
            dmin = std::min(dmin, gap);
        }
    }
    return planes.size() < 2 ? 0.0 : dmin;
}

std::vector<PlaneAssignment> assign_heuristic(const std::vector<ModificationPoint>& points,
                                              const std::vector<IntentionPlane>& planes) {
    ModificationPoint centroid;
    for (const auto& p : points) {
        centroid.dz_hat += p.dz_hat;
        centroid.dt_hat += p.dt_hat;
        centroid.dc_hat += p.dc_hat;
    }
    if (!points.empty()) {
        centroid.dz_hat /= static_cast<double>(points.size());
        centroid.dt_hat /= static_cast<double>(points.size());
        centroid.dc_hat /= static_cast<double>(points.size());
    }

    std::vector<size_t> order(planes.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> center_dist(planes.size());
    for (size_t i = 0; i < planes.size(); ++i)
        center_dist[i] = point_plane_distance(centroid, planes[i]);
    std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        if (center_dist[i] != center_dist[j]) return center_dist[i] < center_dist[j];
        return ordinal(planes[i].level) < ordinal(planes[j].level);
    });

    const double half_dmin = 0.5 * min_interplane_distance(planes);

    std::vector<PlaneAssignment> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        PlaneAssignment best{planes[order[0]].level,
                             point_plane_distance(p, planes[order[0]])};
        for (size_t oi = 0; oi < order.size(); ++oi) {
            if (oi > 0) {
                double d = point_plane_distance(p, planes[order[oi]]);
                if (d < best.distance ||
                    (d == best.distance &&
                     ordinal(planes[order[oi]].level) < ordinal(best.level))) {
                    best = {planes[order[oi]].level, d};
                }
            }
            // Strict inequality keeps exact ties visiting every plane, so
            // heuristic assignments match brute force whenever the bound holds.
            if (best.distance < half_dmin) break;
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace

std::vector<PlaneAssignment> assign_nearest_plane(const std::vector<ModificationPoint>& points,
                                                  const std::vector<IntentionPlane>& planes,
                                                  AssignStrategy strategy,
                                                  const KMeansConfig& kmeans_cfg) {
    if (planes.empty()) throw NoPlanes("no intention planes to assign against");
    if (points.empty()) return {};

    switch (strategy) {
        case AssignStrategy::BruteForce: {
            std::vector<PlaneAssignment> out;
            out.reserve(points.size());
            for (const auto& p : points) out.push_back(nearest_plane(p, planes));
            return out;
        }
        case AssignStrategy::Heuristic:
            return assign_heuristic(points, planes);
        case AssignStrategy::Clustered: {
            size_t k = kmeans_cfg.k ? kmeans_cfg.k : default_cluster_count(points.size());
            std::vector<Point3> raw;
            raw.reserve(points.size());
            for (const auto& p : points) raw.push_back({p.dz_hat, p.dt_hat, p.dc_hat});
            std::set<Point3> distinct(raw.begin(), raw.end());
            k = std::min(k, distinct.size());
            KMeansResult clusters = kmeans(raw, k, kmeans_cfg.seed);
            return assign_with_clusters(points, clusters, planes);
        }
    }
    throw MalformedInput("unreachable strategy");
}

std::vector<PlaneAssignment> assign_with_clusters(const std::vector<ModificationPoint>& points,
                                                  const KMeansResult& clusters,
                                                  const std::vector<IntentionPlane>& planes) {
    if (planes.empty()) throw NoPlanes("no intention planes to assign against");
    std::vector<PlaneAssignment> per_cluster(clusters.centroids.size());
    for (size_t c = 0; c < clusters.centroids.size(); ++c) {
        ModificationPoint centroid;
        centroid.dz_hat = clusters.centroids[c][0];
        centroid.dt_hat = clusters.centroids[c][1];
        centroid.dc_hat = clusters.centroids[c][2];
        per_cluster[c] = nearest_plane(centroid, planes);
    }
    std::vector<PlaneAssignment> out;
    out.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i)
        out.push_back(per_cluster[clusters.assignment[i]]);
    return out;
}

// ---------------------------------------------------------------------------
// Training and scoring
// ---------------------------------------------------------------------------

IntentionModel train_intention_model(const std::vector<ServicePair>& pairs,
                                     const std::map<std::string, IntentionLevel>& labels,
                                     const TrainOptions& opts) {
    if (pairs.empty()) throw EmptyCorpus("training requires at least one pair");
    if (opts.plane_count < 2 || opts.plane_count > kIntentionLevels)
        throw MalformedInput("plane count must be within 2..5");

    IntentionModel model;
    model.policy = opts.policy;
    model.weights = opts.weights;
    model.normalization_mode = opts.normalization_mode;
    model.seed = opts.seed;
    model.spaces = build_spaces(pairs, opts.policy, opts.rank_rule);

    auto deltas = compute_pair_deltas(pairs, opts.policy, model.spaces);
    model.normalization = normalization_stats(deltas, opts.normalization_mode);

    std::vector<std::pair<ModificationPoint, IntentionLevel>> labeled;
    labeled.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto it = labels.find(pairs[i].candidate.id);
        if (it == labels.end())
            throw MalformedInput("no label for candidate '" + pairs[i].candidate.id + "'");
        if (ordinal(it->second) >= opts.plane_count) continue;
        NormalizedDelta nd = apply_normalization(deltas[i], model.normalization);
        ModificationPoint p{nd.dz_hat, nd.dt_hat, nd.dc_hat, pairs[i].candidate.id, {}};
        labeled.emplace_back(apply_weights(p, opts.weights), it->second);
    }
    if (labeled.empty())
        throw DegenerateLabels("no training samples below the requested plane count");

    model.theta = fit_theta(labeled, opts.seed, {5, 5, 5});  // points already weighted
    model.planes = fit_planes(labeled);
    for (const auto& plane : model.planes) model.levels_used.push_back(ordinal(plane.level));
    return model;
}

std::vector<ModificationPoint> pipeline_points(const std::vector<ServicePair>& pairs,
                                               const IntentionModel& model) {
    auto deltas = compute_pair_deltas(pairs, model.policy, model.spaces);
    std::vector<ModificationPoint> points;
    points.reserve(deltas.size());
    for (const auto& d : deltas) {
        NormalizedDelta nd = apply_normalization(d, model.normalization);
        ModificationPoint p{nd.dz_hat, nd.dt_hat, nd.dc_hat, d.record_id, {}};
        points.push_back(apply_weights(p, model.weights));
    }
    return points;
}

std::vector<IntentionEstimate> estimate_intention(const std::vector<ServicePair>& pairs,
                                                  const IntentionModel& model,
                                                  AssignStrategy strategy,
                                                  const KMeansConfig& kmeans_cfg) {
    auto deltas = compute_pair_deltas(pairs, model.policy, model.spaces);
    std::vector<ModificationPoint> points;
    std::vector<NormalizedDelta> normalized;
    points.reserve(deltas.size());
    for (const auto& d : deltas) {
        NormalizedDelta nd = apply_normalization(d, model.normalization);
        normalized.push_back(nd);
        ModificationPoint p{nd.dz_hat, nd.dt_hat, nd.dc_hat, d.record_id, {}};
        points.push_back(apply_weights(p, model.weights));
    }

    KMeansConfig cfg = kmeans_cfg;
    if (cfg.seed == kDefaultSeed) cfg.seed = model.seed;
    auto assignments = assign_nearest_plane(points, model.planes, strategy, cfg);

    std::vector<IntentionEstimate> out;
    out.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        IntentionEstimate e;
        e.record_id = deltas[i].record_id;
        e.level = assignments[i].level;
        e.distance = assignments[i].distance;
        e.deltas = normalized[i];
        e.spatial_provenance = deltas[i].spatial_provenance;
        e.temporal_provenance = deltas[i].temporal_provenance;
        e.contextual_provenance = deltas[i].contextual_provenance;
        out.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

static constexpr const char* kModelFormat = "metatrust-intention/1";

std::string serialize_model(const IntentionModel& m) {
    json j;
    j["format"] = kModelFormat;
    j["levels_used"] = m.levels_used;
    json planes = json::array();
    for (const auto& p : m.planes) {
        json pj;
        pj["a"] = p.a;
        pj["b"] = p.b;
        pj["c"] = p.c;
        pj["d"] = p.d;
        pj["level"] = intention_label(p.level);
        pj["residual_rms"] = p.residual_rms;
        planes.push_back(std::move(pj));
    }
    j["planes"] = std::move(planes);
    j["theta"] = {{"weights", m.theta.weights},
                  {"training_accuracy", m.theta.training_accuracy},
                  {"converged", m.theta.converged}};
    j["weights"] = m.weights;
    j["channel_policy"] = policy_to_string(m.policy);
    j["normalization"] = {{"mode", m.normalization_mode == NormalizationMode::PerChannel
                                       ? "per-channel"
                                       : "paper"},
                          {"z_min", m.normalization.z_min}, {"z_max", m.normalization.z_max},
                          {"t_min", m.normalization.t_min}, {"t_max", m.normalization.t_max},
                          {"c_min", m.normalization.c_min}, {"c_max", m.normalization.c_max}};
    j["seed"] = m.seed;
    j["use_obfuscation_feature"] = m.use_obfuscation_feature;

    json spaces = json::object();
    auto put_space = [&spaces](const char* key, const std::optional<SemanticSpace>& s) {
        if (s) spaces[key] = json::parse(serialize_space(*s));
    };
    put_space("spatial", m.spaces.spatial);
    put_space("temporal", m.spaces.temporal);
    put_space("contextual", m.spaces.contextual);
    j["spaces"] = std::move(spaces);
    return j.dump(2) + "\n";
}

IntentionModel deserialize_model(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw MalformedInput("model file is not valid JSON");
    if (!j.contains("format") || j["format"] != kModelFormat)
        throw ModelVersionMismatch("expected model format " + std::string(kModelFormat));

    IntentionModel m;
    m.levels_used = j.at("levels_used").get<std::vector<int>>();
    for (const auto& pj : j.at("planes")) {
        IntentionPlane p;
        p.a = pj.at("a").get<double>();
        p.b = pj.at("b").get<double>();
        p.c = pj.at("c").get<double>();
        p.d = pj.at("d").get<double>();
        p.level = intention_from_label(pj.at("level").get<std::string>());
        p.residual_rms = pj.value("residual_rms", 0.0);
        m.planes.push_back(p);
    }
    m.theta.weights = j.at("theta").at("weights").get<std::vector<std::vector<double>>>();
    m.theta.training_accuracy = j.at("theta").value("training_accuracy", 0.0);
    m.theta.converged = j.at("theta").value("converged", true);
    auto w = j.at("weights").get<std::vector<int>>();
    if (w.size() != 3) throw MalformedInput("model weights must have 3 entries");
    m.weights = {w[0], w[1], w[2]};
    m.policy = policy_from_string(j.at("channel_policy").get<std::string>());
    const auto& nj = j.at("normalization");
    m.normalization_mode = nj.at("mode") == "paper" ? NormalizationMode::PaperLiteral
                                                    : NormalizationMode::PerChannel;
    m.normalization.z_min = nj.at("z_min").get<double>();
    m.normalization.z_max = nj.at("z_max").get<double>();
    m.normalization.t_min = nj.at("t_min").get<double>();
    m.normalization.t_max = nj.at("t_max").get<double>();
    m.normalization.c_min = nj.at("c_min").get<double>();
    m.normalization.c_max = nj.at("c_max").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.use_obfuscation_feature = j.value("use_obfuscation_feature", false);

    const auto& spaces = j.at("spaces");
    auto get_space = [&spaces](const char* key) -> std::optional<SemanticSpace> {
        if (!spaces.contains(key)) return std::nullopt;
        return deserialize_space(spaces.at(key).dump());
    };
    m.spaces.spatial = get_space("spatial");
    m.spaces.temporal = get_space("temporal");
    m.spaces.contextual = get_space("contextual");
    return m;
}

void save_model(const IntentionModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write model file: " + path);
    out << serialize_model(m);
}

IntentionModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(text);
}

}  // namespace metatrust
