#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metatrust/kmeans.hpp"
#include "metatrust/logistic.hpp"
#include "metatrust/metrics.hpp"
#include "metatrust/planes.hpp"
#include "metatrust/semantics.hpp"

namespace metatrust {

// Which delta feeds each channel. Default: quantitative spatial/temporal,
// semantic contextual.
enum class DeltaKind { Quantitative, Semantic };

struct ChannelPolicy {
    DeltaKind spatial = DeltaKind::Quantitative;
    DeltaKind temporal = DeltaKind::Quantitative;
    DeltaKind contextual = DeltaKind::Semantic;
};

std::string policy_to_string(const ChannelPolicy& p);
ChannelPolicy policy_from_string(const std::string& s);

// Semantic spaces for whichever channels the policy routes through LSA.
struct SemanticSpaces {
    std::optional<SemanticSpace> spatial;
    std::optional<SemanticSpace> temporal;
    std::optional<SemanticSpace> contextual;
};

// Fits one space per semantic channel over all records appearing in pairs.
SemanticSpaces build_spaces(const std::vector<ServicePair>& pairs, const ChannelPolicy& policy,
                            const RankRule& rule);

// Per-pair deltas under the policy; semantic channels carry
// provenance=semantic.
std::vector<DeltaVector> compute_pair_deltas(const std::vector<ServicePair>& pairs,
                                             const ChannelPolicy& policy,
                                             const SemanticSpaces& spaces);

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct IntentionModel {
    std::vector<int> levels_used;          // ordinals, ascending, 2..5 entries
    std::vector<IntentionPlane> planes;    // one per used level
    MultinomialModel theta;                // classes parallel levels_used
    std::array<int, 3> weights = {5, 5, 5};
    ChannelPolicy policy;
    NormalizationStats normalization;
    NormalizationMode normalization_mode = NormalizationMode::PerChannel;
    std::uint64_t seed = kDefaultSeed;
    bool use_obfuscation_feature = false;
    SemanticSpaces spaces;
};

// Regression features for one point, weights applied.
std::vector<double> theta_features(const ModificationPoint& p, const IntentionModel& m);

// Multinomial fit over the labeled points (weighted per the model weights).
// Requires >= 2 distinct levels and >= 4 samples per present level.
MultinomialModel fit_theta(const std::vector<std::pair<ModificationPoint, IntentionLevel>>& labeled,
                           std::uint64_t seed, const std::array<int, 3>& weights = {5, 5, 5},
                           bool use_obfuscation = false);

// ---------------------------------------------------------------------------
// Nearest-plane assignment
// ---------------------------------------------------------------------------

enum class AssignStrategy { BruteForce, Heuristic, Clustered };

const char* strategy_name(AssignStrategy s);
AssignStrategy strategy_from_name(const std::string& name);

struct KMeansConfig {
    size_t k = 0;  // 0 = ceil(sqrt(N/2))
    std::uint64_t seed = kDefaultSeed;
};

struct PlaneAssignment {
    IntentionLevel level = IntentionLevel::WellIntention;
    double distance = 0;
};

// Brute force: exact argmin over planes per point. Heuristic: planes visited
// in order of distance from the corpus centroid, early exit once the current
// best is below half the minimum pairwise inter-plane distance (distance
// between parallel planes; 0, disabling the exit, whenever any pair is
// non-parallel). Clustered: argmin per k-means centroid, broadcast to the
// cluster's members. Ties resolve to the lower level ordinal everywhere.
std::vector<PlaneAssignment> assign_nearest_plane(const std::vector<ModificationPoint>& points,
                                                  const std::vector<IntentionPlane>& planes,
                                                  AssignStrategy strategy,
                                                  const KMeansConfig& kmeans_cfg = {});

// Clustered scoring phase with the clustering already trained: one argmin per
// centroid, broadcast to members.
std::vector<PlaneAssignment> assign_with_clusters(const std::vector<ModificationPoint>& points,
                                                  const KMeansResult& clusters,
                                                  const std::vector<IntentionPlane>& planes);

// ---------------------------------------------------------------------------
// End-to-end
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::array<int, 3> weights = {5, 5, 5};
    ChannelPolicy policy;
    NormalizationMode normalization_mode = NormalizationMode::PerChannel;
    RankRule rank_rule;
    std::uint64_t seed = kDefaultSeed;
    int plane_count = 5;  // train on the first plane_count level ordinals
};

// Trains theta + planes from labeled pairs. Labels whose ordinal is >= the
// requested plane count are dropped from training (the model cannot
// represent them); at least two levels must survive.
IntentionModel train_intention_model(const std::vector<ServicePair>& pairs,
                                     const std::map<std::string, IntentionLevel>& labels,
                                     const TrainOptions& opts);

struct IntentionEstimate {
    std::string record_id;
    IntentionLevel level = IntentionLevel::WellIntention;
    double distance = 0;
    NormalizedDelta deltas;
    ChannelProvenance spatial_provenance = ChannelProvenance::Missing;
    ChannelProvenance temporal_provenance = ChannelProvenance::Missing;
    ChannelProvenance contextual_provenance = ChannelProvenance::Missing;
};

// Full scoring pipeline: deltas -> normalization (model stats) -> weights ->
// nearest plane. Deterministic given the model and strategy seeds.
std::vector<IntentionEstimate> estimate_intention(const std::vector<ServicePair>& pairs,
                                                  const IntentionModel& model,
                                                  AssignStrategy strategy,
                                                  const KMeansConfig& kmeans_cfg = {});

// Normalized, weighted points for a set of pairs under a model's stats —
// the representation the planes live in.
std::vector<ModificationPoint> pipeline_points(const std::vector<ServicePair>& pairs,
                                               const IntentionModel& model);

size_t default_cluster_count(size_t n_points);

// Versioned, self-describing model file; load-then-score is bit-stable.
std::string serialize_model(const IntentionModel& model);
IntentionModel deserialize_model(const std::string& text);
void save_model(const IntentionModel& model, const std::string& path);
IntentionModel load_model(const std::string& path);

}  // namespace metatrust
