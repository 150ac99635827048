#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metatrust/record.hpp"

namespace metatrust {

inline constexpr double kEarthRadiusKm = 6371.0;

// Sum of absolute differences over (year, month, day, hour, minute, second).
double temporal_manhattan(const TimePoint& t_o, const TimePoint& t_m);

// Great-circle distance on the R = 6371 km sphere.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// |intersection| / |union| on canonical token sets; both empty -> 1 (no
// change observed).
double contextual_jaccard(const std::set<std::string>& c_o, const std::set<std::string>& c_m);

// 1 - contextual_jaccard: 0 iff the sets are identical.
double contextual_distance(const std::set<std::string>& c_o, const std::set<std::string>& c_m);

std::set<std::string> contextual_token_set(const ImageServiceRecord& record);

// ---------------------------------------------------------------------------
// Per-pair deltas and corpus normalization
// ---------------------------------------------------------------------------

enum class ChannelProvenance { Quantitative, Semantic, Missing };

const char* provenance_name(ChannelProvenance p);
ChannelProvenance provenance_from_name(const std::string& name);

struct DeltaVector {
    std::string record_id;
    std::optional<double> d_spatial_km;   // >= 0
    std::optional<double> d_temporal;     // Manhattan units, >= 0
    std::optional<double> d_contextual;   // [0, 1] quantitative, [0, 2] semantic
    ChannelProvenance spatial_provenance = ChannelProvenance::Missing;
    ChannelProvenance temporal_provenance = ChannelProvenance::Missing;
    ChannelProvenance contextual_provenance = ChannelProvenance::Missing;
};

struct NormalizedDelta {
    double dz_hat = 0;  // [0, 1]
    double dt_hat = 0;
    double dc_hat = 0;
};

enum class NormalizationMode {
    PerChannel,    // min-max within each channel independently (default)
    PaperLiteral,  // min/max pooled across all three channels
};

// Quantitative deltas for one pair. A channel absent on either side yields
// delta 0 with provenance Missing (absence of evidence is not evidence of
// change); the flag travels with the result.
DeltaVector quantitative_deltas(const ServicePair& pair);

// Min-max normalization over a corpus of deltas; missing channels are imputed
// as 0 before scanning. Degenerate max == min maps to 0. Throws EmptyCorpus.
std::vector<NormalizedDelta> normalize_deltas(const std::vector<DeltaVector>& corpus_deltas,
                                              NormalizationMode mode = NormalizationMode::PerChannel);

// Per-channel [min, max] observed during normalization, reusable at scoring
// time (values outside the training range clamp into [0, 1]).
struct NormalizationStats {
    double z_min = 0, z_max = 0;
    double t_min = 0, t_max = 0;
    double c_min = 0, c_max = 0;
};

NormalizationStats normalization_stats(const std::vector<DeltaVector>& corpus_deltas,
                                       NormalizationMode mode);
NormalizedDelta apply_normalization(const DeltaVector& delta, const NormalizationStats& stats);

// CSV export: id, raw deltas, normalized deltas, provenance flags.
std::string deltas_to_csv(const std::vector<DeltaVector>& deltas,
                          const std::vector<NormalizedDelta>& normalized);

}  // namespace metatrust
