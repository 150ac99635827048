#include "metatrust/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace metatrust {

double temporal_manhattan(const TimePoint& t_o, const TimePoint& t_m) {
    double sum = 0;
    auto a = t_o.components();
    auto b = t_m.components();
    for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double deg = M_PI / 180.0;
    const double phi1 = lat1 * deg;
    const double phi2 = lat2 * deg;
    const double dphi = (lat2 - lat1) * deg;
    const double dlambda = (lon2 - lon1) * deg;

    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlambda / 2.0);
    double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    a = std::clamp(a, 0.0, 1.0);  // guard rounding at antipodes
    const double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
    return kEarthRadiusKm * c;
}

double contextual_jaccard(const std::set<std::string>& c_o, const std::set<std::string>& c_m) {
    if (c_o.empty() && c_m.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& t : c_o) inter += c_m.count(t);
    size_t uni = c_o.size() + c_m.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double contextual_distance(const std::set<std::string>& c_o, const std::set<std::string>& c_m) {
    return 1.0 - contextual_jaccard(c_o, c_m);
}

std::set<std::string> contextual_token_set(const ImageServiceRecord& record) {
    auto tokens = record.contextual.all_tokens();
    return {tokens.begin(), tokens.end()};
}

const char* provenance_name(ChannelProvenance p) {
    switch (p) {
        case ChannelProvenance::Quantitative: return "quantitative";
        case ChannelProvenance::Semantic: return "semantic";
        case ChannelProvenance::Missing: return "missing";
    }
    return "missing";
}

ChannelProvenance provenance_from_name(const std::string& name) {
    if (name == "quantitative") return ChannelProvenance::Quantitative;
    if (name == "semantic") return ChannelProvenance::Semantic;
    if (name == "missing") return ChannelProvenance::Missing;
    throw MalformedInput("unknown provenance flag '" + name + "'");
}

DeltaVector quantitative_deltas(const ServicePair& pair) {
    DeltaVector d;
    d.record_id = pair.candidate.id;

    if (pair.original.spatial.has_gps() && pair.candidate.spatial.has_gps()) {
        d.d_spatial_km = haversine_km(*pair.original.spatial.gps_latitude,
                                      *pair.original.spatial.gps_longitude,
                                      *pair.candidate.spatial.gps_latitude,
                                      *pair.candidate.spatial.gps_longitude);
        d.spatial_provenance = ChannelProvenance::Quantitative;
    }

    auto to = pair.original.temporal.primary();
    auto tm = pair.candidate.temporal.primary();
    if (to && tm) {
        d.d_temporal = temporal_manhattan(*to, *tm);
        d.temporal_provenance = ChannelProvenance::Quantitative;
    }

    auto co = contextual_token_set(pair.original);
    auto cm = contextual_token_set(pair.candidate);
    if (!co.empty() || !cm.empty()) {
        d.d_contextual = contextual_distance(co, cm);
        d.contextual_provenance = ChannelProvenance::Quantitative;
    }
    return d;
}

static double imputed(const std::optional<double>& v) { return v.value_or(0.0); }

NormalizationStats normalization_stats(const std::vector<DeltaVector>& deltas,
                                       NormalizationMode mode) {
    if (deltas.empty()) throw EmptyCorpus("normalize_deltas requires at least one delta");
    NormalizationStats s;
    bool first = true;
    for (const auto& d : deltas) {
        double z = imputed(d.d_spatial_km);
        double t = imputed(d.d_temporal);
        double c = imputed(d.d_contextual);
        if (first) {
            s.z_min = s.z_max = z;
            s.t_min = s.t_max = t;
            s.c_min = s.c_max = c;
            first = false;
        } else {
            s.z_min = std::min(s.z_min, z); s.z_max = std::max(s.z_max, z);
            s.t_min = std::min(s.t_min, t); s.t_max = std::max(s.t_max, t);
            s.c_min = std::min(s.c_min, c); s.c_max = std::max(s.c_max, c);
        }
    }
    if (mode == NormalizationMode::PaperLiteral) {
        double lo = std::min({s.z_min, s.t_min, s.c_min});
        double hi = std::max({s.z_max, s.t_max, s.c_max});
        s.z_min = s.t_min = s.c_min = lo;
        s.z_max = s.t_max = s.c_max = hi;
    }
    return s;
}

static double minmax(double v, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

NormalizedDelta apply_normalization(const DeltaVector& d, const NormalizationStats& s) {
    return {minmax(imputed(d.d_spatial_km), s.z_min, s.z_max),
            minmax(imputed(d.d_temporal), s.t_min, s.t_max),
            minmax(imputed(d.d_contextual), s.c_min, s.c_max)};
}

std::vector<NormalizedDelta> normalize_deltas(const std::vector<DeltaVector>& deltas,
                                              NormalizationMode mode) {
    NormalizationStats s = normalization_stats(deltas, mode);
    std::vector<NormalizedDelta> out;
    out.reserve(deltas.size());
    for (const auto& d : deltas) out.push_back(apply_normalization(d, s));
    return out;
}

std::string deltas_to_csv(const std::vector<DeltaVector>& deltas,
                          const std::vector<NormalizedDelta>& normalized) {
    std::string out =
        "id,d_spatial_km,d_temporal,d_contextual,dz_hat,dt_hat,dc_hat,"
        "prov_spatial,prov_temporal,prov_contextual\n";
    for (size_t i = 0; i < deltas.size(); ++i) {
        const auto& d = deltas[i];
        auto cell = [](const std::optional<double>& v) {
            return v ? format_double(*v) : std::string();
        };
        out += d.record_id;
        out += "," + cell(d.d_spatial_km);
        out += "," + cell(d.d_temporal);
        out += "," + cell(d.d_contextual);
        if (i < normalized.size()) {
            out += "," + format_double(normalized[i].dz_hat);
            out += "," + format_double(normalized[i].dt_hat);
            out += "," + format_double(normalized[i].dc_hat);
        } else {
            out += ",,,";
        }
        out += std::string(",") + provenance_name(d.spatial_provenance);
        out += std::string(",") + provenance_name(d.temporal_provenance);
        out += std::string(",") + provenance_name(d.contextual_provenance);
        out += "\n";
    }
    return out;
}

}  // namespace metatrust
