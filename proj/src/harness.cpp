#include "metatrust/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "metatrust/metrics.hpp"

namespace metatrust {

using nlohmann::json;

const char* magnitude_name(Magnitude m) {
    switch (m) {
        case Magnitude::None: return "none";
        case Magnitude::Minor: return "minor";
        case Magnitude::Major: return "major";
    }
    return "none";
}

Magnitude magnitude_from_name(const std::string& name) {
    if (name == "none") return Magnitude::None;
    if (name == "minor") return Magnitude::Minor;
    if (name == "major") return Magnitude::Major;
    throw MalformedInput("unknown magnitude '" + name + "'");
}

IntentionLevel pattern_label(Magnitude sp, Magnitude tmp, Magnitude ctx) {
    int score = (sp == Magnitude::Major ? 1 : 0) + (tmp == Magnitude::Major ? 1 : 0) +
                (ctx == Magnitude::Major ? 2 : 0);
    return intention_from_ordinal(std::min(score, kIntentionLevels - 1));
}

MutationPlan make_plan(Magnitude sp, Magnitude tmp, Magnitude ctx, std::uint64_t seed) {
    if (sp == Magnitude::None && tmp == Magnitude::None && ctx == Magnitude::None)
        throw MalformedInput("mutation plan must touch at least one channel");
    return {sp, tmp, ctx, pattern_label(sp, tmp, ctx), seed};
}

// ---------------------------------------------------------------------------
// Vocabulary pools: five application domains, ten synonym groups each, three
// interchangeable words per group. Words are unique across domains so topic
// replacement draws from a genuinely disjoint pool.
// ---------------------------------------------------------------------------

namespace {

using SynonymGroup = std::array<const char*, 3>;
using DomainPool = std::array<SynonymGroup, 10>;

const std::array<DomainPool, 5> kDomainPools = {{
    // road-accident
    {{{"car", "automobile", "vehicle"},
      {"crash", "collision", "wreck"},
      {"road", "street", "highway"},
      {"driver", "motorist", "chauffeur"},
      {"injury", "casualty", "trauma"},
      {"ambulance", "paramedic", "medic"},
      {"traffic", "congestion", "gridlock"},
      {"intersection", "junction", "crossroad"},
      {"skid", "swerve", "spinout"},
      {"bumper", "fender", "windshield"}}},
    // crime-scene
    {{{"police", "officer", "constable"},
      {"evidence", "clue", "trace"},
      {"suspect", "perpetrator", "culprit"},
      {"weapon", "firearm", "pistol"},
      {"robbery", "theft", "burglary"},
      {"detective", "investigator", "sleuth"},
      {"witness", "bystander", "onlooker"},
      {"forensics", "fingerprint", "swab"},
      {"arrest", "detention", "custody"},
      {"alley", "lane", "backstreet"}}},
    // violent-scene
    {{{"fight", "brawl", "scuffle"},
      {"assault", "attack", "strike"},
      {"mob", "gang", "horde"},
      {"panic", "chaos", "mayhem"},
      {"shouting", "yelling", "screaming"},
      {"barricade", "blockade", "barrier"},
      {"baton", "club", "truncheon"},
      {"helmet", "shield", "armor"},
      {"flee", "escape", "retreat"},
      {"clash", "confrontation", "standoff"}}},
    // natural-disaster
    {{{"flood", "deluge", "inundation"},
      {"earthquake", "tremor", "quake"},
      {"storm", "tempest", "squall"},
      {"hurricane", "cyclone", "typhoon"},
      {"wildfire", "blaze", "inferno"},
      {"landslide", "mudslide", "rockfall"},
      {"evacuation", "exodus", "relocation"},
      {"rescue", "salvage", "recovery"},
      {"damage", "destruction", "devastation"},
      {"shelter", "refuge", "sanctuary"}}},
    // public-gathering
    {{{"festival", "carnival", "fiesta"},
      {"concert", "gig", "performance"},
      {"parade", "procession", "cavalcade"},
      {"celebration", "festivity", "jubilee"},
      {"stage", "platform", "podium"},
      {"audience", "spectators", "attendees"},
      {"music", "melody", "anthem"},
      {"fireworks", "pyrotechnics", "sparklers"},
      {"vendor", "stall", "kiosk"},
      {"ticket", "pass", "admission"}}},
}};

const std::vector<std::string> kDomainNames = {
    "road-accident", "crime-scene", "violent-scene", "natural-disaster", "public-gathering"};

struct CityAnchor {
    const char* name;
    double lat;
    double lon;
};

const std::array<CityAnchor, 12> kCities = {{
    {"Sydney", -33.8688, 151.2093},
    {"Melbourne", -37.8136, 144.9631},
    {"Tokyo", 35.6762, 139.6503},
    {"Nairobi", -1.2921, 36.8219},
    {"Lima", -12.0464, -77.0428},
    {"Oslo", 59.9139, 10.7522},
    {"Toronto", 43.6532, -79.3832},
    {"Mumbai", 19.0760, 72.8777},
    {"Cairo", 30.0444, 31.2357},
    {"Auckland", -36.8509, 174.7645},
    {"Lisbon", 38.7223, -9.1393},
    {"Seoul", 37.5665, 126.9780},
}};

double uniform(std::uint64_t& state, double lo, double hi) {
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

int uniform_int(std::uint64_t& state, int lo, int hi) {  // inclusive
    if (hi <= lo) return lo;
    return lo + static_cast<int>(splitmix64(state) %
                                 static_cast<std::uint64_t>(hi - lo + 1));
}

// word -> (domain, group) for synonym lookup
const std::unordered_map<std::string, std::pair<size_t, size_t>>& word_index() {
    static const auto index = [] {
        std::unordered_map<std::string, std::pair<size_t, size_t>> m;
        for (size_t d = 0; d < kDomainPools.size(); ++d)
            for (size_t g = 0; g < kDomainPools[d].size(); ++g)
                for (const char* w : kDomainPools[d][g]) m[w] = {d, g};
        return m;
    }();
    return index;
}

std::string two(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

std::string format_datetime(const TimePoint& t) {
    return std::to_string(t.year) + ":" + two(t.month) + ":" + two(t.day) + " " +
           two(t.hour) + ":" + two(t.minute) + ":" + two(t.second);
}

void set_tag(ImageServiceRecord& r, const std::string& tag, const std::string& value) {
    r.raw_tags[tag] = value;
}

std::string join_keywords(const std::vector<std::string>& kws) {
    std::string out;
    for (size_t i = 0; i < kws.size(); ++i) {
        if (i) out += ";";
        out += kws[i];
    }
    return out;
}

}  // namespace

const std::vector<std::string>& context_domains() { return kDomainNames; }

ImageServiceRecord make_base_record(size_t domain_index, size_t index, std::uint64_t seed) {
    if (domain_index >= kDomainPools.size())
        throw MalformedInput("domain index out of range");
    std::uint64_t state = derive_seed(seed, index * 31 + domain_index);

    ImageServiceRecord r;
    std::string id = std::to_string(index);
    while (id.size() < 5) id = "0" + id;
    r.id = "img" + id;

    const auto& city = kCities[splitmix64(state) % kCities.size()];
    double lat = std::clamp(city.lat + uniform(state, -0.05, 0.05), -89.0, 89.0);
    double lon = std::clamp(city.lon + uniform(state, -0.05, 0.05), -179.0, 179.0);
    set_tag(r, tags::GpsLatitude, format_double(lat));
    set_tag(r, tags::GpsLongitude, format_double(lon));
    set_tag(r, tags::City, city.name);

    TimePoint t;
    t.year = 2015 + uniform_int(state, 0, 8);
    t.month = uniform_int(state, 1, 12);
    t.day = uniform_int(state, 1, 28);
    t.hour = uniform_int(state, 0, 23);
    t.minute = uniform_int(state, 0, 59);
    t.second = uniform_int(state, 0, 59);
    set_tag(r, tags::DateTimeOriginal, format_datetime(t));

    // One word from eight of the domain's ten synonym groups.
    const auto& pool = kDomainPools[domain_index];
    std::array<size_t, 10> groups = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (size_t i = 9; i > 0; --i)
        std::swap(groups[i], groups[splitmix64(state) % (i + 1)]);
    std::vector<std::string> keywords;
    for (size_t i = 0; i < 8; ++i)
        keywords.push_back(pool[groups[i]][splitmix64(state) % 3]);
    std::sort(keywords.begin(), keywords.end());
    set_tag(r, tags::Keywords, join_keywords(keywords));
    std::string caption;
    for (size_t i = 0; i < keywords.size(); ++i) {
        if (i) caption += " ";
        caption += keywords[i];
    }
    set_tag(r, tags::Caption, caption);

    int rate = 100 + uniform_int(state, 0, 300);
    set_tag(r, tags::ShutterSpeed, "1/" + std::to_string(rate));
    set_tag(r, tags::ExposureTime, format_double(1.0 / rate));
    set_tag(r, tags::WhiteBalance, "auto");

    // Reparse through the sidecar path so grouped fields and raw tags agree.
    return parse_sidecar(serialize_sidecar(r), SidecarFormat::JsonSidecar);
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

MutationRanges ranges_for_pattern(Magnitude sp, Magnitude tmp, Magnitude ctx, double noise) {
    MutationRanges r;
    const bool sp_major = sp == Magnitude::Major;
    const bool tmp_major = tmp == Magnitude::Major;
    const bool ctx_major = ctx == Magnitude::Major;

    if (tmp_major && !ctx_major) {
        // (M, M, m): a narrow high Manhattan band keeps this level's plane
        // clear of the wide-band all-major pattern.
        r.tmaj_years_lo = r.tmaj_years_hi = 1;
        r.tmaj_months_lo = r.tmaj_months_hi = 6;
        r.tmaj_day_lo = 9; r.tmaj_day_hi = 10;
        r.tmaj_hour_lo = 10; r.tmaj_hour_hi = 11;
        r.tmaj_minute_lo = 28 - static_cast<int>(std::lround(4 * noise));
        r.tmaj_minute_hi = 30;
        r.tmaj_second_lo = 28 - static_cast<int>(std::lround(4 * noise));
        r.tmaj_second_hi = 30;
    }
    if (!tmp_major && ctx_major && sp_major) {
        // (M, m, M): minor temporal pushed into its own Manhattan band.
        r.temporal_minor_lo = 40 - static_cast<int>(std::lround(8 * noise));
        r.temporal_minor_hi = 56 + static_cast<int>(std::lround(8 * noise));
    } else if (!tmp_major) {
        r.temporal_minor_lo = 1;
        r.temporal_minor_hi = 10 + static_cast<int>(std::lround(14 * noise));
    }
    if (ctx_major && tmp_major) {
        // (M, M, M): strongest topic replacement.
        r.ctx_major_frac_lo = 0.85;
        r.ctx_major_frac_hi = 0.95;
    }
    return r;
}

namespace {

// Destination point at the given bearing and distance on the 6371 km sphere.
std::pair<double, double> destination_point(double lat, double lon, double bearing_rad,
                                            double distance_km) {
    constexpr double deg = M_PI / 180.0;
    double phi1 = lat * deg;
    double lambda1 = lon * deg;
    double delta = distance_km / kEarthRadiusKm;
    double phi2 = std::asin(std::sin(phi1) * std::cos(delta) +
                            std::cos(phi1) * std::sin(delta) * std::cos(bearing_rad));
    double lambda2 =
        lambda1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(phi1),
                             std::cos(delta) - std::sin(phi1) * std::sin(phi2));
    double lat2 = phi2 / deg;
    double lon2 = lambda2 / deg;
    while (lon2 > 180.0) lon2 -= 360.0;
    while (lon2 < -180.0) lon2 += 360.0;
    return {std::clamp(lat2, -90.0, 90.0), lon2};
}

int step_with_headroom(int value, int target, int lo, int hi) {
    if (value + target <= hi) return value + target;
    return std::max(value - target, lo);
}

void mutate_spatial(ImageServiceRecord& r, Magnitude mag, const MutationRanges& rng,
                    std::uint64_t& state) {
    if (!r.spatial.has_gps())
        throw ChannelMissing("record '" + r.id + "' has no GPS coordinates");
    double km = mag == Magnitude::Major
                    ? uniform(state, rng.spatial_major_km_lo, rng.spatial_major_km_hi)
                    : uniform(state, rng.spatial_minor_km_lo, rng.spatial_minor_km_hi);
    double bearing = uniform(state, 0.0, 2.0 * M_PI);
    auto [lat, lon] =
        destination_point(*r.spatial.gps_latitude, *r.spatial.gps_longitude, bearing, km);
    r.spatial.gps_latitude = lat;
    r.spatial.gps_longitude = lon;
    set_tag(r, tags::GpsLatitude, format_double(lat));
    set_tag(r, tags::GpsLongitude, format_double(lon));
}

TimePoint mutate_timepoint_minor(const TimePoint& t, const MutationRanges& rng,
                                 std::uint64_t& state) {
    int k = uniform_int(state, std::max(1, rng.temporal_minor_lo),
                        std::min(60, rng.temporal_minor_hi));
    int to_seconds = std::min(k, 30);
    int to_minutes = k - to_seconds;
    TimePoint out = t;
    out.second = step_with_headroom(t.second, to_seconds, 0, 59);
    out.minute = step_with_headroom(t.minute, to_minutes, 0, 59);
    return out;
}

TimePoint mutate_timepoint_major(const TimePoint& t, const MutationRanges& rng,
                                 std::uint64_t& state) {
    TimePoint out = t;
    out.year += uniform_int(state, rng.tmaj_years_lo, rng.tmaj_years_hi);
    int months = uniform_int(state, rng.tmaj_months_lo, rng.tmaj_months_hi);
    if (t.month + months <= 12) {
        out.month = t.month + months;
    } else {
        // Stepping the month backward keeps the component distance exact; an
        // extra year keeps the real shift above a year.
        out.month = t.month - months;
        out.year += 1;
    }
    // Calendar-valid day before stepping.
    TimePoint probe{out.year, out.month, 1};
    int month_len = 28;
    for (int d = 31; d >= 28; --d) {
        probe.day = d;
        if (calendar_valid(probe)) {
            month_len = d;
            break;
        }
    }
    int base_day = std::min(t.day, month_len);
    out.day = step_with_headroom(base_day, uniform_int(state, rng.tmaj_day_lo, rng.tmaj_day_hi),
                                 1, month_len);
    out.hour = step_with_headroom(t.hour, uniform_int(state, rng.tmaj_hour_lo, rng.tmaj_hour_hi),
                                  0, 23);
    out.minute = step_with_headroom(
        t.minute, uniform_int(state, rng.tmaj_minute_lo, rng.tmaj_minute_hi), 0, 59);
    out.second = step_with_headroom(
        t.second, uniform_int(state, rng.tmaj_second_lo, rng.tmaj_second_hi), 0, 59);
    return out;
}

void mutate_temporal(ImageServiceRecord& r, Magnitude mag, const MutationRanges& rng,
                     std::uint64_t& state) {
    auto primary = r.temporal.primary();
    if (!primary) throw ChannelMissing("record '" + r.id + "' has no temporal attribute");
    TimePoint target = mag == Magnitude::Major ? mutate_timepoint_major(*primary, rng, state)
                                               : mutate_timepoint_minor(*primary, rng, state);
    std::int64_t shift = to_epoch_seconds(target) - to_epoch_seconds(*primary);

    if (r.temporal.datetime_original) {
        r.temporal.datetime_original =
            r.temporal.datetime_original == primary ? target
                                                    : add_seconds(*r.temporal.datetime_original, shift);
        set_tag(r, tags::DateTimeOriginal, format_datetime(*r.temporal.datetime_original));
    }
    if (r.temporal.date_digitized) {
        r.temporal.date_digitized = add_seconds(*r.temporal.date_digitized, shift);
        set_tag(r, tags::DateTimeDigitized, format_datetime(*r.temporal.date_digitized));
    }
    if (r.temporal.gps_datestamp) {
        r.temporal.gps_datestamp = add_seconds(*r.temporal.gps_datestamp, shift);
        const auto& g = *r.temporal.gps_datestamp;
        set_tag(r, tags::GpsDateStamp,
                std::to_string(g.year) + ":" + two(g.month) + ":" + two(g.day));
    }
    if (r.temporal.gps_timestamp) {
        r.temporal.gps_timestamp = add_seconds(*r.temporal.gps_timestamp, shift);
        const auto& g = *r.temporal.gps_timestamp;
        set_tag(r, tags::GpsTimeStamp, two(g.hour) + ":" + two(g.minute) + ":" + two(g.second));
    }
}

void mutate_contextual(ImageServiceRecord& r, Magnitude mag, const MutationRanges& rng,
                       std::uint64_t& state) {
    if (r.contextual.keywords.empty())
        throw ChannelMissing("record '" + r.id + "' has no keywords");
    auto& kws = r.contextual.keywords;

    double frac = mag == Magnitude::Major
                      ? uniform(state, rng.ctx_major_frac_lo, rng.ctx_major_frac_hi)
                      : uniform(state, rng.ctx_minor_frac_lo, rng.ctx_minor_frac_hi);
    size_t n_swap = std::max<size_t>(
        1, static_cast<size_t>(std::lround(frac * static_cast<double>(kws.size()))));
    n_swap = std::min(n_swap, kws.size());

    std::vector<size_t> order(kws.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[splitmix64(state) % i]);

    // Majority domain of the known keywords decides the home pool.
    std::array<size_t, 5> votes{};
    for (const auto& w : kws) {
        auto it = word_index().find(w);
        if (it != word_index().end()) votes[it->second.first] += 1;
    }
    size_t home = std::max_element(votes.begin(), votes.end()) - votes.begin();
    size_t away = home;
    if (mag == Magnitude::Major) {
        away = splitmix64(state) % kDomainPools.size();
        if (away == home) away = (home + 1) % kDomainPools.size();
    }

    size_t swapped = 0;
    for (size_t oi = 0; oi < order.size() && swapped < n_swap; ++oi) {
        std::string& word = kws[order[oi]];
        if (mag == Magnitude::Minor) {
            auto it = word_index().find(word);
            if (it == word_index().end()) continue;  // no synonym group known
            const auto& group = kDomainPools[it->second.first][it->second.second];
            int pos = 0;
            for (int g = 0; g < 3; ++g)
                if (word == group[g]) pos = g;
            word = group[(pos + 1 + static_cast<int>(splitmix64(state) % 2)) % 3];
            ++swapped;
        } else {
            const auto& pool = kDomainPools[away];
            for (int attempt = 0; attempt < 16; ++attempt) {
                std::string next = pool[splitmix64(state) % 10][splitmix64(state) % 3];
                bool dup = false;
                for (const auto& w : kws) dup = dup || w == next;
                if (dup) continue;
                word = next;
                ++swapped;
                break;
            }
        }
    }

    std::sort(kws.begin(), kws.end());
    set_tag(r, tags::Keywords, join_keywords(kws));
    std::string caption;
    for (size_t i = 0; i < kws.size(); ++i) {
        if (i) caption += " ";
        caption += kws[i];
    }
    r.contextual.caption = caption;
    set_tag(r, tags::Caption, caption);
}

}  // namespace

std::pair<ImageServiceRecord, IntentionLevel> mutate(const ImageServiceRecord& record,
                                                     const MutationPlan& plan,
                                                     const MutationRanges* ranges) {
    if (plan.intent_label != pattern_label(plan.spatial, plan.temporal, plan.contextual))
        throw MalformedInput("plan label disagrees with the pattern table");
    MutationRanges rng = ranges ? *ranges
                                : ranges_for_pattern(plan.spatial, plan.temporal,
                                                     plan.contextual);
    ImageServiceRecord out = record;
    std::uint64_t state = derive_seed(plan.seed, 0x6d75746174ull);
    if (plan.spatial != Magnitude::None) mutate_spatial(out, plan.spatial, rng, state);
    if (plan.temporal != Magnitude::None) mutate_temporal(out, plan.temporal, rng, state);
    if (plan.contextual != Magnitude::None) mutate_contextual(out, plan.contextual, rng, state);
    return {std::move(out), plan.intent_label};
}

DerivedPattern derive_pattern(const ServicePair& pair, const SemanticSpace& contextual_space,
                              const PatternThresholds& th) {
    DerivedPattern p;
    if (pair.original.spatial.has_gps() && pair.candidate.spatial.has_gps()) {
        double km = haversine_km(*pair.original.spatial.gps_latitude,
                                 *pair.original.spatial.gps_longitude,
                                 *pair.candidate.spatial.gps_latitude,
                                 *pair.candidate.spatial.gps_longitude);
        if (km > 0) p.spatial = km >= th.spatial_major_km ? Magnitude::Major : Magnitude::Minor;
    }
    auto to = pair.original.temporal.primary();
    auto tm = pair.candidate.temporal.primary();
    if (to && tm) {
        double secs = std::abs(
            static_cast<double>(to_epoch_seconds(*tm) - to_epoch_seconds(*to)));
        if (secs > 0)
            p.temporal = secs >= th.temporal_major_seconds ? Magnitude::Major : Magnitude::Minor;
    }
    auto co = contextual_token_set(pair.original);
    auto cm = contextual_token_set(pair.candidate);
    if (co != cm) {
        double sem = channel_semantic_delta(pair, contextual_space);
        p.contextual =
            sem >= th.contextual_major_semantic ? Magnitude::Major : Magnitude::Minor;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

namespace {

struct Pattern {
    Magnitude sp, tmp, ctx;
};

// Ladder: each level adds severity in its own band of delta space.
Pattern pattern_for_level(int level) {
    switch (level) {
        case 0: return {Magnitude::Minor, Magnitude::Minor, Magnitude::Minor};
        case 1: return {Magnitude::Major, Magnitude::Minor, Magnitude::Minor};
        case 2: return {Magnitude::Major, Magnitude::Major, Magnitude::Minor};
        case 3: return {Magnitude::Major, Magnitude::Minor, Magnitude::Major};
        case 4: return {Magnitude::Major, Magnitude::Major, Magnitude::Major};
    }
    throw MalformedInput("level out of range");
}

}  // namespace

EvalCorpus generate_eval_corpus(const GeneratorConfig& cfg) {
    if (cfg.levels < 2 || cfg.levels > kIntentionLevels)
        throw MalformedInput("generator levels must be within 2..5");
    if (cfg.pairs_per_level == 0) throw EmptyCorpus("pairs_per_level must be positive");

    EvalCorpus corpus;
    size_t index = 0;
    for (int level = 0; level < cfg.levels; ++level) {
        Pattern pat = pattern_for_level(level);
        MutationRanges ranges = ranges_for_pattern(pat.sp, pat.tmp, pat.ctx, cfg.noise);
        for (size_t i = 0; i < cfg.pairs_per_level; ++i, ++index) {
            size_t domain = index % kDomainPools.size();
            ImageServiceRecord base =
                make_base_record(domain, index, derive_seed(cfg.seed, 2 * index));
            MutationPlan plan = make_plan(pat.sp, pat.tmp, pat.ctx,
                                          derive_seed(cfg.seed, 2 * index + 1));
            auto [mutated, label] = mutate(base, plan, &ranges);
            mutated.id = base.id + "_m1";
            corpus.labels[mutated.id] = label;
            corpus.pairs.push_back({std::move(base), std::move(mutated)});
        }
    }
    return corpus;
}

EvalCorpus generate_baseline_corpus(size_t pairs_per_class, std::uint64_t seed) {
    if (pairs_per_class == 0) throw EmptyCorpus("pairs_per_class must be positive");

    // Spatial/temporal identically distributed in both classes; only the
    // contextual treatment (paraphrase vs topic replacement) differs.
    MutationRanges flat;
    flat.temporal_minor_lo = 1;
    flat.temporal_minor_hi = 55;
    flat.ctx_minor_frac_lo = 0.3;
    flat.ctx_minor_frac_hi = 0.6;
    flat.ctx_major_frac_lo = 0.6;
    flat.ctx_major_frac_hi = 0.8;

    EvalCorpus corpus;
    size_t index = 0;
    for (int cls = 0; cls < 2; ++cls) {
        Magnitude ctx = cls == 0 ? Magnitude::Minor : Magnitude::Major;
        for (size_t i = 0; i < pairs_per_class; ++i, ++index) {
            size_t domain = index % kDomainPools.size();
            ImageServiceRecord base =
                make_base_record(domain, index, derive_seed(seed, 2 * index));
            MutationPlan plan =
                make_plan(Magnitude::Major, Magnitude::Minor, ctx, derive_seed(seed, 2 * index + 1));
            auto [mutated, label] = mutate(base, plan, &flat);
            mutated.id = base.id + "_m1";
            corpus.labels[mutated.id] = label;
            corpus.pairs.push_back({std::move(base), std::move(mutated)});
        }
    }
    return corpus;
}

std::string labels_to_csv(const std::map<std::string, IntentionLevel>& labels) {
    std::string out = "id,intention\n";
    for (const auto& [id, level] : labels)
        out += id + "," + intention_label(level) + "\n";
    return out;
}

std::map<std::string, IntentionLevel> labels_from_csv(const std::string& text) {
    std::map<std::string, IntentionLevel> out;
    std::stringstream ss(text);
    std::string line;
    bool header = true;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            if (trim(line) != "id,intention")
                throw MalformedInput("labels CSV must start with 'id,intention'");
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw MalformedInput("labels CSV row lacks a comma: " + line);
        out[line.substr(0, comma)] = intention_from_label(trim(line.substr(comma + 1)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

static std::vector<std::vector<size_t>> empty_confusion() {
    return std::vector<std::vector<size_t>>(kIntentionLevels,
                                            std::vector<size_t>(kIntentionLevels, 0));
}

AccuracyResult evaluate_accuracy(const IntentionModel& model, const EvalCorpus& corpus,
                                 AssignStrategy strategy, const KMeansConfig& kmeans_cfg) {
    if (corpus.pairs.empty()) throw EmptyCorpus("evaluation corpus is empty");
    auto estimates = estimate_intention(corpus.pairs, model, strategy, kmeans_cfg);
    AccuracyResult result;
    result.confusion = empty_confusion();
    size_t correct = 0;
    for (const auto& e : estimates) {
        auto it = corpus.labels.find(e.record_id);
        if (it == corpus.labels.end())
            throw MalformedInput("no ground-truth label for '" + e.record_id + "'");
        result.confusion[ordinal(it->second)][ordinal(e.level)] += 1;
        if (it->second == e.level) ++correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(estimates.size());
    return result;
}

PrecisionResult evaluate_precision(const IntentionModel& model, const EvalCorpus& corpus,
                                   AssignStrategy strategy, const KMeansConfig& kmeans_cfg) {
    if (corpus.pairs.empty()) throw EmptyCorpus("evaluation corpus is empty");
    auto estimates = estimate_intention(corpus.pairs, model, strategy, kmeans_cfg);
    PrecisionResult result;
    for (const auto& e : estimates) {
        if (!is_ill(e.level)) continue;
        result.predicted_ill += 1;
        auto it = corpus.labels.find(e.record_id);
        if (it != corpus.labels.end() && is_ill(it->second)) result.true_positive_ill += 1;
    }
    if (result.predicted_ill > 0)
        result.precision_ill = static_cast<double>(result.true_positive_ill) /
                               static_cast<double>(result.predicted_ill);
    return result;
}

AccuracyResult baseline_tfidf(const EvalCorpus& corpus, const TrainOptions& opts,
                              AssignStrategy strategy, const KMeansConfig& kmeans_cfg) {
    if (corpus.pairs.empty()) throw EmptyCorpus("baseline corpus is empty");
    std::vector<ImageServiceRecord> all;
    all.reserve(corpus.pairs.size() * 2);
    for (const auto& p : corpus.pairs) {
        all.push_back(p.original);
        all.push_back(p.candidate);
    }
    auto cfg = build_vectorizer(all, Channel::Contextual, Weighting::TfIdf);

    auto cosine_distance = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dot = 0, na = 0, nb = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        if (na == 0.0 || nb == 0.0) return 1.0;
        return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
    };

    std::vector<DeltaVector> deltas;
    deltas.reserve(corpus.pairs.size());
    for (const auto& pair : corpus.pairs) {
        DeltaVector d = quantitative_deltas(pair);
        auto co = channel_tokens(pair.original, Channel::Contextual);
        auto cm = channel_tokens(pair.candidate, Channel::Contextual);
        if (!co.empty() || !cm.empty()) {
            d.d_contextual =
                cosine_distance(vectorize(pair.original, cfg), vectorize(pair.candidate, cfg));
            d.contextual_provenance = ChannelProvenance::Semantic;
        }
        deltas.push_back(std::move(d));
    }

    NormalizationStats stats = normalization_stats(deltas, opts.normalization_mode);
    std::vector<std::pair<ModificationPoint, IntentionLevel>> labeled;
    std::vector<ModificationPoint> points;
    std::vector<IntentionLevel> truth;
    for (size_t i = 0; i < deltas.size(); ++i) {
        NormalizedDelta nd = apply_normalization(deltas[i], stats);
        ModificationPoint p{nd.dz_hat, nd.dt_hat, nd.dc_hat, deltas[i].record_id, {}};
        p = apply_weights(p, opts.weights);
        auto it = corpus.labels.find(deltas[i].record_id);
        if (it == corpus.labels.end())
            throw MalformedInput("no label for '" + deltas[i].record_id + "'");
        points.push_back(p);
        truth.push_back(it->second);
        if (ordinal(it->second) < opts.plane_count) labeled.emplace_back(p, it->second);
    }

    auto planes = fit_planes(labeled);
    auto assignments = assign_nearest_plane(points, planes, strategy, kmeans_cfg);

    AccuracyResult result;
    result.confusion = empty_confusion();
    size_t correct = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        result.confusion[ordinal(truth[i])][ordinal(assignments[i].level)] += 1;
        if (assignments[i].level == truth[i]) ++correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(points.size());
    return result;
}

// ---------------------------------------------------------------------------
// Runtime benchmark
// ---------------------------------------------------------------------------

std::vector<ModificationPoint> synthetic_points(size_t n, std::uint64_t seed) {
    std::uint64_t state = seed;
    std::vector<ModificationPoint> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        ModificationPoint p;
        p.dz_hat = uniform(state, 0.0, 1.0);
        p.dt_hat = uniform(state, 0.0, 1.0);
        p.dc_hat = uniform(state, 0.0, 1.0);
        p.record_id = "p" + std::to_string(i);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<IntentionPlane> stacked_planes(size_t count) {
    std::vector<IntentionPlane> planes;
    for (size_t i = 0; i < count; ++i) {
        IntentionPlane p;
        p.a = 0;
        p.b = 0;
        p.c = 1;
        p.d = -(static_cast<double>(i) + 0.5) / static_cast<double>(count);
        p.level = intention_from_ordinal(static_cast<int>(i % kIntentionLevels));
        planes.push_back(p.normalized());
    }
    return planes;
}

std::vector<StrategyTiming> benchmark_runtime(const std::vector<ModificationPoint>& points,
                                              const std::vector<IntentionPlane>& planes,
                                              const KMeansConfig& kmeans_cfg, int runs) {
    using clock = std::chrono::steady_clock;
    const double n = static_cast<double>(points.size());

    // Clustering is trained once, outside every timed region.
    size_t k = kmeans_cfg.k ? kmeans_cfg.k : default_cluster_count(points.size());
    std::vector<Point3> raw;
    raw.reserve(points.size());
    for (const auto& p : points) raw.push_back({p.dz_hat, p.dt_hat, p.dc_hat});
    KMeansResult clusters = kmeans(raw, k, kmeans_cfg.seed);

    volatile double sink = 0;
    auto time_runs = [&](auto&& fn) {
        std::vector<double> samples;
        for (int r = 0; r < runs; ++r) {
            auto start = clock::now();
            auto result = fn();
            auto stop = clock::now();
            double total = 0;
            for (const auto& a : result) total += a.distance;
            sink = sink + total;
            samples.push_back(
                std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count() / n);
        }
        std::sort(samples.begin(), samples.end());
        return samples[samples.size() / 2];
    };

    std::vector<StrategyTiming> out;
    out.push_back({"brute", time_runs([&] {
                       return assign_nearest_plane(points, planes, AssignStrategy::BruteForce);
                   })});
    out.push_back({"heur", time_runs([&] {
                       return assign_nearest_plane(points, planes, AssignStrategy::Heuristic);
                   })});
    out.push_back({"cluster", time_runs([&] {
                       return assign_with_clusters(points, clusters, planes);
                   })});
    return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

std::string report_json(const std::vector<EvalResult>& results) {
    json arr = json::array();
    for (const auto& r : results) {
        json j;
        j["strategy"] = r.strategy;
        j["plane_count"] = r.plane_count;
        j["accuracy"] = r.accuracy;
        if (r.precision_ill)
            j["precision_ill"] = *r.precision_ill;
        else
            j["precision_ill"] = nullptr;
        if (r.runtime_ns_per_record)
            j["runtime_ns_per_record"] = *r.runtime_ns_per_record;
        else
            j["runtime_ns_per_record"] = nullptr;
        j["confusion"] = r.confusion;
        arr.push_back(std::move(j));
    }
    json root;
    root["results"] = std::move(arr);
    return root.dump(2) + "\n";
}

std::string report_csv(const std::vector<EvalResult>& results) {
    std::string out = "strategy,plane_count,accuracy,precision_ill,runtime_ns_per_record\n";
    for (const auto& r : results) {
        out += r.strategy;
        out += "," + std::to_string(r.plane_count);
        out += "," + format_double(r.accuracy);
        out += ",";
        if (r.precision_ill) out += format_double(*r.precision_ill);
        out += ",";
        if (r.runtime_ns_per_record) out += format_double(*r.runtime_ns_per_record);
        out += "\n";
    }
    return out;
}

}  // namespace metatrust
