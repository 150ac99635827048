#include "metatrust/sidecar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace metatrust {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Field parsers. Each one throws SchemaViolation naming the offending tag.
// ---------------------------------------------------------------------------

static double parse_number(const std::string& tag, const std::string& value) {
    try {
        size_t pos = 0;
        double d = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(d))
            throw SchemaViolation(tag, "not a finite number: '" + value + "'");
        return d;
    } catch (const SchemaViolation&) {
        throw;
    } catch (const std::exception&) {
        throw SchemaViolation(tag, "not a finite number: '" + value + "'");
    }
}

static int parse_int(const std::string& tag, const std::string& value) {
    try {
        size_t pos = 0;
        int i = std::stoi(value, &pos);
        if (pos != value.size()) throw SchemaViolation(tag, "not an integer: '" + value + "'");
        return i;
    } catch (const SchemaViolation&) {
        throw;
    } catch (const std::exception&) {
        throw SchemaViolation(tag, "not an integer: '" + value + "'");
    }
}

// "YYYY:MM:DD HH:MM:SS" with optional "+HH:MM"/"-HH:MM" offset suffix.
static TimePoint parse_datetime(const std::string& tag, const std::string& value) {
    TimePoint t;
    int oh = 0, om = 0;
    char sign = 0;
    int n = std::sscanf(value.c_str(), "%d:%d:%d %d:%d:%d%c%d:%d", &t.year, &t.month,
                        &t.day, &t.hour, &t.minute, &t.second, &sign, &oh, &om);
    if (n != 6 && n != 9)
        throw SchemaViolation(tag, "expected 'YYYY:MM:DD HH:MM:SS[+HH:MM]', got '" + value + "'");
    if (n == 9) {
        if (sign != '+' && sign != '-')
            throw SchemaViolation(tag, "bad offset sign in '" + value + "'");
        int mins = oh * 60 + om;
        t.utc_offset_minutes = sign == '-' ? -mins : mins;
    }
    if (!calendar_valid(t))
        throw SchemaViolation(tag, "not a calendar-valid timestamp: '" + value + "'");
    return t;
}

static TimePoint parse_date(const std::string& tag, const std::string& value) {
    TimePoint t;
    if (std::sscanf(value.c_str(), "%d:%d:%d", &t.year, &t.month, &t.day) != 3)
        throw SchemaViolation(tag, "expected 'YYYY:MM:DD', got '" + value + "'");
    if (!calendar_valid(t))
        throw SchemaViolation(tag, "not a calendar-valid date: '" + value + "'");
    return t;
}

struct TimeOfDay {
    int hour, minute, second;
};

static TimeOfDay parse_time(const std::string& tag, const std::string& value) {
    TimeOfDay t{};
    if (std::sscanf(value.c_str(), "%d:%d:%d", &t.hour, &t.minute, &t.second) != 3)
        throw SchemaViolation(tag, "expected 'HH:MM:SS', got '" + value + "'");
    if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 || t.second < 0 ||
        t.second > 59)
        throw SchemaViolation(tag, "time of day out of range: '" + value + "'");
    return t;
}

static std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(value);
    while (std::getline(ss, cur, ';')) {
        std::string t = trim(cur);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grouping: canonical tag map -> typed attributes
// ---------------------------------------------------------------------------

static ImageServiceRecord group_tags(std::string id, std::map<std::string, std::string> raw) {
    ImageServiceRecord r;
    r.id = std::move(id);
    if (trim(r.id).empty()) throw SchemaViolation("id", "record id must be non-empty");
    r.raw_tags = std::move(raw);

    auto get = [&r](const char* tag) -> std::optional<std::string> {
        auto it = r.raw_tags.find(tag);
        if (it == r.raw_tags.end() || trim(it->second).empty()) return std::nullopt;
        return it->second;
    };

    // Spatial
    if (auto v = get(tags::GpsLatitude)) {
        double lat = parse_number(tags::GpsLatitude, *v);
        if (lat < -90.0 || lat > 90.0)
            throw SchemaViolation(tags::GpsLatitude, "latitude outside [-90, 90]");
        r.spatial.gps_latitude = lat;
    }
    if (auto v = get(tags::GpsLongitude)) {
        double lon = parse_number(tags::GpsLongitude, *v);
        if (lon < -180.0 || lon > 180.0)
            throw SchemaViolation(tags::GpsLongitude, "longitude outside [-180, 180]");
        r.spatial.gps_longitude = lon;
    }
    r.spatial.gps_satellite = get(tags::GpsSatellites);
    r.spatial.city = get(tags::City);
    r.spatial.country = get(tags::Country);
    r.spatial.state = get(tags::State);
    r.spatial.location = get(tags::Location);

    // Temporal. Explicit TimeZoneOffset (minutes) applies to timestamps that
    // carry no inline offset; everything with a known offset is normalized to
    // UTC here, remaining timestamps stay naive.
    if (auto v = get(tags::TimeZoneOffset))
        r.temporal.timezone_offset = parse_int(tags::TimeZoneOffset, *v);

    auto finish = [&r](TimePoint t) {
        if (!t.utc_offset_minutes && r.temporal.timezone_offset)
            t.utc_offset_minutes = r.temporal.timezone_offset;
        return normalize_to_utc(t);
    };
    if (auto v = get(tags::DateTimeOriginal))
        r.temporal.datetime_original = finish(parse_datetime(tags::DateTimeOriginal, *v));
    if (auto v = get(tags::DateTimeDigitized))
        r.temporal.date_digitized = finish(parse_datetime(tags::DateTimeDigitized, *v));
    if (auto v = get(tags::GpsDateStamp))
        r.temporal.gps_datestamp = parse_date(tags::GpsDateStamp, *v);
    if (auto v = get(tags::GpsTimeStamp)) {
        // GPS time is UTC by definition but needs GPSDateStamp for a full
        // calendar point; without one the tag stays raw-only.
        TimeOfDay tod = parse_time(tags::GpsTimeStamp, *v);
        if (r.temporal.gps_datestamp) {
            TimePoint t = *r.temporal.gps_datestamp;
            t.hour = tod.hour;
            t.minute = tod.minute;
            t.second = tod.second;
            r.temporal.gps_timestamp = t;
        }
    }

    // Contextual
    r.contextual.title = get(tags::Title);
    r.contextual.caption = get(tags::Caption);
    r.contextual.content_description = get(tags::ContentDescription);
    r.contextual.headline = get(tags::Headline);
    r.contextual.image_description = get(tags::ImageDescription);
    r.contextual.instructions = get(tags::Instructions);
    r.contextual.weather_profile = get(tags::WeatherProfile);
    if (auto v = get(tags::Keywords)) r.contextual.keywords = split_list(*v);
    if (auto v = get(tags::SemanticNames)) r.contextual.semantic_names = split_list(*v);

    // Intrinsic
    auto w = get(tags::ImageWidth);
    auto h = get(tags::ImageHeight);
    if (w && h) {
        int wi = parse_int(tags::ImageWidth, *w);
        int hi = parse_int(tags::ImageHeight, *h);
        if (wi <= 0) throw SchemaViolation(tags::ImageWidth, "width must be positive");
        if (hi <= 0) throw SchemaViolation(tags::ImageHeight, "height must be positive");
        r.intrinsic.resolution = {wi, hi};
    }
    if (auto v = get(tags::WhiteBalance)) {
        std::string s;
        for (char c : *v) s.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        if (s == "auto")
            r.intrinsic.white_balance = WhiteBalance::Auto;
        else if (s == "manual")
            r.intrinsic.white_balance = WhiteBalance::Manual;
        else if (s == "unknown")
            r.intrinsic.white_balance = WhiteBalance::Unknown;
        else
            throw SchemaViolation(tags::WhiteBalance, "expected auto|manual|unknown");
    }
    if (auto v = get(tags::SubjectDistance)) {
        double d = parse_number(tags::SubjectDistance, *v);
        if (d < 0) throw SchemaViolation(tags::SubjectDistance, "must be >= 0");
        r.intrinsic.subject_distance = d;
    }
    if (auto v = get(tags::CameraElevationAngle))
        r.intrinsic.camera_elevation_angle = parse_number(tags::CameraElevationAngle, *v);
    if (auto v = get(tags::ShutterSpeed)) {
        // Consumer metadata says "1/200"; we store the reciprocal rate 200.
        std::string s = *v;
        double rate;
        if (s.rfind("1/", 0) == 0)
            rate = parse_number(tags::ShutterSpeed, s.substr(2));
        else
            rate = parse_number(tags::ShutterSpeed, s);
        if (rate <= 0) throw SchemaViolation(tags::ShutterSpeed, "must be > 0");
        r.intrinsic.shutter_speed = rate;
    }
    if (auto v = get(tags::ExposureTime)) {
        double t = parse_number(tags::ExposureTime, *v);
        if (t <= 0) throw SchemaViolation(tags::ExposureTime, "must be > 0");
        r.intrinsic.exposure_time = t;
    }
    r.intrinsic.coverage = get(tags::Coverage);

    return r;
}

// ---------------------------------------------------------------------------
// JSON sidecars
// ---------------------------------------------------------------------------

static ImageServiceRecord record_from_json(const json& j) {
    if (!j.is_object()) throw MalformedInput("sidecar is not a JSON object");
    std::string id;
    std::map<std::string, std::string> raw;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string value;
        if (it.value().is_string())
            value = it.value().get<std::string>();
        else if (it.value().is_number() || it.value().is_boolean())
            value = it.value().dump();
        else
            throw SchemaViolation(it.key(), "tag values must be scalar");
        if (it.key() == "id")
            id = value;
        else
            raw[it.key()] = value;
    }
    if (id.empty()) throw SchemaViolation("id", "missing or empty");
    return group_tags(std::move(id), std::move(raw));
}

ImageServiceRecord parse_sidecar(std::string_view bytes, SidecarFormat format) {
    if (format == SidecarFormat::JsonSidecar) {
        json j = json::parse(bytes, nullptr, false);
        if (j.is_discarded()) throw MalformedInput("undecodable JSON sidecar");
        return record_from_json(j);
    }
    auto records = parse_csv_corpus(bytes);
    if (records.size() != 1)
        throw MalformedInput("csv-row sidecar must hold exactly one data row");
    return records.front();
}

std::string serialize_sidecar(const ImageServiceRecord& record) {
    json j;  // nlohmann::json object keys are lexicographically sorted
    j["id"] = record.id;
    for (const auto& [k, v] : record.raw_tags) j[k] = v;
    return j.dump(2) + "\n";
}

std::vector<ImageServiceRecord> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open corpus file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw MalformedInput("corpus file is not a JSON array: " + path);
    std::vector<ImageServiceRecord> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(record_from_json(item));
    return out;
}

void save_corpus(const std::vector<ImageServiceRecord>& records, const std::string& path) {
    json arr = json::array();
    for (const auto& r : records) {
        json j;
        j["id"] = r.id;
        for (const auto& [k, v] : r.raw_tags) j[k] = v;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw MalformedInput("cannot write corpus file: " + path);
    out << arr.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

static std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::vector<ImageServiceRecord> parse_csv_corpus(std::string_view bytes) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : bytes) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    if (lines.empty()) throw MalformedInput("empty CSV input");

    auto header = split_csv_line(lines[0]);
    if (header.empty() || header[0] != "id")
        throw MalformedInput("CSV header must start with 'id'");

    std::vector<ImageServiceRecord> out;
    for (size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        auto cells = split_csv_line(lines[li]);
        if (cells.size() != header.size())
            throw MalformedInput("CSV row " + std::to_string(li + 1) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()));
        std::string id;
        std::map<std::string, std::string> raw;
        for (size_t c = 0; c < cells.size(); ++c) {
            if (trim(cells[c]).empty()) continue;  // blank cell = absent tag
            if (header[c] == "id")
                id = cells[c];
            else
                raw[header[c]] = cells[c];
        }
        out.push_back(group_tags(std::move(id), std::move(raw)));
    }
    return out;
}

std::string serialize_csv_corpus(const std::vector<ImageServiceRecord>& records) {
    // Columns: id plus every tag that occurs anywhere, canonical names first.
    std::vector<std::string> cols = {"id"};
    std::unordered_set<std::string> seen;
    for (const auto& name : canonical_tag_names()) {
        for (const auto& r : records)
            if (r.raw_tags.count(name)) {
                cols.push_back(name);
                seen.insert(name);
                break;
            }
    }
    std::vector<std::string> extras;
    for (const auto& r : records)
        for (const auto& [k, v] : r.raw_tags)
            if (!seen.count(k)) {
                seen.insert(k);
                extras.push_back(k);
            }
    std::sort(extras.begin(), extras.end());
    cols.insert(cols.end(), extras.begin(), extras.end());

    std::string out;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ",";
        out += csv_escape(cols[i]);
    }
    out += "\n";
    for (const auto& r : records) {
        for (size_t i = 0; i < cols.size(); ++i) {
            if (i) out += ",";
            if (cols[i] == "id") {
                out += csv_escape(r.id);
            } else {
                auto it = r.raw_tags.find(cols[i]);
                if (it != r.raw_tags.end()) out += csv_escape(it->second);
            }
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

static void check_unique_ids(const std::vector<ImageServiceRecord>& recs, const char* which) {
    std::unordered_set<std::string> ids;
    for (const auto& r : recs)
        if (!ids.insert(r.id).second)
            throw DuplicateId(std::string(which) + " corpus repeats id '" + r.id + "'");
}

PairingResult pair_records(const std::vector<ImageServiceRecord>& originals,
                           const std::vector<ImageServiceRecord>& candidates,
                           const PairingRule& rule) {
    check_unique_ids(originals, "originals");
    check_unique_ids(candidates, "candidates");

    std::unordered_map<std::string, const ImageServiceRecord*> by_id;
    for (const auto& o : originals) by_id[o.id] = &o;

    std::vector<const ImageServiceRecord*> ordered;
    ordered.reserve(candidates.size());
    for (const auto& c : candidates) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });

    PairingResult result;
    for (const auto* c : ordered) {
        std::string key;
        if (rule.mode == PairingRule::Mode::Tag) {
            auto it = c->raw_tags.find(rule.tag_name);
            if (it != c->raw_tags.end()) key = it->second;
        } else {
            size_t us = c->id.rfind('_');
            if (us != std::string::npos && us > 0) key = c->id.substr(0, us);
        }
        auto it = key.empty() ? by_id.end() : by_id.find(key);
        if (it == by_id.end()) {
            result.unmatched.push_back(c->id);
        } else {
            result.pairs.push_back({*it->second, *c});
        }
    }
    return result;
}

}  // namespace metatrust
