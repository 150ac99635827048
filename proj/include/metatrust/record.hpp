#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metatrust/common.hpp"

namespace metatrust {

// ---------------------------------------------------------------------------
// Canonical tag-name table, version 1. Wire spellings follow EXIF/IPTC
// conventions; sidecar parsing, CSV headers and the serializer all use these
// exact strings.
// ---------------------------------------------------------------------------

inline constexpr int kTagTableVersion = 1;

namespace tags {
inline constexpr const char* GpsLatitude = "GPSLatitude";
inline constexpr const char* GpsLongitude = "GPSLongitude";
inline constexpr const char* GpsSatellites = "GPSSatellites";
inline constexpr const char* City = "City";
inline constexpr const char* Country = "Country";
inline constexpr const char* State = "State";
inline constexpr const char* Location = "Location";

inline constexpr const char* DateTimeOriginal = "DateTimeOriginal";
inline constexpr const char* DateTimeDigitized = "DateTimeDigitized";
inline constexpr const char* GpsTimeStamp = "GPSTimeStamp";
inline constexpr const char* GpsDateStamp = "GPSDateStamp";
inline constexpr const char* TimeZoneOffset = "TimeZoneOffset";

inline constexpr const char* Title = "Title";
inline constexpr const char* Caption = "Caption";
inline constexpr const char* ContentDescription = "ContentDescription";
inline constexpr const char* Headline = "Headline";
inline constexpr const char* ImageDescription = "ImageDescription";
inline constexpr const char* Instructions = "Instructions";
inline constexpr const char* WeatherProfile = "WeatherProfile";
inline constexpr const char* Keywords = "Keywords";
inline constexpr const char* SemanticNames = "SemanticNames";

inline constexpr const char* ImageWidth = "ImageWidth";
inline constexpr const char* ImageHeight = "ImageHeight";
inline constexpr const char* WhiteBalance = "WhiteBalance";
inline constexpr const char* SubjectDistance = "SubjectDistance";
inline constexpr const char* CameraElevationAngle = "CameraElevationAngle";
inline constexpr const char* ShutterSpeed = "ShutterSpeed";
inline constexpr const char* ExposureTime = "ExposureTime";
inline constexpr const char* Coverage = "Coverage";
}  // namespace tags

// All canonical tag names, in the order used for CSV headers.
const std::vector<std::string>& canonical_tag_names();

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct SpatialAttributes {
    std::optional<double> gps_latitude;   // decimal degrees, [-90, 90]
    std::optional<double> gps_longitude;  // decimal degrees, [-180, 180]
    std::optional<std::string> gps_satellite;
    std::optional<std::string> city;
    std::optional<std::string> country;
    std::optional<std::string> state;
    std::optional<std::string> location;

    bool has_gps() const { return gps_latitude && gps_longitude; }
};

struct TimePoint {
    int year = 1970;
    int month = 1;   // 1-12
    int day = 1;     // 1-31, calendar-valid
    int hour = 0;    // 0-23
    int minute = 0;  // 0-59
    int second = 0;  // 0-59
    std::optional<int> utc_offset_minutes;

    // Component order pinned for the Manhattan metric.
    std::array<int, 6> components() const { return {year, month, day, hour, minute, second}; }

    bool operator==(const TimePoint&) const = default;
    auto operator<=>(const TimePoint& o) const { return components() <=> o.components(); }
};

bool calendar_valid(const TimePoint& t);

// Seconds since 1970-01-01 00:00:00 (proleptic Gregorian), ignoring offset.
std::int64_t to_epoch_seconds(const TimePoint& t);
TimePoint from_epoch_seconds(std::int64_t s);

// Calendar arithmetic used by UTC normalization and the mutation harness.
TimePoint add_seconds(const TimePoint& t, std::int64_t secs);
TimePoint add_months(const TimePoint& t, int months);  // day clamped to month length

// Shift to UTC when an offset is known; otherwise returned unchanged.
TimePoint normalize_to_utc(const TimePoint& t);

struct TemporalAttributes {
    std::optional<TimePoint> datetime_original;
    std::optional<TimePoint> date_digitized;
    std::optional<TimePoint> gps_timestamp;
    std::optional<TimePoint> gps_datestamp;
    std::optional<int> timezone_offset;  // signed minutes

    // Attribute that feeds the quantitative temporal delta: datetime_original,
    // falling back to date_digitized, gps_timestamp, gps_datestamp.
    std::optional<TimePoint> primary() const;
};

struct ContextualAttributes {
    std::optional<std::string> title;
    std::optional<std::string> caption;
    std::optional<std::string> content_description;
    std::optional<std::string> headline;
    std::optional<std::string> image_description;
    std::optional<std::string> instructions;
    std::optional<std::string> weather_profile;
    std::vector<std::string> keywords;
    std::vector<std::string> semantic_names;

    // Canonical token multiset over every text field plus both token lists.
    std::vector<std::string> all_tokens() const;
};

enum class WhiteBalance { Auto, Manual, Unknown };

struct IntrinsicAttributes {
    std::optional<std::pair<int, int>> resolution;  // (width px, height px)
    WhiteBalance white_balance = WhiteBalance::Unknown;
    std::optional<double> subject_distance;        // meters, >= 0
    std::optional<double> camera_elevation_angle;  // degrees
    std::optional<double> shutter_speed;           // reciprocal rate 1/s, > 0
    std::optional<double> exposure_time;           // seconds, > 0
    std::optional<std::string> coverage;
};

struct ImageServiceRecord {
    std::string id;
    SpatialAttributes spatial;
    TemporalAttributes temporal;
    ContextualAttributes contextual;
    IntrinsicAttributes intrinsic;
    // Every input tag under its canonical spelling, lexicographically ordered.
    std::map<std::string, std::string> raw_tags;
};

struct ServicePair {
    ImageServiceRecord original;
    ImageServiceRecord candidate;
};

// ---------------------------------------------------------------------------
// Validation: invariant breaches are data, not errors.
// ---------------------------------------------------------------------------

struct Violation {
    std::string field;
    std::string rule;
    std::string message;
};

std::vector<Violation> validate(const ImageServiceRecord& record);

struct Finding {
    std::string rule;
    double shutter_speed = 0;
    double exposure_time = 0;
    double relative_deviation = 0;
};

// Flags exposure_time deviating from 1/shutter_speed by more than rel_tol
// when both are present.
std::vector<Finding> intrinsic_consistency_lint(const ImageServiceRecord& record,
                                                double rel_tol = 0.10);

}  // namespace metatrust
