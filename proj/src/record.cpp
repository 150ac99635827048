#include "metatrust/record.hpp"

#include <cmath>

namespace metatrust {

const std::vector<std::string>& canonical_tag_names() {
    static const std::vector<std::string> names = {
        tags::GpsLatitude,     tags::GpsLongitude,    tags::GpsSatellites,
        tags::City,            tags::Country,         tags::State,
        tags::Location,        tags::DateTimeOriginal, tags::DateTimeDigitized,
        tags::GpsTimeStamp,    tags::GpsDateStamp,    tags::TimeZoneOffset,
        tags::Title,           tags::Caption,         tags::ContentDescription,
        tags::Headline,        tags::ImageDescription, tags::Instructions,
        tags::WeatherProfile,  tags::Keywords,        tags::SemanticNames,
        tags::ImageWidth,      tags::ImageHeight,     tags::WhiteBalance,
        tags::SubjectDistance, tags::CameraElevationAngle, tags::ShutterSpeed,
        tags::ExposureTime,    tags::Coverage,
    };
    return names;
}

// ---------------------------------------------------------------------------
// Calendar arithmetic (proleptic Gregorian, Hinnant's civil-days algorithm)
// ---------------------------------------------------------------------------

static bool leap_year(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

static int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap_year(y)) return 29;
    return d[m - 1];
}

bool calendar_valid(const TimePoint& t) {
    if (t.month < 1 || t.month > 12) return false;
    if (t.day < 1 || t.day > days_in_month(t.year, t.month)) return false;
    if (t.hour < 0 || t.hour > 23) return false;
    if (t.minute < 0 || t.minute > 59) return false;
    if (t.second < 0 || t.second > 59) return false;
    return true;
}

static std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

std::int64_t to_epoch_seconds(const TimePoint& t) {
    return days_from_civil(t.year, t.month, t.day) * 86400 + t.hour * 3600 +
           t.minute * 60 + t.second;
}

TimePoint from_epoch_seconds(std::int64_t s) {
    std::int64_t days = s / 86400;
    std::int64_t rem = s % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    TimePoint t;
    civil_from_days(days, t.year, t.month, t.day);
    t.hour = static_cast<int>(rem / 3600);
    t.minute = static_cast<int>((rem % 3600) / 60);
    t.second = static_cast<int>(rem % 60);
    return t;
}

TimePoint add_seconds(const TimePoint& t, std::int64_t secs) {
    TimePoint out = from_epoch_seconds(to_epoch_seconds(t) + secs);
    out.utc_offset_minutes = t.utc_offset_minutes;
    return out;
}

TimePoint add_months(const TimePoint& t, int months) {
    int total = (t.year * 12 + (t.month - 1)) + months;
    TimePoint out = t;
    out.year = total / 12;
    out.month = total % 12 + 1;
    if (out.month < 1) {  // negative month underflow
        out.month += 12;
        out.year -= 1;
    }
    out.day = std::min(t.day, days_in_month(out.year, out.month));
    return out;
}

TimePoint normalize_to_utc(const TimePoint& t) {
    if (!t.utc_offset_minutes || *t.utc_offset_minutes == 0) return t;
    TimePoint shifted = add_seconds(t, -std::int64_t(*t.utc_offset_minutes) * 60);
    shifted.utc_offset_minutes = 0;
    return shifted;
}

std::optional<TimePoint> TemporalAttributes::primary() const {
    if (datetime_original) return datetime_original;
    if (date_digitized) return date_digitized;
    if (gps_timestamp) return gps_timestamp;
    if (gps_datestamp) return gps_datestamp;
    return std::nullopt;
}

std::vector<std::string> ContextualAttributes::all_tokens() const {
    std::vector<std::string> out;
    auto absorb = [&out](const std::optional<std::string>& s) {
        if (!s) return;
        for (auto& tok : tokenize(*s)) out.push_back(std::move(tok));
    };
    absorb(title);
    absorb(caption);
    absorb(content_description);
    absorb(headline);
    absorb(image_description);
    absorb(instructions);
    absorb(weather_profile);
    for (const auto& k : keywords)
        for (auto& tok : tokenize(k)) out.push_back(std::move(tok));
    for (const auto& s : semantic_names)
        for (auto& tok : tokenize(s)) out.push_back(std::move(tok));
    return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

std::vector<Violation> validate(const ImageServiceRecord& r) {
    std::vector<Violation> v;
    auto flag = [&v](std::string field, std::string rule, std::string msg) {
        v.push_back({std::move(field), std::move(rule), std::move(msg)});
    };

    if (r.id.empty()) flag("id", "EmptyId", "record id must be non-empty");

    const auto& sp = r.spatial;
    if (sp.gps_latitude.has_value() != sp.gps_longitude.has_value())
        flag("spatial.gps", "PairedGpsMissing",
             "latitude and longitude must be present together");
    if (sp.gps_latitude && (*sp.gps_latitude < -90.0 || *sp.gps_latitude > 90.0))
        flag("spatial.gps_latitude", "GpsLatitudeRange", "latitude outside [-90, 90]");
    if (sp.gps_longitude && (*sp.gps_longitude < -180.0 || *sp.gps_longitude > 180.0))
        flag("spatial.gps_longitude", "GpsLongitudeRange", "longitude outside [-180, 180]");

    const auto& tp = r.temporal;
    auto check_time = [&flag](const std::optional<TimePoint>& t, const char* field) {
        if (t && !calendar_valid(*t))
            flag(field, "InvalidCalendarDate", "not a calendar-valid timestamp");
    };
    check_time(tp.datetime_original, "temporal.datetime_original");
    check_time(tp.date_digitized, "temporal.date_digitized");
    check_time(tp.gps_timestamp, "temporal.gps_timestamp");
    check_time(tp.gps_datestamp, "temporal.gps_datestamp");
    if (tp.datetime_original && tp.date_digitized &&
        *tp.date_digitized < *tp.datetime_original)
        flag("temporal.date_digitized", "DigitizedBeforeOriginal",
             "digitization precedes capture");

    for (const auto& k : r.contextual.keywords)
        if (trim(k).empty())
            flag("contextual.keywords", "EmptyKeyword", "keyword blank after trimming");

    const auto& in = r.intrinsic;
    if (in.resolution && (in.resolution->first <= 0 || in.resolution->second <= 0))
        flag("intrinsic.resolution", "ResolutionRange", "dimensions must be positive");
    if (in.subject_distance && *in.subject_distance < 0)
        flag("intrinsic.subject_distance", "SubjectDistanceRange", "must be >= 0");
    if (in.shutter_speed && *in.shutter_speed <= 0)
        flag("intrinsic.shutter_speed", "ShutterSpeedRange", "must be > 0");
    if (in.exposure_time && *in.exposure_time <= 0)
        flag("intrinsic.exposure_time", "ExposureTimeRange", "must be > 0");

    return v;
}

std::vector<Finding> intrinsic_consistency_lint(const ImageServiceRecord& r,
                                                double rel_tol) {
    std::vector<Finding> out;
    const auto& in = r.intrinsic;
    if (!in.shutter_speed || !in.exposure_time) return out;
    if (*in.shutter_speed <= 0) return out;
    double expected = 1.0 / *in.shutter_speed;
    double deviation = std::abs(*in.exposure_time - expected) / expected;
    if (deviation > rel_tol)
        out.push_back({"ShutterExposureMismatch", *in.shutter_speed, *in.exposure_time,
                       deviation});
    return out;
}

}  // namespace metatrust
