#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metatrust/common.hpp"

namespace metatrust {

// Five-step ordinal intention spectrum.
enum class IntentionLevel : int {
    WellIntention = 0,
    BorderLine = 1,
    ModeratelyIll = 2,
    VeryIll = 3,
    ExtremelyIll = 4,
};

inline constexpr int kIntentionLevels = 5;

const char* intention_label(IntentionLevel level);
IntentionLevel intention_from_label(const std::string& label);
IntentionLevel intention_from_ordinal(int ordinal);

inline int ordinal(IntentionLevel l) { return static_cast<int>(l); }

// Ordinals >= moderately-ill count as ill in precision metrics.
inline bool is_ill(IntentionLevel l) { return ordinal(l) >= 2; }

// One modification in normalized delta space.
struct ModificationPoint {
    double dz_hat = 0;  // [0, 1]
    double dt_hat = 0;
    double dc_hat = 0;
    std::string record_id;
    // Reserved extra feature (% obfuscation); unused unless a model opts in.
    std::optional<double> obfuscation;
};

// Plane a*x + b*y + c*z + d = 0 in (dz_hat, dt_hat, dc_hat) space, stored
// normalized: a^2 + b^2 + c^2 = 1 and the first nonzero of (a, b, c) positive.
struct IntentionPlane {
    double a = 0, b = 0, c = 0, d = 0;
    IntentionLevel level = IntentionLevel::WellIntention;
    double residual_rms = 0;  // orthogonal RMS of the fitting points

    IntentionPlane normalized() const;
};

// Orthogonal least-squares fit per level: plane through the centroid whose
// normal is the least-variance direction of the centered points. Requires
// >= 3 non-collinear points per level; throws CollinearClass otherwise.
// Output ordered by level ordinal.
std::vector<IntentionPlane> fit_planes(
    const std::vector<std::pair<ModificationPoint, IntentionLevel>>& labeled);

// |a x + b y + c z + d| / sqrt(a^2 + b^2 + c^2); coefficients need not be
// normalized.
double point_plane_distance(const ModificationPoint& p, const IntentionPlane& plane);

// Integral of the plane height dc(dz, dt) = -(a dz + b dt + d) / c over the
// unit square, i.e. -(a/2 + b/2 + d) / c. Throws VerticalPlane when c = 0.
double plane_area(const IntentionPlane& plane);

// Component-wise scaling by weight/5 (weight 5 leaves the channel untouched).
ModificationPoint apply_weights(const ModificationPoint& point, const std::array<int, 3>& weights);

}  // namespace metatrust
