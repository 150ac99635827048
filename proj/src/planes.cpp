#include "metatrust/planes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace metatrust {

const char* intention_label(IntentionLevel level) {
    switch (level) {
        case IntentionLevel::WellIntention: return "well-intention";
        case IntentionLevel::BorderLine: return "border-line";
        case IntentionLevel::ModeratelyIll: return "moderately-ill";
        case IntentionLevel::VeryIll: return "very-ill";
        case IntentionLevel::ExtremelyIll: return "extremely-ill";
    }
    return "well-intention";
}

IntentionLevel intention_from_label(const std::string& label) {
    for (int i = 0; i < kIntentionLevels; ++i)
        if (label == intention_label(static_cast<IntentionLevel>(i)))
            return static_cast<IntentionLevel>(i);
    throw MalformedInput("unknown intention label '" + label + "'");
}

IntentionLevel intention_from_ordinal(int o) {
    if (o < 0 || o >= kIntentionLevels)
        throw MalformedInput("intention ordinal out of range: " + std::to_string(o));
    return static_cast<IntentionLevel>(o);
}

IntentionPlane IntentionPlane::normalized() const {
    IntentionPlane out = *this;
    double norm = std::sqrt(a * a + b * b + c * c);
    if (norm == 0.0) throw VerticalPlane("plane normal is the zero vector");
    out.a = a / norm;
    out.b = b / norm;
    out.c = c / norm;
    out.d = d / norm;
    double first = out.a != 0.0 ? out.a : (out.b != 0.0 ? out.b : out.c);
    if (first < 0) {
        out.a = -out.a;
        out.b = -out.b;
        out.c = -out.c;
        out.d = -out.d;
    }
    return out;
}

// ---------------------------------------------------------------------------
// 3x3 symmetric eigendecomposition by cyclic Jacobi rotations.
// ---------------------------------------------------------------------------

namespace {

struct Eigen3 {
    std::array<double, 3> values;                 // ascending
    std::array<std::array<double, 3>, 3> vectors; // vectors[i] pairs values[i]
};

Eigen3 symmetric_eigen3(std::array<std::array<double, 3>, 3> a) {
    std::array<std::array<double, 3>, 3> v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off == 0.0) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                std::array<std::array<double, 3>, 3> r = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
                r[p][p] = c; r[q][q] = c; r[p][q] = s; r[q][p] = -s;
                // a = r^T a r
                std::array<std::array<double, 3>, 3> tmp{};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double acc = 0;
                        for (int k = 0; k < 3; ++k) acc += r[k][i] * a[k][j];
                        tmp[i][j] = acc;
                    }
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double acc = 0;
                        for (int k = 0; k < 3; ++k) acc += tmp[i][k] * r[k][j];
                        a[i][j] = acc;
                    }
                // v = v r
                for (int i = 0; i < 3; ++i) {
                    double vp = v[i][p], vq = v[i][q];
                    v[i][p] = c * vp - s * vq;
                    v[i][q] = s * vp + c * vq;
                }
            }
        }
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&a](int i, int j) { return a[i][i] < a[j][j]; });
    Eigen3 out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = a[order[i]][order[i]];
        for (int j = 0; j < 3; ++j) out.vectors[i][j] = v[j][order[i]];
    }
    return out;
}

}  // namespace

std::vector<IntentionPlane> fit_planes(
    const std::vector<std::pair<ModificationPoint, IntentionLevel>>& labeled) {
    std::map<IntentionLevel, std::vector<const ModificationPoint*>> by_level;
    for (const auto& [p, l] : labeled) by_level[l].push_back(&p);

    std::vector<IntentionPlane> planes;
    for (const auto& [level, pts] : by_level) {
        if (pts.size() < 3)
            throw CollinearClass(std::string("level ") + intention_label(level) +
                                 " has fewer than 3 points");
        double cx = 0, cy = 0, cz = 0;
        for (const auto* p : pts) {
            cx += p->dz_hat;
            cy += p->dt_hat;
            cz += p->dc_hat;
        }
        const double n = static_cast<double>(pts.size());
        cx /= n; cy /= n; cz /= n;

        std::array<std::array<double, 3>, 3> scatter{};
        for (const auto* p : pts) {
            const double x = p->dz_hat - cx;
            const double y = p->dt_hat - cy;
            const double z = p->dc_hat - cz;
            scatter[0][0] += x * x; scatter[0][1] += x * y; scatter[0][2] += x * z;
            scatter[1][1] += y * y; scatter[1][2] += y * z;
            scatter[2][2] += z * z;
        }
        scatter[1][0] = scatter[0][1];
        scatter[2][0] = scatter[0][2];
        scatter[2][1] = scatter[1][2];

        Eigen3 eig = symmetric_eigen3(scatter);
        // Collinear (or coincident) points: no unique plane because the two
        // smallest scatter directions are both degenerate.
        const double scale = std::max(eig.values[2], 0.0);
        if (eig.values[1] <= 1e-12 * std::max(scale, 1e-30))
            throw CollinearClass(std::string("level ") + intention_label(level) +
                                 " points are collinear; plane underdetermined");

        IntentionPlane plane;
        plane.a = eig.vectors[0][0];
        plane.b = eig.vectors[0][1];
        plane.c = eig.vectors[0][2];
        plane.d = -(plane.a * cx + plane.b * cy + plane.c * cz);
        plane.level = level;
        plane.residual_rms = std::sqrt(std::max(eig.values[0], 0.0) / n);
        planes.push_back(plane.normalized());
    }
    return planes;
}

double point_plane_distance(const ModificationPoint& p, const IntentionPlane& plane) {
    double norm = std::sqrt(plane.a * plane.a + plane.b * plane.b + plane.c * plane.c);
    if (norm == 0.0) throw VerticalPlane("plane normal is the zero vector");
    return std::abs(plane.a * p.dz_hat + plane.b * p.dt_hat + plane.c * p.dc_hat + plane.d) /
           norm;
}

double plane_area(const IntentionPlane& plane) {
    if (plane.c == 0.0)
        throw VerticalPlane("plane cannot be solved for the contextual coordinate");
    return -(plane.a / 2.0 + plane.b / 2.0 + plane.d) / plane.c;
}

ModificationPoint apply_weights(const ModificationPoint& point,
                                const std::array<int, 3>& weights) {
    for (int w : weights)
        if (w < 1 || w > 5)
            throw MalformedInput("channel weight must be in 1..5, got " + std::to_string(w));
    ModificationPoint out = point;
    out.dz_hat *= weights[0] / 5.0;
    out.dt_hat *= weights[1] / 5.0;
    out.dc_hat *= weights[2] / 5.0;
    return out;
}

}  // namespace metatrust
