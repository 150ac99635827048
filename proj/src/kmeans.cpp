#include "metatrust/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace metatrust {

namespace {

double sq_dist(const Point3& a, const Point3& b) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double next_unit(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::vector<Point3> plus_plus_init(const std::vector<Point3>& pts, size_t k,
                                   std::uint64_t seed) {
    std::uint64_t state = seed;
    std::vector<Point3> centroids;
    centroids.reserve(k);
    centroids.push_back(pts[splitmix64(state) % pts.size()]);

    std::vector<double> d2(pts.size());
    while (centroids.size() < k) {
        double total = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(pts[i], c));
            d2[i] = best;
            total += best;
        }
        size_t chosen = 0;
        if (total > 0) {
            double target = next_unit(state) * total;
            double acc = 0;
            for (size_t i = 0; i < pts.size(); ++i) {
                acc += d2[i];
                if (acc >= target && d2[i] > 0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = splitmix64(state) % pts.size();
        }
        centroids.push_back(pts[chosen]);
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans(const std::vector<Point3>& points, size_t k, std::uint64_t seed) {
    if (k < 1) throw MalformedInput("kmeans requires k >= 1");
    std::set<Point3> distinct(points.begin(), points.end());
    if (k > distinct.size())
        throw KTooLarge("k = " + std::to_string(k) + " exceeds " +
                        std::to_string(distinct.size()) + " distinct points");

    KMeansResult result;
    result.centroids = plus_plus_init(points, k, seed);
    result.assignment.assign(points.size(), 0);

    for (int iter = 0; iter < 300; ++iter) {
        result.iterations = iter + 1;
        // Assignment step; ties go to the lowest centroid index.
        for (size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            size_t arg = 0;
            for (size_t c = 0; c < k; ++c) {
                double d = sq_dist(points[i], result.centroids[c]);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            result.assignment[i] = arg;
        }

        // Update step.
        std::vector<Point3> sums(k, {0, 0, 0});
        std::vector<size_t> counts(k, 0);
        for (size_t i = 0; i < points.size(); ++i) {
            for (int d = 0; d < 3; ++d) sums[result.assignment[i]][d] += points[i][d];
            counts[result.assignment[i]] += 1;
        }

        // Re-seat empty clusters on the point farthest from its centroid.
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            double worst = -1;
            size_t arg = 0;
            for (size_t i = 0; i < points.size(); ++i) {
                if (counts[result.assignment[i]] <= 1) continue;
                double d = sq_dist(points[i], result.centroids[result.assignment[i]]);
                if (d > worst) {
                    worst = d;
                    arg = i;
                }
            }
            size_t old = result.assignment[arg];
            counts[old] -= 1;
            for (int d = 0; d < 3; ++d) sums[old][d] -= points[arg][d];
            result.assignment[arg] = c;
            counts[c] = 1;
            for (int d = 0; d < 3; ++d) sums[c][d] = points[arg][d];
        }

        double shift = 0;
        for (size_t c = 0; c < k; ++c) {
            Point3 next = result.centroids[c];
            if (counts[c] > 0)
                for (int d = 0; d < 3; ++d)
                    next[d] = sums[c][d] / static_cast<double>(counts[c]);
            shift = std::max(shift, std::sqrt(sq_dist(next, result.centroids[c])));
            result.centroids[c] = next;
        }
        if (shift < 1e-9) break;
    }

    // Final assignment against the settled centroids, together with the WCSS.
    result.wcss = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        size_t arg = 0;
        for (size_t c = 0; c < k; ++c) {
            double d = sq_dist(points[i], result.centroids[c]);
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        result.assignment[i] = arg;
        result.wcss += best;
    }
    return result;
}

}  // namespace metatrust
