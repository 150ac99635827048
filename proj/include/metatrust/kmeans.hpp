#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "metatrust/common.hpp"

namespace metatrust {

using Point3 = std::array<double, 3>;

struct KMeansResult {
    std::vector<Point3> centroids;     // k entries
    std::vector<size_t> assignment;    // per input point, centroid index
    double wcss = 0;                   // within-cluster sum of squares
    int iterations = 0;
};

// Seeded k-means++ initialization followed by Lloyd iterations until the
// largest centroid shift drops below 1e-9 or 300 iterations pass. Fully
// deterministic for a given seed. Throws KTooLarge when k exceeds the number
// of distinct points.
KMeansResult kmeans(const std::vector<Point3>& points, size_t k, std::uint64_t seed);

}  // namespace metatrust
