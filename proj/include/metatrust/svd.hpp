#pragma once

#include <vector>

#include "metatrust/matrix.hpp"

namespace metatrust {

// Full thin SVD: A = U * diag(S) * V^T with U (m x k), S (k), V (n x k),
// k = min(m, n). Singular values are non-negative and sorted non-increasing;
// U and V have orthonormal columns (zero singular directions are completed
// with an orthonormal basis). Sign convention: the largest-magnitude entry of
// each V column is positive so repeated fits are bit-identical.
struct SvdResult {
    Matrix u;
    std::vector<double> s;
    Matrix v;
};

// One-sided Jacobi (Hestenes) SVD. Deterministic, no dependence on the
// platform BLAS. Throws ZeroMatrix when A has no nonzero entry.
SvdResult svd_decompose(const Matrix& a);

}  // namespace metatrust
