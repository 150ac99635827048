#include "metatrust/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metatrust/common.hpp"

namespace metatrust {

namespace {

// Orthogonalizes the columns of w (m x n, m >= n) by plane rotations,
// accumulating them into v. On return column i of w equals u_i * s_i.
void hestenes_sweeps(Matrix& w, Matrix& v) {
    const size_t m = w.rows();
    const size_t n = w.cols();
    const double eps = 1e-15;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (size_t p = 0; p + 1 < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double alpha = 0, beta = 0, gamma = 0;
                for (size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p);
                    const double wq = w(i, q);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p);
                    const double wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
                rotated = true;
            }
        }
        if (!rotated) break;
    }
}

// Fills U columns whose singular value vanished with unit vectors made
// orthonormal against everything already present (deterministic order).
void complete_basis(Matrix& u, const std::vector<bool>& defined) {
    const size_t m = u.rows();
    const size_t k = u.cols();
    for (size_t col = 0; col < k; ++col) {
        if (defined[col]) continue;
        for (size_t cand = 0; cand < m; ++cand) {
            std::vector<double> e(m, 0.0);
            e[cand] = 1.0;
            for (size_t j = 0; j < k; ++j) {
                if (j == col || (!defined[j] && j > col)) continue;
                double dot = 0;
                for (size_t i = 0; i < m; ++i) dot += e[i] * u(i, j);
                for (size_t i = 0; i < m; ++i) e[i] -= dot * u(i, j);
            }
            double norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
            if (norm > 1e-8) {
                for (size_t i = 0; i < m; ++i) u(i, col) = e[i] / norm;
                break;
            }
        }
    }
}

SvdResult tall_svd(const Matrix& a) {
    const size_t m = a.rows();
    const size_t n = a.cols();  // m >= n here

    Matrix w = a;
    Matrix v(n, n);
    for (size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    hestenes_sweeps(w, v);

    std::vector<double> s(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        double norm2 = 0;
        for (size_t i = 0; i < m; ++i) norm2 += w(i, j) * w(i, j);
        s[j] = std::sqrt(norm2);
    }

    // Stable order by descending singular value.
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&s](size_t i, size_t j) { return s[i] > s[j]; });

    SvdResult out;
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    out.s.resize(n);
    std::vector<bool> defined(n, false);
    for (size_t j = 0; j < n; ++j) {
        const size_t src = order[j];
        out.s[j] = s[src];
        for (size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (s[src] > 0.0) {
            for (size_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / s[src];
            defined[j] = true;
        }
    }
    complete_basis(out.u, defined);
    return out;
}

void apply_sign_convention(SvdResult& r) {
    const size_t n = r.v.rows();
    const size_t m = r.u.rows();
    for (size_t j = 0; j < r.v.cols(); ++j) {
        size_t arg = 0;
        double best = 0;
        for (size_t i = 0; i < n; ++i) {
            double mag = std::abs(r.v(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (r.v(arg, j) < 0) {
            for (size_t i = 0; i < n; ++i) r.v(i, j) = -r.v(i, j);
            for (size_t i = 0; i < m; ++i) r.u(i, j) = -r.u(i, j);
        }
    }
}

}  // namespace

SvdResult svd_decompose(const Matrix& a) {
    bool nonzero = false;
    for (double x : a.data())
        if (x != 0.0) {
            nonzero = true;
            break;
        }
    if (!nonzero) throw ZeroMatrix("SVD input has no nonzero entry");

    SvdResult r;
    if (a.rows() >= a.cols()) {
        r = tall_svd(a);
    } else {
        SvdResult t = tall_svd(a.transposed());
        r.u = std::move(t.v);
        r.v = std::move(t.u);
        r.s = std::move(t.s);
    }
    apply_sign_convention(r);
    return r;
}

}  // namespace metatrust
