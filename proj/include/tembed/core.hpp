#pragma once

// Small numeric helpers shared across the library: complex projections,
// polygon geometry, deterministic accumulation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tembed {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Unit complex number of the argument of z; throws on z == 0.
inline cplx unit(cplx z) {
    double a = std::abs(z);
    if (a == 0.0) throw std::invalid_argument("unit(): zero vector");
    return z / a;
}

/// Projection of z onto the real line spanned by the unit direction beta:
/// Pr(z, beta*R) = beta * Re(conj(beta) * z).
inline cplx project_line(cplx z, cplx beta) {
    return beta * std::real(std::conj(beta) * z);
}

/// Real coefficient t such that Pr(z, beta*R) = t * beta.
inline double project_coeff(cplx z, cplx beta) {
    return std::real(std::conj(beta) * z);
}

/// Interior angle at vertex v of a ccw polygon corner (prev -> v -> next),
/// measured from the outgoing side (v->next) to the incoming one, in [0, 2*pi).
inline double corner_angle(cplx prev, cplx v, cplx next) {
    cplx a = prev - v, b = next - v;
    double t = std::arg(std::conj(b) * a);
    if (t < 0) t += 2.0 * kPi;
    return t;
}

/// Signed area of a polygon (positive when counterclockwise).
inline double polygon_signed_area(const std::vector<cplx>& p) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const cplx& a = p[i];
        const cplx& b = p[(i + 1) % p.size()];
        s += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * s;
}

/// Strict convexity + positive orientation test with tolerance on cross
/// products relative to the squared scale of the polygon.
inline bool polygon_convex_ccw(const std::vector<cplx>& p, double rel_tol = 1e-12) {
    const size_t n = p.size();
    if (n < 3) return false;
    double scale2 = 0.0;
    for (size_t i = 0; i < n; ++i) scale2 = std::max(scale2, std::norm(p[(i + 1) % n] - p[i]));
    if (scale2 == 0.0) return false;
    for (size_t i = 0; i < n; ++i) {
        cplx u = p[(i + 1) % n] - p[i];
        cplx v = p[(i + 2) % n] - p[(i + 1) % n];
        double cross = u.real() * v.imag() - u.imag() * v.real();
        if (cross < -rel_tol * scale2) return false;
    }
    return polygon_signed_area(p) > 0.0;
}

inline double polygon_diameter(const std::vector<cplx>& p) {
    double d = 0.0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j) d = std::max(d, std::abs(p[i] - p[j]));
    return d;
}

/// Radius of the largest disc contained in a convex ccw polygon
/// (Chebyshev radius). Solved by scanning triples of edge constraints.
inline double polygon_inradius(const std::vector<cplx>& p) {
    const size_t n = p.size();
    if (n < 3) return 0.0;
    if (n == 3) {
        double a = std::abs(p[1] - p[0]), b = std::abs(p[2] - p[1]), c = std::abs(p[0] - p[2]);
        double s = 0.5 * (a + b + c);
        if (s == 0.0) return 0.0;
        double area = std::abs(polygon_signed_area(p));
        return area / s;
    }
    // Edge i as constraint n_i . x <= d_i with inward distance d_i - n_i . x.
    std::vector<cplx> nrm(n);
    std::vector<double> off(n);
    for (size_t i = 0; i < n; ++i) {
        cplx e = p[(i + 1) % n] - p[i];
        double len = std::abs(e);
        if (len == 0.0) return 0.0;
        cplx in = cplx(-e.imag(), e.real()) / len;  // inward normal of a ccw polygon
        nrm[i] = in;
        off[i] = in.real() * p[i].real() + in.imag() * p[i].imag();
    }
    auto clearance = [&](cplx x) {
        double r = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i)
            r = std::min(r, nrm[i].real() * x.real() + nrm[i].imag() * x.imag() - off[i]);
        return r;
    };
    double best = 0.0;
    // The Chebyshev center is determined by two or three active constraints.
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k) {
                // solve n_i.x - r = off_i for the three edges
                double A[3][4] = {
                    {nrm[i].real(), nrm[i].imag(), -1.0, off[i]},
                    {nrm[j].real(), nrm[j].imag(), -1.0, off[j]},
                    {nrm[k].real(), nrm[k].imag(), -1.0, off[k]},
                };
                // Gaussian elimination, 3x3
                double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                             A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                             A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
                if (std::abs(det) < 1e-300) continue;
                auto solve3 = [&](int col) {
                    double M[3][3];
                    for (int r = 0; r < 3; ++r)
                        for (int c = 0; c < 3; ++c) M[r][c] = (c == col) ? A[r][3] : A[r][c];
                    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
                };
                cplx x(solve3(0) / det, solve3(1) / det);
                double r = solve3(2) / det;
                if (r <= best) continue;
                if (clearance(x) >= r - 1e-12 * (1.0 + std::abs(r))) best = r;
            }
    return std::max(best, 0.0);
}

/// Kahan-compensated accumulator; used where sums must be reproducible
/// and well-conditioned independently of magnitudes.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

struct KahanSumC {
    KahanSum re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

}  // namespace tembed
