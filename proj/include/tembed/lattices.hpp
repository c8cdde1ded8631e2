#pragma once

// Constructors for the bundled lattice families: checkerboard, honeycomb and
// skewed triangulations, isoradial rhombic lattices, orthodiagonal grids and
// their medial t-embeddings, and the incircle (s-embedding style) view.

#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "tembed/core.hpp"
#include "tembed/embedding.hpp"
#include "tembed/rng.hpp"

namespace tembed {

// ---------------------------------------------------------------------------
// Checkerboard: n x m unit squares of side delta; dual vertices are the grid
// corners with the four outermost corners removed by the augmentation.

inline TEmbedding make_checkerboard(int n, int m, double delta = 1.0) {
    if (n < 2 || m < 2) throw std::invalid_argument("checkerboard needs n, m >= 2");
    std::vector<cplx> pos;
    std::map<std::pair<int, int>, int> vid;
    auto corner = [&](int i, int j) {
        bool outer = (i == 0 || i == n) && (j == 0 || j == m);
        if (outer) return -1;
        auto it = vid.find({i, j});
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(pos.size());
        vid[{i, j}] = id;
        pos.push_back(delta * cplx(i, j));
        return id;
    };
    std::vector<std::vector<int>> cells;
    std::vector<uint8_t> colors;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            std::vector<int> cyc;
            for (auto [a, b] : {std::pair{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}) {
                int v = corner(a, b);
                if (v >= 0) cyc.push_back(v);
            }
            cells.push_back(cyc);
            colors.push_back(static_cast<uint8_t>((i + j) % 2));  // (even,even) black
        }
    return embedding_from_cells(std::move(pos), cells, colors);
}

/// Cell index of the square (i, j) in make_checkerboard(n, m).
inline int checkerboard_cell(int n, int i, int j) { return j * n + i; }

// ---------------------------------------------------------------------------
// Triangular-lattice t-embeddings (dimer model on the honeycomb graph).
// An optional complex-linear skew z -> A z + B conj(z) keeps validity: the
// black angles at every vertex are the three angles of one triangle shape.

inline TEmbedding make_triangular(int n, int m, double delta = 1.0, cplx skew_a = 1.0,
                                  cplx skew_b = 0.0) {
    if (n < 2 || m < 2) throw std::invalid_argument("triangular patch needs n, m >= 2");
    if (std::abs(skew_b) >= std::abs(skew_a))
        throw std::invalid_argument("skew must be orientation preserving (|B| < |A|)");
    const cplx omega = std::polar(1.0, kPi / 3.0);
    std::vector<cplx> pos;
    std::map<std::pair<int, int>, int> vid;
    auto vtx = [&](int i, int j) {
        auto it = vid.find({i, j});
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(pos.size());
        vid[{i, j}] = id;
        cplx z = delta * (cplx(i, 0) + omega * cplx(j, 0));
        pos.push_back(skew_a * z + skew_b * std::conj(z));
        return id;
    };
    std::vector<std::vector<int>> cells;
    std::vector<uint8_t> colors;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            cells.push_back({vtx(i, j), vtx(i + 1, j), vtx(i, j + 1)});
            colors.push_back(1);  // up-triangles white
            cells.push_back({vtx(i + 1, j), vtx(i + 1, j + 1), vtx(i, j + 1)});
            colors.push_back(0);  // down-triangles black
        }
    return embedding_from_cells(std::move(pos), cells, colors);
}

inline TEmbedding make_honeycomb(int n, int m, double delta = 1.0) {
    return make_triangular(n, m, delta);
}

/// Cell indices of make_triangular: up (white) then down (black) per (i, j).
inline int triangular_up_cell(int n, int i, int j) { return 2 * (j * n + i); }
inline int triangular_down_cell(int n, int i, int j) { return 2 * (j * n + i) + 1; }

/// Hexagonal region of the triangular lattice with side a (the dimer model
/// on the a x a x a honeycomb domain; parallelogram regions are frozen, this
/// one carries MacMahon-many lozenge tilings).
inline TEmbedding make_honeycomb_hexagon(int a, double delta = 1.0) {
    if (a < 1) throw std::invalid_argument("hexagon side must be positive");
    const cplx omega = std::polar(1.0, kPi / 3.0);
    // hexagon corners in lattice coordinates
    std::vector<std::pair<int, int>> corners = {{a, 0},      {2 * a, 0},  {2 * a, a},
                                                {a, 2 * a},  {0, 2 * a},  {0, a}};
    std::vector<cplx> poly;
    for (auto [i, j] : corners) poly.push_back(delta * (cplx(i, 0) + omega * cplx(j, 0)));
    auto inside = [&](cplx z) {
        for (size_t k = 0; k < poly.size(); ++k) {
            cplx u = poly[(k + 1) % poly.size()] - poly[k];
            cplx v = z - poly[k];
            if (u.real() * v.imag() - u.imag() * v.real() < -1e-9 * delta * delta) return false;
        }
        return true;
    };
    std::vector<cplx> pos;
    std::map<std::pair<int, int>, int> vid;
    auto vtx = [&](int i, int j) {
        auto it = vid.find({i, j});
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(pos.size());
        vid[{i, j}] = id;
        pos.push_back(delta * (cplx(i, 0) + omega * cplx(j, 0)));
        return id;
    };
    std::vector<std::vector<int>> cells;
    std::vector<uint8_t> colors;
    auto centroid = [&](std::initializer_list<std::pair<int, int>> vs) {
        cplx z(0, 0);
        for (auto [i, j] : vs) z += delta * (cplx(i, 0) + omega * cplx(j, 0)) / 3.0;
        return z;
    };
    for (int j = 0; j < 2 * a; ++j)
        for (int i = 0; i < 2 * a; ++i) {
            if (inside(centroid({{i, j}, {i + 1, j}, {i, j + 1}}))) {
                cells.push_back({vtx(i, j), vtx(i + 1, j), vtx(i, j + 1)});
                colors.push_back(1);
            }
            if (inside(centroid({{i + 1, j}, {i + 1, j + 1}, {i, j + 1}}))) {
                cells.push_back({vtx(i + 1, j), vtx(i + 1, j + 1), vtx(i, j + 1)});
                colors.push_back(0);
            }
        }
    return embedding_from_cells(std::move(pos), cells, colors);
}

/// Seeded random skewed triangulation (a valid t-embedding for any
/// orientation-preserving linear image of the triangular lattice).
inline TEmbedding make_random_triangulation(int n, int m, double delta, uint64_t seed) {
    RngStream rng(seed, 7);
    cplx a = std::polar(1.0, 2.0 * kPi * rng.uniform());
    cplx b = std::polar(0.15 + 0.45 * rng.uniform(), 2.0 * kPi * rng.uniform());
    return make_triangular(n, m, delta, a, b);
}

// ---------------------------------------------------------------------------
// Quad complexes: the shared substrate for orthodiagonal and isoradial
// lattices and for s-embeddings. Vertices of Lambda are colored by class
// (0: Gamma, 1: Gamma*); each quad lists its Lambda-vertices ccw, classes
// alternating.

struct QuadComplex {
    std::vector<cplx> lambda_pos;
    std::vector<uint8_t> lambda_class;            // 0 = Gamma, 1 = Gamma*
    std::vector<std::array<int, 4>> quads;        // ccw, classes alternate
    double delta = 1.0;                           // nominal mesh

    int num_lambda() const { return static_cast<int>(lambda_pos.size()); }
    int num_quads() const { return static_cast<int>(quads.size()); }
};

/// Rectangular orthodiagonal grid: Gamma at grid points (x_i, y_j), Gamma* at
/// face centers; a quad for every interior Gamma-edge. The diagonals of each
/// quad are a Gamma-edge and its dual segment, which are orthogonal.
inline QuadComplex make_orthodiagonal_grid(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    if (nx < 3 || ny < 3) throw std::invalid_argument("orthodiagonal grid needs >= 3 tracks");
    QuadComplex q;
    std::map<std::pair<int, int>, int> gid, fid;
    auto gamma = [&](int i, int j) {
        auto it = gid.find({i, j});
        if (it != gid.end()) return it->second;
        int id = q.num_lambda();
        gid[{i, j}] = id;
        q.lambda_pos.push_back(cplx(xs[i], ys[j]));
        q.lambda_class.push_back(0);
        return id;
    };
    auto dualv = [&](int i, int j) {
        auto it = fid.find({i, j});
        if (it != fid.end()) return it->second;
        int id = q.num_lambda();
        fid[{i, j}] = id;
        q.lambda_pos.push_back(cplx(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])));
        q.lambda_class.push_back(1);
        return id;
    };
    // vertical interior Gamma-edges (x_i, y_j)-(x_i, y_{j+1}), 0 < i < nx-1
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j)
            q.quads.push_back({gamma(i, j), dualv(i, j), gamma(i, j + 1), dualv(i - 1, j)});
    // horizontal interior Gamma-edges
    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j)
            q.quads.push_back({gamma(i, j), dualv(i, j - 1), gamma(i + 1, j), dualv(i, j)});
    double d = 0.0;
    for (const auto& quad : q.quads)
        for (int k = 0; k < 4; ++k)
            d = std::max(d, std::abs(q.lambda_pos[quad[k]] - q.lambda_pos[quad[(k + 1) % 4]]));
    q.delta = d;
    // ensure ccw
    for (auto& quad : q.quads) {
        std::vector<cplx> p{q.lambda_pos[quad[0]], q.lambda_pos[quad[1]], q.lambda_pos[quad[2]],
                            q.lambda_pos[quad[3]]};
        if (polygon_signed_area(p) < 0) std::swap(quad[1], quad[3]);
    }
    return q;
}

/// Isoradial rhombic lattice from two train-track direction sequences.
/// Vertices z(i,j) = delta * (sum of u_0..u_{i-1} + sum of w_0..w_{j-1});
/// every face is a rhombus of side delta. Class: (i + j) parity.
inline QuadComplex make_isoradial_rhombic(const std::vector<double>& alpha,
                                          const std::vector<double>& beta, double delta = 1.0) {
    const int p = static_cast<int>(alpha.size()), r = static_cast<int>(beta.size());
    if (p < 2 || r < 2) throw std::invalid_argument("isoradial lattice needs >= 2 tracks each way");
    for (double a : alpha)
        for (double b : beta)
            if (std::sin(b - a) <= 1e-6)
                throw std::invalid_argument("track angles must keep rhombi positively oriented");
    QuadComplex q;
    std::map<std::pair<int, int>, int> vid;
    auto vtx = [&](int i, int j) {
        auto it = vid.find({i, j});
        if (it != vid.end()) return it->second;
        cplx z = 0.0;
        for (int k = 0; k < i; ++k) z += std::polar(delta, alpha[k]);
        for (int l = 0; l < j; ++l) z += std::polar(delta, beta[l]);
        int id = q.num_lambda();
        vid[{i, j}] = id;
        q.lambda_pos.push_back(z);
        q.lambda_class.push_back(static_cast<uint8_t>((i + j) % 2));
        return id;
    };
    for (int i = 0; i + 1 <= p - 1; ++i)
        for (int j = 0; j + 1 <= r - 1; ++j)
            q.quads.push_back({vtx(i, j), vtx(i + 1, j), vtx(i + 1, j + 1), vtx(i, j + 1)});
    q.delta = delta;
    return q;
}

/// Lambda of a triangular lattice: Gamma = triangular vertices, Gamma* = all
/// triangle centers; one rhombus (half-angle pi/6) per Gamma-edge. This hosts
/// the honeycomb-edge discretization of holomorphicity.
inline QuadComplex make_triangular_lambda(int n, int m, double delta = 1.0) {
    if (n < 3 || m < 3) throw std::invalid_argument("triangular Lambda needs n, m >= 3");
    QuadComplex q;
    const cplx omega = std::polar(1.0, kPi / 3.0);
    std::map<std::tuple<int, int, int>, int> vid;  // (kind, i, j): 0 vertex, 1 up, 2 down
    auto add = [&](int kind, int i, int j) {
        auto key = std::make_tuple(kind, i, j);
        auto it = vid.find(key);
        if (it != vid.end()) return it->second;
        cplx z = delta * (cplx(i, 0) + omega * cplx(j, 0));
        if (kind == 1) z += delta * (1.0 + omega) / 3.0;
        if (kind == 2) z += delta * 2.0 * (1.0 + omega) / 3.0;
        int id = q.num_lambda();
        vid[key] = id;
        q.lambda_pos.push_back(z);
        q.lambda_class.push_back(kind == 0 ? 0 : 1);
        return id;
    };
    auto push_quad = [&](int a, int b, int c, int d) {
        std::array<int, 4> quad{a, b, c, d};
        std::vector<cplx> p{q.lambda_pos[a], q.lambda_pos[b], q.lambda_pos[c], q.lambda_pos[d]};
        if (polygon_signed_area(p) < 0) std::swap(quad[1], quad[3]);
        q.quads.push_back(quad);
    };
    for (int j = 1; j + 1 < m; ++j)
        for (int i = 1; i + 1 < n; ++i) {
            // horizontal edge, omega edge and anti edge out of z(i, j)
            push_quad(add(0, i, j), add(2, i, j - 1), add(0, i + 1, j), add(1, i, j));
            push_quad(add(0, i, j), add(1, i, j), add(0, i, j + 1), add(2, i - 1, j));
            if (i + 2 < n || true)
                push_quad(add(0, i + 1, j), add(2, i, j), add(0, i, j + 1), add(1, i, j));
        }
    q.delta = delta / std::sqrt(3.0);
    return q;
}

inline QuadComplex make_isoradial_random(int p, int r, double delta, uint64_t seed) {
    RngStream rng(seed, 11);
    std::vector<double> alpha(p), beta(r);
    for (double& a : alpha) a = (rng.uniform() - 0.5) * 0.8;
    for (double& b : beta) b = kPi / 2 + (rng.uniform() - 0.5) * 0.8;
    return make_isoradial_rhombic(alpha, beta, delta);
}

// ---------------------------------------------------------------------------
// Medial t-embedding of a quad complex (the orthodiagonal picture): dual
// vertices at Lambda-edge midpoints, white rectangles inside quads, black
// cells around Lambda-vertices. Rim vertices keep their own position as a
// boundary dual vertex so that rim cells stay convex polygons.

struct MedialResult {
    TEmbedding emb;
    std::vector<int> cell_of_lambda;      // black cell per Lambda-vertex (-1 if absent)
    std::vector<int> cell_of_quad;        // white cell per quad
    std::vector<int> lambda_of_cell;      // inverse (or -1)
    std::vector<int> quad_of_cell;
    std::vector<int> bvertex_of_lambda;   // rim Lambda-vertex -> its boundary dual vertex
};

inline MedialResult medial_tembedding(const QuadComplex& q) {
    std::map<std::pair<int, int>, int> mid_id;  // Lambda edge (a<b) -> dual vertex
    std::vector<cplx> pos;
    auto midpoint = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = mid_id.find(key);
        if (it != mid_id.end()) return it->second;
        int id = static_cast<int>(pos.size());
        mid_id[key] = id;
        pos.push_back(0.5 * (q.lambda_pos[a] + q.lambda_pos[b]));
        return id;
    };
    // incidence: per Lambda-vertex, the quads and the covered edges
    std::vector<std::vector<std::pair<int, int>>> edges_at(q.num_lambda());  // (other, mid id)
    std::vector<int> quad_count(q.num_lambda(), 0);
    std::vector<std::vector<int>> quad_mid(q.num_quads());
    std::set<std::tuple<int, int, int>> corner_pairs;  // (v, m_out, m_in), ccw around v
    for (int t = 0; t < q.num_quads(); ++t) {
        const auto& quad = q.quads[t];
        for (int k = 0; k < 4; ++k) {
            int a = quad[k], b = quad[(k + 1) % 4];
            int m = midpoint(a, b);
            quad_mid[t].push_back(m);
            ++quad_count[a];
        }
        for (int k = 0; k < 4; ++k) {
            int v = quad[k];
            int m_in = quad_mid[t][(k + 3) % 4], m_out = quad_mid[t][k];
            corner_pairs.insert({v, m_out, m_in});
        }
    }
    for (const auto& [key, m] : mid_id) {
        edges_at[key.first].push_back({key.second, m});
        edges_at[key.second].push_back({key.first, m});
    }

    MedialResult res;
    res.cell_of_lambda.assign(q.num_lambda(), -1);
    res.bvertex_of_lambda.assign(q.num_lambda(), -1);
    res.cell_of_quad.assign(q.num_quads(), -1);

    std::vector<std::vector<int>> cells;
    std::vector<uint8_t> colors;
    // white rectangles
    for (int t = 0; t < q.num_quads(); ++t) {
        res.cell_of_quad[t] = static_cast<int>(cells.size());
        cells.push_back(quad_mid[t]);
        colors.push_back(1);
    }
    // black cells around Lambda-vertices
    for (int v = 0; v < q.num_lambda(); ++v) {
        auto& inc = edges_at[v];
        if (inc.empty()) continue;
        cplx zv = q.lambda_pos[v];
        std::sort(inc.begin(), inc.end(), [&](const auto& x, const auto& y) {
            return std::arg(q.lambda_pos[x.first] - zv) < std::arg(q.lambda_pos[y.first] - zv);
        });
        bool rim = static_cast<int>(inc.size()) != quad_count[v];
        std::vector<int> cyc;
        if (rim) {
            // rotate so the fan opens across the missing sector: the unique
            // consecutive pair (ccw) that does not bound a corner of a quad
            int gap = -1, n_gaps = 0;
            for (size_t i = 0; i < inc.size(); ++i) {
                int m1 = inc[i].second, m2 = inc[(i + 1) % inc.size()].second;
                if (!corner_pairs.count({v, m1, m2})) {
                    gap = static_cast<int>(i);
                    ++n_gaps;
                }
            }
            if (n_gaps != 1)
                throw std::runtime_error("quad set pinches at a Lambda-vertex; unsupported region");
            std::rotate(inc.begin(), inc.begin() + ((gap + 1) % static_cast<int>(inc.size())),
                        inc.end());
            for (auto& e : inc) cyc.push_back(e.second);
            // the vertex itself closes the cell only when the covered fan
            // spans at most pi; otherwise the straight chamfer stays convex
            double fan_angle = 0.0;
            for (size_t i = 0; i + 1 < inc.size(); ++i) {
                cplx a1 = q.lambda_pos[inc[i].first] - zv;
                cplx a2 = q.lambda_pos[inc[i + 1].first] - zv;
                fan_angle += std::abs(std::arg(std::conj(a1) * a2));
            }
            if (fan_angle <= kPi + 1e-9) {
                int bv = static_cast<int>(pos.size());
                pos.push_back(zv);
                res.bvertex_of_lambda[v] = bv;
                cyc.push_back(bv);
            }
        } else {
            for (auto& e : inc) cyc.push_back(e.second);
        }
        res.cell_of_lambda[v] = static_cast<int>(cells.size());
        cells.push_back(cyc);
        colors.push_back(0);
    }
    res.emb = embedding_from_cells(std::move(pos), cells, colors);
    res.lambda_of_cell.assign(res.emb.num_cells(), -1);
    res.quad_of_cell.assign(res.emb.num_cells(), -1);
    for (int v = 0; v < q.num_lambda(); ++v)
        if (res.cell_of_lambda[v] >= 0) res.lambda_of_cell[res.cell_of_lambda[v]] = v;
    for (int t = 0; t < q.num_quads(); ++t) res.quad_of_cell[res.cell_of_quad[t]] = t;
    return res;
}

// ---------------------------------------------------------------------------
// Incircle t-embedding of a quad complex with tangential faces (the
// s-embedding picture): dual vertices are the Lambda-vertices plus incircle
// centers; cells are the corner triangles [v_k, v_{k+1}, center].

struct IncircleResult {
    TEmbedding emb;
    std::vector<int> vertex_of_lambda;   // dual vertex per Lambda-vertex
    std::vector<int> vertex_of_center;   // dual vertex per quad
    // corner cells: cell id per (quad, side k) with side (v_k, v_{k+1})
    std::vector<std::array<int, 4>> cell_of_corner;
    double max_tangential_residual = 0.0;  // spread of center-to-side distances
};

namespace detail {
inline double dist_point_segment_line(cplx z, cplx a, cplx b) {
    cplx d = unit(b - a);
    return std::abs(std::imag(std::conj(d) * (z - a)));
}
/// Center of the circle inscribed in a tangential quad: intersection of two
/// angle bisectors; residual reports how tangential the quad really is.
inline cplx tangential_incenter(const std::array<cplx, 4>& p, double* residual) {
    auto bisector_dir = [&](int k) {
        cplx u = unit(p[(k + 1) % 4] - p[k]);
        cplx v = unit(p[(k + 3) % 4] - p[k]);
        return unit(u + v);
    };
    // intersect bisectors from corners 0 and 1
    cplx a0 = p[0], d0 = bisector_dir(0), a1 = p[1], d1 = bisector_dir(1);
    double det = d0.real() * (-d1.imag()) - (-d1.real()) * d0.imag();
    if (std::abs(det) < 1e-300) throw std::runtime_error("degenerate quad in incircle construction");
    double rx = a1.real() - a0.real(), ry = a1.imag() - a0.imag();
    double s = (rx * (-d1.imag()) - (-d1.real()) * ry) / det;
    cplx c = a0 + s * d0;
    double dmin = 1e300, dmax = 0.0;
    for (int k = 0; k < 4; ++k) {
        double dd = dist_point_segment_line(c, p[k], p[(k + 1) % 4]);
        dmin = std::min(dmin, dd);
        dmax = std::max(dmax, dd);
    }
    if (residual) *residual = dmax - dmin;
    return c;
}
}  // namespace detail

inline IncircleResult incircle_tembedding(const QuadComplex& q) {
    IncircleResult res;
    std::vector<cplx> pos(q.lambda_pos.begin(), q.lambda_pos.end());
    res.vertex_of_lambda.resize(q.num_lambda());
    std::iota(res.vertex_of_lambda.begin(), res.vertex_of_lambda.end(), 0);
    res.vertex_of_center.resize(q.num_quads());
    for (int t = 0; t < q.num_quads(); ++t) {
        std::array<cplx, 4> p;
        for (int k = 0; k < 4; ++k) p[k] = q.lambda_pos[q.quads[t][k]];
        double resid = 0.0;
        cplx c = detail::tangential_incenter(p, &resid);
        res.max_tangential_residual = std::max(res.max_tangential_residual, resid);
        res.vertex_of_center[t] = static_cast<int>(pos.size());
        pos.push_back(c);
    }
    // corner triangles; 2-color them by BFS over adjacency
    std::vector<std::vector<int>> cells;
    res.cell_of_corner.assign(q.num_quads(), {-1, -1, -1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> side_owner;  // (a,b) -> (quad, k)
    for (int t = 0; t < q.num_quads(); ++t)
        for (int k = 0; k < 4; ++k) {
            int a = q.quads[t][k], b = q.quads[t][(k + 1) % 4];
            res.cell_of_corner[t][k] = static_cast<int>(cells.size());
            cells.push_back({a, b, res.vertex_of_center[t]});
            side_owner[{a, b}] = {t, k};
        }
    std::vector<int> color(cells.size(), -1);
    std::vector<int> stack;
    for (size_t c0 = 0; c0 < cells.size(); ++c0) {
        if (color[c0] != -1) continue;
        color[c0] = 0;
        stack.push_back(static_cast<int>(c0));
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            // cells were appended in order: quad t, side k -> 4*t + k
            int quad = c / 4, k = c % 4;
            // neighbor within the quad across the spoke (v_{k+1}, center)
            int n1 = 4 * quad + (k + 1) % 4;
            int n0 = 4 * quad + (k + 3) % 4;
            // neighbor across the Lambda side, if any
            int a = q.quads[quad][k], b = q.quads[quad][(k + 1) % 4];
            int n2 = -1;
            auto it = side_owner.find({b, a});
            if (it != side_owner.end()) n2 = 4 * it->second.first + it->second.second;
            for (int nb : {n0, n1, n2}) {
                if (nb < 0) continue;
                if (color[nb] == -1) {
                    color[nb] = color[c] ^ 1;
                    stack.push_back(nb);
                } else if (color[nb] == color[c]) {
                    throw std::runtime_error("corner triangles are not two-colorable");
                }
            }
        }
    }
    std::vector<uint8_t> colors(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) colors[c] = static_cast<uint8_t>(color[c]);
    res.emb = embedding_from_cells(std::move(pos), cells, colors);
    return res;
}

}  // namespace tembed
