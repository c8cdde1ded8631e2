#pragma once

// Concrete straight-line embeddings of (augmented) duals of dimer graphs:
// validity diagnostics, Kasteleyn matrices with geometric entries, and the
// circle-pattern realisation obtained by iterated reflections.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tembed/core.hpp"
#include "tembed/graph.hpp"

namespace tembed {

class TEmbedding {
  public:
    DimerGraph g;        // vertices of g == cells of the embedding
    DualStructure dual;  // combinatorial dual (cells, sides, boundary)
    std::vector<cplx> pos;

    // caches
    std::vector<double> cell_area;       // per cell, positive
    std::vector<double> cell_diam;
    struct StarEntry {
        int cell = -1;
        double angle = 0.0;  // corner angle of the cell at this vertex
    };
    // star[v]: cells around v in ccw order; cyclic for interior vertices,
    // open (boundary to boundary) for boundary-cycle vertices.
    std::vector<std::vector<StarEntry>> star;

    int num_cells() const { return static_cast<int>(dual.cell.size()); }
    int num_vertices() const { return dual.n_vertices; }
    bool is_interior_vertex(int v) const { return !dual.is_boundary_vertex[v]; }
    bool is_interior_cell(int u) const { return !dual.cell_on_boundary[u]; }
    bool black_cell(int u) const { return dual.cell_color[u] == 0; }

    cplx dT(int e) const { return pos[dual.edges[e].v_to] - pos[dual.edges[e].v_from]; }

    std::vector<cplx> cell_polygon(int u) const {
        std::vector<cplx> p;
        p.reserve(dual.cell[u].size());
        for (int v : dual.cell[u]) p.push_back(pos[v]);
        return p;
    }

    /// Mesh scale: the maximal face diameter.
    double mesh_delta() const {
        double d = 0.0;
        for (double x : cell_diam) d = std::max(d, x);
        return d;
    }

    double diameter() const {
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (const cplx& z : pos) {
            lo_x = std::min(lo_x, z.real());
            hi_x = std::max(hi_x, z.real());
            lo_y = std::min(lo_y, z.imag());
            hi_y = std::max(hi_y, z.imag());
        }
        return std::hypot(hi_x - lo_x, hi_y - lo_y);
    }

    void finalize() {
        const int U = num_cells();
        cell_area.resize(U);
        cell_diam.resize(U);
        for (int u = 0; u < U; ++u) {
            auto p = cell_polygon(u);
            cell_area[u] = polygon_signed_area(p);
            cell_diam[u] = polygon_diameter(p);
        }
        build_stars();
    }

  private:
    void build_stars() {
        star.assign(dual.n_vertices, {});
        // ordered side (a -> b) -> (cell, side index)
        std::map<std::pair<int, int>, std::pair<int, int>> owner;
        for (int u = 0; u < num_cells(); ++u) {
            const auto& cyc = dual.cell[u];
            const int n = static_cast<int>(cyc.size());
            for (int i = 0; i < n; ++i)
                owner[{cyc[i], cyc[(i + 1) % n]}] = {u, i};
        }
        auto corner_of = [&](int u, int i) {
            const auto& cyc = dual.cell[u];
            const int n = static_cast<int>(cyc.size());
            cplx prev = pos[cyc[(i + n - 1) % n]];
            cplx next = pos[cyc[(i + 1) % n]];
            return StarEntry{u, corner_angle(prev, pos[cyc[i]], next)};
        };
        // ccw-next corner around v from (u, i): cross the incoming side.
        auto next_corner = [&](int u, int i) -> std::optional<std::pair<int, int>> {
            const auto& cyc = dual.cell[u];
            const int n = static_cast<int>(cyc.size());
            int prev = cyc[(i + n - 1) % n];
            auto it = owner.find({cyc[i], prev});  // reversed incoming side
            if (it == owner.end()) return std::nullopt;
            return it->second;
        };
        auto prev_exists = [&](int u, int i) {
            const auto& cyc = dual.cell[u];
            const int n = static_cast<int>(cyc.size());
            int next = cyc[(i + 1) % n];
            return owner.count({next, cyc[i]}) > 0;
        };

        std::vector<std::vector<std::pair<int, int>>> corners_at(dual.n_vertices);
        for (int u = 0; u < num_cells(); ++u)
            for (size_t i = 0; i < dual.cell[u].size(); ++i)
                corners_at[dual.cell[u][i]].push_back({u, static_cast<int>(i)});

        for (int v = 0; v < dual.n_vertices; ++v) {
            if (corners_at[v].empty()) continue;
            std::pair<int, int> start = corners_at[v].front();
            if (dual.is_boundary_vertex[v]) {
                // open fan: start where no cw-predecessor exists
                for (auto& c : corners_at[v])
                    if (!prev_exists(c.first, c.second)) start = c;
            }
            std::vector<StarEntry> fan;
            auto cur = start;
            for (size_t guard = 0; guard <= corners_at[v].size(); ++guard) {
                fan.push_back(corner_of(cur.first, cur.second));
                auto nxt = next_corner(cur.first, cur.second);
                if (!nxt || (*nxt == start)) break;
                cur = *nxt;
            }
            if (fan.size() != corners_at[v].size())
                throw std::runtime_error("inconsistent cell incidences around a dual vertex");
            star[v] = std::move(fan);
        }
    }
};

// ---------------------------------------------------------------------------
// Constructors

/// Geometry-first construction: dual vertex positions plus colored ccw cells.
/// The bipartite graph, primal/dual pairing and boundary data are derived.
inline TEmbedding embedding_from_cells(std::vector<cplx> pos,
                                       const std::vector<std::vector<int>>& cells,
                                       const std::vector<uint8_t>& colors) {
    if (cells.size() != colors.size()) throw std::invalid_argument("cells/colors size mismatch");
    TEmbedding t;
    t.pos = std::move(pos);
    auto& d = t.dual;
    d.n_vertices = static_cast<int>(t.pos.size());
    d.is_boundary_vertex.assign(d.n_vertices, 0);
    d.cell = cells;
    d.cell_color = colors;
    d.cell_on_boundary.assign(cells.size(), 0);
    d.side_edge.resize(cells.size());
    d.vertex_key.resize(d.n_vertices);
    for (int v = 0; v < d.n_vertices; ++v) d.vertex_key[v] = "v:" + std::to_string(v);

    std::map<std::pair<int, int>, std::pair<int, int>> owner;  // ordered side -> (cell, idx)
    for (size_t u = 0; u < cells.size(); ++u) {
        const auto& cyc = cells[u];
        const int n = static_cast<int>(cyc.size());
        if (n < 2) throw std::invalid_argument("cell with fewer than 2 vertices");
        d.side_edge[u].assign(n, -1);
        for (int i = 0; i < n; ++i) {
            auto key = std::make_pair(cyc[i], cyc[(i + 1) % n]);
            if (!owner.emplace(key, std::make_pair(static_cast<int>(u), i)).second)
                throw std::invalid_argument("two cells traverse the same oriented side");
        }
    }
    // pair opposite sides into primal edges
    for (const auto& [side, ui] : owner) {
        auto rev = owner.find({side.second, side.first});
        if (rev == owner.end()) {
            // boundary-cycle side
            d.is_boundary_vertex[side.first] = 1;
            d.is_boundary_vertex[side.second] = 1;
            d.cell_on_boundary[ui.first] = 1;
            continue;
        }
        if (side.first > side.second) continue;  // handle each unordered pair once
        auto [u1, i1] = ui;
        auto [u2, i2] = rev->second;
        if (colors[u1] == colors[u2])
            throw std::invalid_argument("adjacent cells have equal colors (dual not bipartite)");
        int b = colors[u1] == 0 ? u1 : u2;
        int w = colors[u1] == 0 ? u2 : u1;
        DualStructure::EdgeRef er;
        er.b = b;
        er.w = w;
        // oriented with b on the right == as traversed ccw around w
        if (w == u1) {
            er.v_from = side.first;
            er.v_to = side.second;
        } else {
            er.v_from = side.second;
            er.v_to = side.first;
        }
        er.weight = std::abs(t.pos[er.v_to] - t.pos[er.v_from]);
        int e = static_cast<int>(d.edges.size());
        d.edges.push_back(er);
        d.side_edge[u1][i1] = e;
        d.side_edge[u2][i2] = e;
    }
    // boundary cycle in walk order: chain boundary sides by their cells' orientation
    {
        std::map<int, int> succ;
        for (const auto& [side, ui] : owner)
            if (!owner.count({side.second, side.first})) succ[side.first] = side.second;
        if (!succ.empty()) {
            int v0 = succ.begin()->first;
            int v = v0;
            do {
                d.boundary_cycle.push_back(v);
                auto it = succ.find(v);
                if (it == succ.end()) throw std::invalid_argument("boundary sides do not close a cycle");
                v = it->second;
            } while (v != v0 && d.boundary_cycle.size() <= succ.size());
        }
    }

    // derive the abstract dimer graph
    t.g.color = colors;
    t.g.rotation.resize(cells.size());
    for (size_t u = 0; u < cells.size(); ++u)
        for (int e : d.side_edge[u])
            if (e >= 0) t.g.rotation[u].push_back(e);
    t.g.edges.resize(d.edges.size());
    for (size_t e = 0; e < d.edges.size(); ++e)
        t.g.edges[e] = {d.edges[e].b, d.edges[e].w, d.edges[e].weight};

    t.finalize();
    return t;
}

/// Abstract-graph-first construction: positions are supplied per dual-vertex
/// key ("f:..." canonical face keys and "bnd:k" boundary keys).
inline TEmbedding embedding_from_graph(const DimerGraph& g, std::optional<std::string> v_out_key,
                                       const std::map<std::string, cplx>& positions) {
    TEmbedding t;
    t.g = g;
    t.dual = build_augmented_dual(g, std::move(v_out_key));
    t.pos.resize(t.dual.n_vertices);
    for (int v = 0; v < t.dual.n_vertices; ++v) {
        auto it = positions.find(t.dual.vertex_key[v]);
        if (it == positions.end())
            throw std::invalid_argument("missing position for dual vertex " + t.dual.vertex_key[v]);
        t.pos[v] = it->second;
    }
    for (auto& er : t.dual.edges) er.weight = std::abs(t.pos[er.v_to] - t.pos[er.v_from]);
    for (size_t e = 0; e < t.g.edges.size(); ++e) t.g.edges[e].x = t.dual.edges[e].weight;
    t.finalize();
    return t;
}

// ---------------------------------------------------------------------------
// Validation

enum class EmbeddingMode { Finite, WholePlane };

struct TEmbeddingReport {
    struct VertexResidual {
        int vertex;
        double black_residual;  // |sum of black angles - pi|
        double white_residual;
        bool exempt;            // boundary vertex in finite mode
    };
    std::vector<VertexResidual> angle;
    std::vector<int> nonconvex_cells;
    std::vector<int> misoriented_cells;
    std::vector<std::pair<int, int>> overlapping_cells;  // only with paranoid scan
    double max_angle_residual = 0.0;

    bool ok(double tol_per_degree = 1e-9) const {
        if (!nonconvex_cells.empty() || !misoriented_cells.empty() || !overlapping_cells.empty())
            return false;
        for (const auto& a : angle)
            if (!a.exempt && std::max(a.black_residual, a.white_residual) > tol_per_degree)
                return false;
        return true;
    }
};

namespace detail {
inline bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
    auto orient = [](cplx p, cplx q, cplx r) {
        double v = (q.real() - p.real()) * (r.imag() - p.imag()) -
                   (q.imag() - p.imag()) * (r.real() - p.real());
        double s = std::abs(q - p) * std::abs(r - p);
        if (std::abs(v) <= 1e-12 * s) return 0;
        return v > 0 ? 1 : -1;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;  // proper crossings only
}
}  // namespace detail

inline TEmbeddingReport validate_tembedding(const TEmbedding& t,
                                            EmbeddingMode mode = EmbeddingMode::Finite,
                                            bool paranoid = false) {
    TEmbeddingReport rep;
    for (int u = 0; u < t.num_cells(); ++u) {
        auto p = t.cell_polygon(u);
        if (polygon_signed_area(p) <= 0.0) rep.misoriented_cells.push_back(u);
        if (!polygon_convex_ccw(p)) rep.nonconvex_cells.push_back(u);
    }
    for (int v = 0; v < t.num_vertices(); ++v) {
        bool exempt = (mode == EmbeddingMode::Finite) && !t.is_interior_vertex(v);
        KahanSum black, white;
        for (const auto& se : t.star[v])
            (t.black_cell(se.cell) ? black : white).add(se.angle);
        TEmbeddingReport::VertexResidual vr;
        vr.vertex = v;
        vr.black_residual = std::abs(black.value() - kPi);
        vr.white_residual = std::abs(white.value() - kPi);
        vr.exempt = exempt;
        if (!exempt)
            rep.max_angle_residual =
                std::max(rep.max_angle_residual, std::max(vr.black_residual, vr.white_residual));
        rep.angle.push_back(vr);
    }
    if (paranoid) {
        // global segment-intersection scan over all cell sides
        struct Side {
            cplx a, b;
            int cell;
        };
        std::vector<Side> sides;
        for (int u = 0; u < t.num_cells(); ++u) {
            const auto& cyc = t.dual.cell[u];
            for (size_t i = 0; i < cyc.size(); ++i)
                sides.push_back({t.pos[cyc[i]], t.pos[cyc[(i + 1) % cyc.size()]], u});
        }
        for (size_t i = 0; i < sides.size(); ++i)
            for (size_t j = i + 1; j < sides.size(); ++j) {
                if (sides[i].cell == sides[j].cell) continue;
                if (detail::segments_cross(sides[i].a, sides[i].b, sides[j].a, sides[j].b))
                    rep.overlapping_cells.push_back({sides[i].cell, sides[j].cell});
            }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Kasteleyn matrix

struct KasteleynMatrix {
    Eigen::MatrixXcd K;          // rows: blacks, cols: whites
    std::vector<int> blacks;     // row index -> cell
    std::vector<int> whites;     // col index -> cell
    std::vector<int> row_of;     // cell -> row (or -1)
    std::vector<int> col_of;     // cell -> col (or -1)
    double max_sign_residual = 0.0;  // alternating-product phase defect over dual vertices

    cplx entry(int b_cell, int w_cell) const { return K(row_of[b_cell], col_of[w_cell]); }
};

/// K(b, w) = dT(bw*); checks the Kasteleyn sign condition: around every
/// interior dual vertex of degree 2k the alternating product of entries is
/// (-1)^{k+1} times a positive real.
inline KasteleynMatrix kasteleyn_matrix(const TEmbedding& t, double phase_tol = 1e-10) {
    KasteleynMatrix km;
    km.row_of.assign(t.num_cells(), -1);
    km.col_of.assign(t.num_cells(), -1);
    for (int u = 0; u < t.num_cells(); ++u) {
        if (t.black_cell(u)) {
            km.row_of[u] = static_cast<int>(km.blacks.size());
            km.blacks.push_back(u);
        } else {
            km.col_of[u] = static_cast<int>(km.whites.size());
            km.whites.push_back(u);
        }
    }
    km.K = Eigen::MatrixXcd::Zero(km.blacks.size(), km.whites.size());
    for (const auto& er : t.dual.edges)
        km.K(km.row_of[er.b], km.col_of[er.w]) = t.pos[er.v_to] - t.pos[er.v_from];

    for (int v = 0; v < t.num_vertices(); ++v) {
        if (!t.is_interior_vertex(v)) continue;
        const auto& fan = t.star[v];
        const int m = static_cast<int>(fan.size());
        if (m % 2 != 0) throw std::runtime_error("odd star around an interior dual vertex");
        const int k = m / 2;
        int start = t.black_cell(fan[0].cell) ? 0 : 1;
        cplx prod = 1.0;
        for (int i = 0; i < k; ++i) {
            int b = fan[(start + 2 * i) % m].cell;
            int w = fan[(start + 2 * i + 1) % m].cell;
            int b_next = fan[(start + 2 * i + 2) % m].cell;
            prod *= km.entry(b, w) / km.entry(b_next, w);
        }
        double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^{k+1}
        cplx q = prod * sign;
        double resid = std::abs(std::arg(q));
        km.max_sign_residual = std::max(km.max_sign_residual, resid);
        if (resid > phase_tol)
            throw std::runtime_error("Kasteleyn sign condition fails at dual vertex " +
                                     std::to_string(v) + " (phase defect " + std::to_string(resid) +
                                     "); embedding or orientation invalid");
    }
    return km;
}

// ---------------------------------------------------------------------------
// Circle pattern realisation

struct CirclePattern {
    std::vector<cplx> c;  // per cell (vertex of G)
    int seed_cell = -1;
    double max_closure_residual = 0.0;
};

inline cplx reflect_across(cplx z, cplx p, cplx q) {
    cplx d = unit(q - p);
    return p + d * d * std::conj(z - p);
}

/// Propagates C over V(G) by the rule that C(b) and C(w) are mirror images
/// across the line through the shared embedded dual edge. The closure
/// residual over non-tree edges measures the angle-condition holonomy.
inline CirclePattern circle_pattern(const TEmbedding& t, int seed_white_cell, cplx z0,
                                    double tol = 1e-12) {
    if (t.black_cell(seed_white_cell)) throw std::invalid_argument("seed must be a white cell");
    CirclePattern cp;
    cp.seed_cell = seed_white_cell;
    cp.c.assign(t.num_cells(), cplx(0, 0));
    std::vector<uint8_t> known(t.num_cells(), 0);
    cp.c[seed_white_cell] = z0;
    known[seed_white_cell] = 1;
    std::vector<std::vector<std::pair<int, int>>> inc(t.num_cells());  // (edge, other cell)
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        inc[er.b].push_back({static_cast<int>(e), er.w});
        inc[er.w].push_back({static_cast<int>(e), er.b});
    }
    std::queue<int> q;
    q.push(seed_white_cell);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (auto [e, u2] : inc[u]) {
            const auto& er = t.dual.edges[e];
            cplx image = reflect_across(cp.c[u], t.pos[er.v_from], t.pos[er.v_to]);
            if (!known[u2]) {
                cp.c[u2] = image;
                known[u2] = 1;
                q.push(u2);
            } else {
                cp.max_closure_residual = std::max(cp.max_closure_residual, std::abs(cp.c[u2] - image));
            }
        }
    }
    double scale = t.diameter();
    if (cp.max_closure_residual > tol * std::max(1.0, scale))
        throw std::runtime_error("circle pattern does not close: residual " +
                                 std::to_string(cp.max_closure_residual) +
                                 " (invalid t-embedding)");
    return cp;
}

}  // namespace tembed
