#pragma once

// Abstract bipartite planar graphs carrying the dimer model, represented as
// combinatorial maps (rotation systems), together with the augmented dual
// construction and gauge transforms of edge weights.

#include <array>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tembed/core.hpp"

namespace tembed {

struct DimerGraph {
    // Vertices 0..num_vertices()-1. color[v]: 0 = black, 1 = white.
    std::vector<uint8_t> color;
    struct Edge {
        int b = -1, w = -1;
        double x = 1.0;  // positive weight
    };
    std::vector<Edge> edges;
    // rotation[v] = edge ids incident to v in counterclockwise order.
    std::vector<std::vector<int>> rotation;
    // Optional external labels (kept for IO round trips).
    std::vector<std::string> label;

    int num_vertices() const { return static_cast<int>(color.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    bool is_black(int v) const { return color[v] == 0; }
    int other_end(int e, int v) const { return edges[e].b == v ? edges[e].w : edges[e].b; }
    int degree(int v) const { return static_cast<int>(rotation[v].size()); }
};

// ---------------------------------------------------------------------------
// Half-edge machinery. Half-edge h of edge e: h = 2e (b -> w) or 2e+1 (w -> b).

inline int he_edge(int h) { return h >> 1; }
inline int he_reverse(int h) { return h ^ 1; }
inline int he_tail(const DimerGraph& g, int h) {
    const auto& e = g.edges[he_edge(h)];
    return (h & 1) ? e.w : e.b;
}
inline int he_head(const DimerGraph& g, int h) {
    const auto& e = g.edges[he_edge(h)];
    return (h & 1) ? e.b : e.w;
}

/// Faces of the map: next half-edge of h inside the same face is the
/// out-half-edge at head(h) immediately before reverse(h) in the ccw rotation.
/// With counterclockwise rotations this traces interior faces ccw.
struct FaceStructure {
    std::vector<std::vector<int>> face_halfedges;  // per face, the trace
    std::vector<int> face_of_halfedge;             // 2*E entries
    std::vector<std::string> face_key;             // canonical, deterministic

    int num_faces() const { return static_cast<int>(face_halfedges.size()); }
};

namespace detail {
inline std::string canonical_cycle_key(const std::vector<int>& cyc) {
    const size_t n = cyc.size();
    size_t best = 0;
    for (size_t s = 1; s < n; ++s) {
        for (size_t k = 0; k < n; ++k) {
            int a = cyc[(s + k) % n], b = cyc[(best + k) % n];
            if (a != b) {
                if (a < b) best = s;
                break;
            }
        }
    }
    std::ostringstream os;
    os << "f";
    for (size_t k = 0; k < n; ++k) os << ":" << cyc[(best + k) % n];
    return os.str();
}
}  // namespace detail

inline FaceStructure trace_faces(const DimerGraph& g) {
    const int E = g.num_edges();
    // position of each incident edge inside rotation[v]
    std::vector<std::map<int, int>> rot_index(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
        for (size_t i = 0; i < g.rotation[v].size(); ++i) {
            int e = g.rotation[v][i];
            if (e < 0 || e >= E) throw std::invalid_argument("rotation refers to unknown edge");
            if (!rot_index[v].emplace(e, static_cast<int>(i)).second)
                throw std::invalid_argument("edge repeated in rotation");
        }
    }
    auto next_in_face = [&](int h) {
        int v = he_head(g, h);
        auto it = rot_index[v].find(he_edge(h));
        if (it == rot_index[v].end()) throw std::invalid_argument("rotation inconsistent with edges");
        int deg = g.degree(v);
        int i = (it->second + deg - 1) % deg;  // previous in ccw order
        int e2 = g.rotation[v][i];
        return 2 * e2 + (g.edges[e2].b == v ? 0 : 1);
    };

    FaceStructure fs;
    fs.face_of_halfedge.assign(2 * E, -1);
    std::map<std::string, int> key_count;
    for (int h0 = 0; h0 < 2 * E; ++h0) {
        if (fs.face_of_halfedge[h0] != -1) continue;
        std::vector<int> trace;
        int h = h0;
        do {
            fs.face_of_halfedge[h] = fs.num_faces();
            trace.push_back(h);
            h = next_in_face(h);
            if (trace.size() > 4 * g.edges.size() + 4)
                throw std::runtime_error("face trace does not close; invalid rotation system");
        } while (h != h0);
        std::vector<int> cyc;
        cyc.reserve(trace.size());
        for (int t : trace) cyc.push_back(he_tail(g, t));
        std::string key = detail::canonical_cycle_key(cyc);
        int n = key_count[key]++;
        if (n > 0) key += "#" + std::to_string(n);
        fs.face_halfedges.push_back(std::move(trace));
        fs.face_key.push_back(std::move(key));
    }
    return fs;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct Diagnostic {
    std::string severity;  // "error" | "warning"
    std::string what;
};

using DiagnosticReport = std::vector<Diagnostic>;

/// Structural checks on a dimer graph: bipartiteness (recomputed from the
/// adjacency, not trusted from declared colors), minimum degree three
/// (warning only), Euler formula of the rotation system.
inline DiagnosticReport validate_dimer_graph(const DimerGraph& g) {
    DiagnosticReport rep;
    const int V = g.num_vertices(), E = g.num_edges();
    // recompute two-coloring by BFS on the adjacency
    std::vector<int> col(V, -1);
    std::vector<std::vector<int>> adj(V);
    for (const auto& e : g.edges) {
        if (e.b < 0 || e.b >= V || e.w < 0 || e.w >= V) {
            rep.push_back({"error", "edge endpoint out of range"});
            return rep;
        }
        adj[e.b].push_back(e.w);
        adj[e.w].push_back(e.b);
        if (e.x <= 0.0) rep.push_back({"error", "nonpositive edge weight"});
    }
    for (int s = 0; s < V; ++s) {
        if (col[s] != -1) continue;
        col[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : adj[v]) {
                if (col[u] == -1) {
                    col[u] = col[v] ^ 1;
                    q.push(u);
                } else if (col[u] == col[v]) {
                    rep.push_back({"error", "bipartiteness violation: odd cycle through vertex " +
                                                std::to_string(u)});
                    return rep;
                }
            }
        }
    }
    for (const auto& e : g.edges)
        if (g.color[e.b] != 0 || g.color[e.w] != 1)
            rep.push_back({"error", "edge colors disagree with declared black/white classes"});
    for (int v = 0; v < V; ++v)
        if (g.degree(v) < 3)
            rep.push_back({"warning", "vertex " + std::to_string(v) +
                                          " has degree " + std::to_string(g.degree(v)) +
                                          " < 3 (degenerate test graph?)"});
    // rotation covers each edge endpoint exactly once
    std::vector<int> cnt(E, 0);
    for (int v = 0; v < V; ++v)
        for (int e : g.rotation[v]) {
            if (e < 0 || e >= E || (g.edges[e].b != v && g.edges[e].w != v)) {
                rep.push_back({"error", "rotation at vertex " + std::to_string(v) +
                                            " lists a non-incident edge"});
                return rep;
            }
            cnt[e]++;
        }
    for (int e = 0; e < E; ++e)
        if (cnt[e] != 2) {
            rep.push_back({"error", "edge " + std::to_string(e) + " not covered twice by rotations"});
            return rep;
        }
    // planarity via Euler characteristic on the sphere
    FaceStructure fs = trace_faces(g);
    int chi = V - E + fs.num_faces();
    if (chi != 2)
        rep.push_back({"error", "rotation system is not planar: V-E+F = " + std::to_string(chi)});
    return rep;
}

inline bool has_errors(const DiagnosticReport& rep) {
    for (const auto& d : rep)
        if (d.severity == "error") return true;
    return false;
}

// ---------------------------------------------------------------------------
// Gauge transforms

/// chi(bw) = g(b) * x(bw) * g(w); preserves the dimer law.
inline std::vector<double> gauge_transform(const DimerGraph& g, const std::vector<double>& gauge) {
    if (static_cast<int>(gauge.size()) != g.num_vertices())
        throw std::invalid_argument("gauge vector size mismatch");
    for (double v : gauge)
        if (!(v > 0.0)) throw std::invalid_argument("gauge values must be positive");
    std::vector<double> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges) out.push_back(gauge[e.b] * e.x * gauge[e.w]);
    return out;
}

// ---------------------------------------------------------------------------
// Augmented dual

struct DualStructure {
    int n_vertices = 0;
    std::vector<uint8_t> is_boundary_vertex;
    std::vector<int> boundary_cycle;  // boundary dual vertices in walk order
    std::vector<std::string> vertex_key;

    // One cell per vertex of G: ccw list of dual vertices. side i runs from
    // cell[u][i] to cell[u][(i+1) % len].
    std::vector<std::vector<int>> cell;
    std::vector<uint8_t> cell_color;  // copy of g.color
    std::vector<uint8_t> cell_on_boundary;
    std::vector<std::vector<int>> side_edge;  // primal edge crossed by side, -1 for boundary side

    struct EdgeRef {
        int b = -1, w = -1;     // cells (vertices of G)
        int v_from = -1, v_to = -1;  // oriented with b on the right (ccw around w)
        double weight = 1.0;
    };
    std::vector<EdgeRef> edges;  // indexed like g.edges

    int degree_of_cell(int u) const { return static_cast<int>(cell[u].size()); }
};

/// Builds the dual of a planar bipartite graph, augmented at the face v_out:
/// the dual vertex of v_out is replaced by a boundary cycle of length
/// deg(v_out), one vertex per outer-walk edge. v_out == nullopt keeps the
/// plain sphere dual (whole-plane style, no boundary).
inline DualStructure build_augmented_dual(const DimerGraph& g,
                                          std::optional<std::string> v_out_key) {
    {
        DiagnosticReport rep = validate_dimer_graph(g);
        if (has_errors(rep)) throw std::invalid_argument("invalid dimer graph: " + rep.front().what);
    }
    FaceStructure fs = trace_faces(g);
    int v_out = -1;
    if (v_out_key) {
        for (int f = 0; f < fs.num_faces(); ++f)
            if (fs.face_key[f] == *v_out_key) v_out = f;
        if (v_out == -1) throw std::invalid_argument("v_out is not a face of G: " + *v_out_key);
    }

    DualStructure d;
    const int V = g.num_vertices(), E = g.num_edges();
    std::vector<int> dual_of_face(fs.num_faces(), -1);
    for (int f = 0; f < fs.num_faces(); ++f) {
        if (f == v_out) continue;
        dual_of_face[f] = d.n_vertices++;
        d.vertex_key.push_back(fs.face_key[f]);
        d.is_boundary_vertex.push_back(0);
    }
    // boundary vertices, one per half-edge of the outer walk
    std::vector<int> bnd_of_halfedge(2 * E, -1);
    if (v_out != -1) {
        const auto& walk = fs.face_halfedges[v_out];
        for (size_t j = 0; j < walk.size(); ++j) {
            int h = walk[j];
            if (bnd_of_halfedge[he_reverse(h)] != -1)
                throw std::invalid_argument(
                    "outer face touches an edge twice (bridge); augmentation needs a 2-connected graph");
            int idx = d.n_vertices++;
            bnd_of_halfedge[h] = idx;
            d.vertex_key.push_back("bnd:" + std::to_string(j));
            d.is_boundary_vertex.push_back(1);
            d.boundary_cycle.push_back(idx);
        }
    }

    d.cell.resize(V);
    d.side_edge.resize(V);
    d.cell_color.resize(V);
    d.cell_on_boundary.assign(V, 0);
    d.edges.resize(E);
    for (int e = 0; e < E; ++e) {
        d.edges[e].b = g.edges[e].b;
        d.edges[e].w = g.edges[e].w;
        d.edges[e].weight = g.edges[e].x;
    }

    for (int u = 0; u < V; ++u) {
        d.cell_color[u] = g.color[u];
        const auto& rot = g.rotation[u];
        const int deg = static_cast<int>(rot.size());
        // corner between out-edges rot[i] and rot[i+1] is the face left of the
        // out-half-edge along rot[i]
        std::vector<int> corners;   // dual vertex per corner (or -2 marking v_out)
        std::vector<int> corner_h;  // the out-half-edge opening the corner
        for (int i = 0; i < deg; ++i) {
            int e = rot[i];
            int h = 2 * e + (g.edges[e].b == u ? 0 : 1);
            corners.push_back(fs.face_of_halfedge[h] == v_out ? -2
                                                              : dual_of_face[fs.face_of_halfedge[h]]);
            corner_h.push_back(h);
        }
        auto& cyc = d.cell[u];
        auto& sides = d.side_edge[u];
        for (int i = 0; i < deg; ++i) {
            int inext = (i + 1) % deg;
            if (corners[i] == -2) {
                // replaced by the boundary vertices of the two bounding edges
                int h_i = corner_h[i];               // out along rot[i]
                int h_n = corner_h[inext];           // out along rot[i+1]
                int b1 = bnd_of_halfedge[h_i] != -1 ? bnd_of_halfedge[h_i]
                                                    : bnd_of_halfedge[he_reverse(h_i)];
                int b2 = bnd_of_halfedge[h_n] != -1 ? bnd_of_halfedge[h_n]
                                                    : bnd_of_halfedge[he_reverse(h_n)];
                if (b1 < 0 || b2 < 0) throw std::runtime_error("boundary bookkeeping failed");
                cyc.push_back(b1);
                sides.push_back(-1);  // boundary-cycle side from b1 to b2
                cyc.push_back(b2);
                sides.push_back(rot[inext]);  // side from b2 to the next corner crosses rot[i+1]
                d.cell_on_boundary[u] = 1;
            } else {
                cyc.push_back(corners[i]);
                sides.push_back(rot[inext]);  // side corners[i] -> corners[i+1] crosses rot[i+1]
            }
        }
    }

    // orient dual edges with b on the right: the side of the white cell
    for (int u = 0; u < V; ++u) {
        if (g.color[u] != 1) continue;
        const auto& cyc = d.cell[u];
        const auto& sides = d.side_edge[u];
        for (size_t i = 0; i < cyc.size(); ++i) {
            int e = sides[i];
            if (e < 0) continue;
            d.edges[e].v_from = cyc[i];
            d.edges[e].v_to = cyc[(i + 1) % cyc.size()];
        }
    }
    for (int e = 0; e < E; ++e)
        if (d.edges[e].v_from == -1) throw std::runtime_error("primal/dual pairing incomplete");
    return d;
}

}  // namespace tembed
