#pragma once

// T-graphs T + alpha^2 O (black faces flatten) and T + conj(alpha^2 O)
// (white faces flatten): construction with degeneracy records, random-walk
// rates including the collapsed-face long jumps, invariant measures, the
// derivative/primitive correspondence with harmonic functions, the backward
// walk, and event-exact trajectory simulation.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tembed/origami.hpp"
#include "tembed/rng.hpp"
#include "tembed/splitting.hpp"

namespace tembed {

enum class TGraphFlavor { BlackFlat, WhiteFlat };  // T + a^2 O vs T + conj(a^2 O)

constexpr double kDegenerateEps = 1e-10;  // threshold on the polygon factor |1 + a^2 eta^2|

struct TGraph {
    TGraphFlavor flavor = TGraphFlavor::BlackFlat;
    cplx alpha = 1.0;
    std::shared_ptr<const Splitting> split;  // splitting of the flat color

    std::vector<cplx> image;        // per dual vertex
    std::vector<int> node_of;       // dual vertex -> node (degenerate faces merge)
    std::vector<cplx> node_pos;
    std::vector<std::vector<int>> node_members;
    std::vector<uint8_t> node_is_sink;

    struct Owner {
        int cell = -1, sub = -1;
    };
    std::vector<Owner> owner;  // per node; cell == -1 for sinks and degenerate nodes

    struct Degenerate {
        int cell = -1;  // collapsed (non-flat color) face
        int node = -1;
        std::vector<int> nbr_cells;   // incident flat faces
        std::vector<int> nbr_nodes;   // far endpoints of their segments
        std::vector<double> mass;     // m_k, summing to 1
    };
    std::vector<Degenerate> degenerates;
    std::vector<int> degenerate_of_node;

    bool flat_color_black() const { return flavor == TGraphFlavor::BlackFlat; }
    int num_nodes() const { return static_cast<int>(node_pos.size()); }

    /// phi of the rotated square root controlling this T-graph's scan.
    static double scan_phi(cplx alpha, cplx eta_value, TGraphFlavor flavor) {
        // black-flat: segments have direction alpha conj(eta_b); the scan runs
        // over arg(alpha eta_w) mod pi. white-flat: conjugate roles.
        return phi_of(flavor == TGraphFlavor::BlackFlat ? alpha * eta_value
                                                        : std::conj(alpha) * eta_value);
    }
};

/// Image of a dual vertex under the T-graph mapping.
inline cplx tgraph_image(const TEmbedding& t, const OrigamiMap& om, cplx alpha, TGraphFlavor fl,
                         int v) {
    cplx a2 = alpha * alpha;
    return fl == TGraphFlavor::BlackFlat ? t.pos[v] + a2 * om.o[v]
                                         : t.pos[v] + std::conj(a2 * om.o[v]);
}

/// Polygon scale factor of a non-flat face; vanishing means a collapsed face.
inline cplx polygon_factor(const OrigamiField& eta, cplx alpha, TGraphFlavor fl, int cell) {
    cplx a2 = alpha * alpha;
    return fl == TGraphFlavor::BlackFlat ? 1.0 + a2 * eta.eta_sq[cell]
                                         : 1.0 + std::conj(a2) * eta.eta_sq[cell];
}

inline TGraph build_tgraph(const TEmbedding& t, const OrigamiField& eta, const OrigamiMap& om,
                           cplx alpha, TGraphFlavor flavor,
                           std::shared_ptr<const Splitting> split) {
    alpha = unit(alpha);
    const uint8_t flat_color = (flavor == TGraphFlavor::BlackFlat) ? 0 : 1;
    if (!split || split->split_color != flat_color)
        throw std::invalid_argument("T-graph needs a splitting of the flat color");
    TGraph tg;
    tg.flavor = flavor;
    tg.alpha = alpha;
    tg.split = std::move(split);
    tg.image.resize(t.num_vertices());
    for (int v = 0; v < t.num_vertices(); ++v)
        tg.image[v] = tgraph_image(t, om, alpha, flavor, v);

    // collapsed faces of the non-flat color
    std::vector<int> collapsed_cells;
    std::vector<int> collapsed_of_vertex(t.num_vertices(), -1);
    for (int u = 0; u < t.num_cells(); ++u) {
        if (t.dual.cell_color[u] == flat_color) continue;
        if (std::abs(polygon_factor(eta, alpha, flavor, u)) < kDegenerateEps) {
            for (int v : t.dual.cell[u]) {
                if (collapsed_of_vertex[v] != -1)
                    throw std::runtime_error("two collapsed faces share a vertex; unsupported");
                collapsed_of_vertex[v] = static_cast<int>(collapsed_cells.size());
            }
            collapsed_cells.push_back(u);
        }
    }
    // nodes: vertices of a collapsed face merge; all other images must be distinct
    double tol = 1e-12 * std::max(1.0, t.diameter());
    std::vector<int> node_of(t.num_vertices(), -1);
    for (int u_idx = 0; u_idx < static_cast<int>(collapsed_cells.size()); ++u_idx) {
        int u = collapsed_cells[u_idx];
        int node = static_cast<int>(tg.node_pos.size());
        tg.node_pos.push_back(tg.image[t.dual.cell[u][0]]);
        tg.node_members.push_back({});
        for (int v : t.dual.cell[u]) {
            if (std::abs(tg.image[v] - tg.node_pos[node]) > tol)
                throw std::runtime_error("collapsed face does not map to a point");
            node_of[v] = node;
            tg.node_members[node].push_back(v);
        }
    }
    for (int v = 0; v < t.num_vertices(); ++v) {
        if (node_of[v] != -1) continue;
        node_of[v] = static_cast<int>(tg.node_pos.size());
        tg.node_pos.push_back(tg.image[v]);
        tg.node_members.push_back({v});
    }
    tg.node_of = node_of;
    tg.node_is_sink.assign(tg.num_nodes(), 0);
    for (int v = 0; v < t.num_vertices(); ++v)
        if (t.dual.is_boundary_vertex[v]) tg.node_is_sink[node_of[v]] = 1;
    // accidental overlaps of interior nodes signal an invalid embedding
    // (boundary vertices may legitimately coincide when a fold runs along the rim)
    {
        std::map<std::pair<long long, long long>, int> seen;
        double q = std::max(tol, 1e-300);
        for (int n = 0; n < tg.num_nodes(); ++n) {
            if (tg.node_is_sink[n]) continue;
            auto key = std::make_pair(static_cast<long long>(std::floor(tg.node_pos[n].real() / q)),
                                      static_cast<long long>(std::floor(tg.node_pos[n].imag() / q)));
            auto [it, fresh] = seen.emplace(key, n);
            if (!fresh && std::abs(tg.node_pos[it->second] - tg.node_pos[n]) < tol)
                throw std::runtime_error(
                    "distinct vertices map to one point outside a collapsed face (overlap)");
        }
    }

    // ownership by the phi-increment scan over the refined star, cross-checked
    // geometrically against strict interiority in the owner's image segment
    tg.owner.assign(tg.num_nodes(), {});
    tg.degenerate_of_node.assign(tg.num_nodes(), -1);
    for (int v = 0; v < t.num_vertices(); ++v) {
        if (t.dual.is_boundary_vertex[v]) continue;
        if (collapsed_of_vertex[v] != -1) continue;  // handled as degenerate nodes
        // refined star: (flat sub-faces | non-flat faces and 2-gons) around v
        struct Entry {
            bool flat;       // flat-color sub-face (contributes its angle)
            int cell, sub;   // for flat entries
            double phi;      // for non-flat entries (and 2-gons)
            double angle;
            double start;    // angular sort key around v
        };
        std::vector<Entry> star;
        for (const auto& se : t.star[v]) {
            int u = se.cell;
            if (t.dual.cell_color[u] != flat_color) {
                // direction of the first side at this corner for sorting
                const auto& cyc = t.dual.cell[u];
                int n = static_cast<int>(cyc.size());
                int i = 0;
                while (cyc[i] != v) ++i;
                double start = std::arg(t.pos[cyc[(i + 1) % n]] - t.pos[v]);
                star.push_back({false, u, -1, TGraph::scan_phi(alpha, eta.eta[u], flavor),
                                se.angle, start});
                continue;
            }
            const FaceSplit& fs = tg.split->at(u);
            for (size_t s = 0; s < fs.subs.size(); ++s) {
                const auto& sub = fs.subs[s];
                for (int k = 0; k < 3; ++k) {
                    if (sub.v[k] != v) continue;
                    cplx d_next = t.pos[sub.v[(k + 1) % 3]] - t.pos[v];
                    cplx d_prev = t.pos[sub.v[(k + 2) % 3]] - t.pos[v];
                    star.push_back({true, u, static_cast<int>(s),
                                    0.0, corner_angle(t.pos[sub.v[(k + 2) % 3]], t.pos[v],
                                                      t.pos[sub.v[(k + 1) % 3]]),
                                    std::arg(d_next)});
                    (void)d_prev;
                }
            }
            // 2-gon diagonals at v
            for (const auto& dg : fs.diagonals) {
                if (dg.va != v && dg.vb != v) continue;
                int other = dg.va == v ? dg.vb : dg.va;
                star.push_back({false, u, -1, TGraph::scan_phi(alpha, dg.eta, flavor), 0.0,
                                std::arg(t.pos[other] - t.pos[v])});
            }
        }
        std::sort(star.begin(), star.end(), [](const Entry& a, const Entry& b) {
            if (a.start != b.start) return a.start < b.start;
            return !a.flat && b.flat;  // zero-angle 2-gons precede the sub opening at the same ray
        });
        // scan: between consecutive non-flat entries sits one flat sub-face;
        // the jump phi_next - phi_prev = pi - angle marks the owner
        std::vector<int> nonflat;
        for (size_t i = 0; i < star.size(); ++i)
            if (!star[i].flat) nonflat.push_back(static_cast<int>(i));
        int m = static_cast<int>(nonflat.size());
        int found = -1;
        for (int j = 0; j < m; ++j) {
            int i1 = nonflat[j], i2 = nonflat[(j + 1) % m];
            // flat entry between them (cyclically)
            int flat_idx = -1;
            for (int i = (i1 + 1) % star.size(); i != i2;
                 i = (i + 1) % static_cast<int>(star.size()))
                if (star[i].flat) flat_idx = i;
            if (flat_idx < 0) continue;  // two non-flat entries back to back (2-gon chains)
            double theta = star[flat_idx].angle;
            double d = star[i2].phi - star[i1].phi + theta;
            long jump = std::lround(d / kPi);
            if (jump != 0) {
                if (found != -1) throw std::runtime_error("phi scan found two jumps at a vertex");
                found = flat_idx;
            }
        }
        if (found < 0) throw std::runtime_error("phi scan found no owner at an interior vertex");
        int node = node_of[v];
        tg.owner[node] = {star[found].cell, star[found].sub};
        // geometric cross-check: the image lies strictly inside the sub-segment
        const auto& sub = tg.split->at(star[found].cell).subs[star[found].sub];
        std::array<cplx, 3> x;
        int self = -1;
        for (int k = 0; k < 3; ++k) {
            x[k] = tg.image[sub.v[k]];
            if (sub.v[k] == v) self = k;
        }
        cplx e1 = x[(self + 1) % 3], e2 = x[(self + 2) % 3];
        double len = std::abs(e2 - e1);
        if (len < tol) throw std::runtime_error("owner segment degenerated");
        double s_par = ((x[self] - e1) / (e2 - e1)).real();
        double off = std::abs(((x[self] - e1) / (e2 - e1)).imag()) * len;
        if (off > 1e-7 * std::max(1.0, len) || s_par < 1e-9 || s_par > 1 - 1e-9)
            throw std::runtime_error("phi-scan owner fails the geometric interiority check");
    }

    // degenerate records; a collapsed face touching the boundary absorbs
    for (int idx = 0; idx < static_cast<int>(collapsed_cells.size()); ++idx) {
        int u = collapsed_cells[idx];
        int node = node_of[t.dual.cell[u][0]];
        if (tg.node_is_sink[node]) continue;
        TGraph::Degenerate dg;
        dg.cell = u;
        dg.node = node;
        double norm = 0.0;
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i) {
            int e = t.dual.side_edge[u][i];
            if (e < 0) throw std::runtime_error("collapsed interior face with a boundary side");
            const auto& er = t.dual.edges[e];
            int bcell = (er.b == u) ? er.w : er.b;
            // far endpoint of the neighbouring segment: the corner image at
            // maximal distance from the collapsed point
            int far = -1;
            double dist = -1.0;
            for (int vv : t.dual.cell[bcell]) {
                double d = std::abs(tg.image[vv] - tg.node_pos[node]);
                if (d > dist) {
                    dist = d;
                    far = vv;
                }
            }
            if (dist < tol) throw std::runtime_error("neighbour of a collapsed face degenerated too");
            dg.nbr_cells.push_back(bcell);
            dg.nbr_nodes.push_back(node_of[far]);
            double w_k = std::abs(t.dT(e)) * dist;
            dg.mass.push_back(w_k);
            norm += w_k;
        }
        for (double& mk : dg.mass) mk /= norm;
        tg.degenerate_of_node[dg.node] = static_cast<int>(tg.degenerates.size());
        tg.degenerates.push_back(dg);
    }
    return tg;
}

// ---------------------------------------------------------------------------
// Walk rates

struct WalkRates {
    struct Transition {
        int target = -1;
        double rate = 0.0;
    };
    std::vector<std::vector<Transition>> out;  // per node; empty for sinks
    std::vector<double> mu;                    // area measure of the owner (sub-)face

    double total_rate(int node) const {
        double s = 0.0;
        for (const auto& tr : out[node]) s += tr.rate;
        return s;
    }
};

inline WalkRates walk_rates(const TEmbedding& t, const TGraph& tg) {
    WalkRates wr;
    wr.out.resize(tg.num_nodes());
    wr.mu.assign(tg.num_nodes(), 0.0);
    for (int n = 0; n < tg.num_nodes(); ++n) {
        if (tg.node_is_sink[n]) continue;
        if (tg.degenerate_of_node[n] >= 0) {
            const auto& dg = tg.degenerates[tg.degenerate_of_node[n]];
            for (size_t k = 0; k < dg.nbr_nodes.size(); ++k) {
                double d = std::abs(tg.node_pos[dg.nbr_nodes[k]] - tg.node_pos[n]);
                wr.out[n].push_back({dg.nbr_nodes[k], dg.mass[k] / (d * d)});
                // invariant mass: total area of the incident flat faces
                std::vector<cplx> poly;
                for (int vv : t.dual.cell[dg.nbr_cells[k]]) poly.push_back(t.pos[vv]);
                wr.mu[n] += polygon_signed_area(poly);
            }
            continue;
        }
        const auto& ow = tg.owner[n];
        if (ow.cell < 0) throw std::runtime_error("interior node without an owner");
        const auto& sub = tg.split->at(ow.cell).subs[ow.sub];
        int self = -1;
        for (int k = 0; k < 3; ++k)
            if (tg.node_of[sub.v[k]] == n) self = k;
        int q1 = tg.node_of[sub.v[(self + 1) % 3]];
        int q2 = tg.node_of[sub.v[(self + 2) % 3]];
        double seg = std::abs(tg.node_pos[q2] - tg.node_pos[q1]);
        wr.out[n].push_back({q1, 1.0 / (std::abs(tg.node_pos[q1] - tg.node_pos[n]) * seg)});
        wr.out[n].push_back({q2, 1.0 / (std::abs(tg.node_pos[q2] - tg.node_pos[n]) * seg)});
        std::vector<cplx> tri{t.pos[sub.v[0]], t.pos[sub.v[1]], t.pos[sub.v[2]]};
        wr.mu[n] = polygon_signed_area(tri);
    }
    return wr;
}

/// Tangent-formula rates at a triangle-backed vertex (cross-check for
/// walk_rates): q(v_A -> v_B) = (tan phi_{w_A} - tan phi_{w_C}) / (8 S_b).
/// Returns rates keyed by target node.
inline std::map<int, double> tangent_rates(const TEmbedding& t, const TGraph& tg, int node) {
    const auto& ow = tg.owner[node];
    if (ow.cell < 0) throw std::invalid_argument("node has no owning face");
    const FaceSplit& fs = tg.split->at(ow.cell);
    const auto& sub = fs.subs[ow.sub];
    int self = -1;
    for (int k = 0; k < 3; ++k)
        if (tg.node_of[sub.v[k]] == node) self = k;
    // sides: side k runs v[k] -> v[k+1]; the face across side k is opposite v[k+2]
    auto phi_across = [&](int k) {
        const auto& side = sub.side[k];
        return TGraph::scan_phi(tg.alpha, side.eta_dir, tg.flavor);
    };
    std::vector<cplx> tri{t.pos[sub.v[0]], t.pos[sub.v[1]], t.pos[sub.v[2]]};
    double area = polygon_signed_area(tri);
    // A = self; B = self+1; C = self+2 (ccw). w_A is across side (B -> C) =
    // side (self+1); w_B across side (self+2); w_C across side (self).
    double phi_a = phi_across((self + 1) % 3);
    double phi_b = phi_across((self + 2) % 3);
    double phi_c = phi_across(self % 3);
    std::map<int, double> out;
    out[tg.node_of[sub.v[(self + 1) % 3]]] = (std::tan(phi_a) - std::tan(phi_c)) / (8.0 * area);
    out[tg.node_of[sub.v[(self + 2) % 3]]] = (std::tan(phi_b) - std::tan(phi_a)) / (8.0 * area);
    return out;
}

// ---------------------------------------------------------------------------
// Harmonicity, derivative and primitives

struct HarmonicReport {
    double max_residual = 0.0;
    int worst_node = -1;
};

inline HarmonicReport check_harmonic(const WalkRates& wr, const std::vector<double>& h) {
    HarmonicReport rep;
    for (size_t n = 0; n < wr.out.size(); ++n) {
        if (wr.out[n].empty()) continue;
        KahanSum acc;
        for (const auto& tr : wr.out[n]) acc.add(tr.rate * (h[tr.target] - h[n]));
        double r = std::abs(acc.value());
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_node = static_cast<int>(n);
        }
    }
    return rep;
}

struct DerivativeField {
    // per flat (sub-)face of the splitting: slope along the segment
    std::map<std::pair<int, int>, cplx> on_flat;     // (cell, sub) -> D
    std::map<std::pair<int, int>, cplx> on_polygon;  // (cell, sub) -> D for the non-flat color
    double max_affine_residual = 0.0;  // non-affineness of h along segments
};

/// Derivative of a real-valued harmonic function on the T-graph: dH = D dz
/// along flattened segments, dH = Re(D dz) on polygon faces (affine fit per
/// sub-face of the opposite splitting for faces of degree > 3; collapsed
/// faces solve the three-projection system).
inline DerivativeField derivative_D(const TEmbedding& t, const OrigamiField& eta, const TGraph& tg,
                                    const Splitting& opposite_split, const std::vector<double>& h) {
    DerivativeField df;
    const uint8_t flat_color = tg.flat_color_black() ? 0 : 1;
    for (const auto& [cell, fs] : tg.split->faces) {
        for (size_t s = 0; s < fs.subs.size(); ++s) {
            const auto& sub = fs.subs[s];
            std::array<cplx, 3> x;
            std::array<double, 3> hv;
            for (int k = 0; k < 3; ++k) {
                x[k] = tg.node_pos[tg.node_of[sub.v[k]]];
                hv[k] = h[tg.node_of[sub.v[k]]];
            }
            // pick the two farthest-apart points for the slope
            int a = 0, b = 1;
            double best = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    if (std::abs(x[j] - x[i]) > best) {
                        best = std::abs(x[j] - x[i]);
                        a = i;
                        b = j;
                    }
            if (best == 0.0) continue;  // fully collapsed segment
            cplx d = (hv[b] - hv[a]) / (x[b] - x[a]);
            int c = 3 - a - b;
            double interp = hv[a] + (d * (x[c] - x[a])).real();
            df.max_affine_residual = std::max(df.max_affine_residual, std::abs(hv[c] - interp));
            df.on_flat[{cell, static_cast<int>(s)}] = d;
        }
    }
    // polygon faces via the opposite-color splitting
    if (opposite_split.split_color == flat_color)
        throw std::invalid_argument("derivative needs the splitting of the non-flat color");
    for (const auto& [cell, fs] : opposite_split.faces) {
        bool collapsed = std::abs(polygon_factor(eta, tg.alpha, tg.flavor, cell)) < kDegenerateEps;
        for (size_t s = 0; s < fs.subs.size(); ++s) {
            const auto& sub = fs.subs[s];
            if (!collapsed) {
                // affine fit Re(conj(g) == no: h = c0 + Re(D z) on the image
                Eigen::Matrix3d A;
                Eigen::Vector3d rhs;
                for (int k = 0; k < 3; ++k) {
                    cplx z = tg.node_pos[tg.node_of[sub.v[k]]];
                    A(k, 0) = z.real();
                    A(k, 1) = -z.imag();
                    A(k, 2) = 1.0;
                    rhs[k] = h[tg.node_of[sub.v[k]]];
                }
                Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
                if (!lu.isInvertible()) continue;  // degenerate image triangle
                Eigen::Vector3d sol = lu.solve(rhs);
                df.on_polygon[{cell, static_cast<int>(s)}] = cplx(sol[0], sol[1]);
            } else {
                // solve Pr(D, dir_k R) = D_flat(b_k) over the adjacent flat faces
                std::vector<cplx> dirs;
                std::vector<cplx> vals;
                for (int k = 0; k < 3; ++k) {
                    const auto& side = sub.side[k];
                    if (side.primal_edge < 0) continue;
                    const auto& er = t.dual.edges[side.primal_edge];
                    int bcell = (er.b == cell) ? er.w : er.b;
                    auto it = tg.split->faces.find(bcell);
                    if (it == tg.split->faces.end()) continue;
                    int bsub = sub_of_edge(*tg.split, bcell, side.primal_edge);
                    auto dv = df.on_flat.find({bcell, bsub});
                    if (dv == df.on_flat.end()) continue;
                    // the segment of bcell has direction alpha conj(eta) (black-flat);
                    // D lives on the conjugate line
                    cplx seg_dir = tg.flat_color_black()
                                       ? tg.alpha * std::conj(side.eta_dir)
                                       : std::conj(tg.alpha) * std::conj(side.eta_dir);
                    dirs.push_back(std::conj(seg_dir));
                    vals.push_back(dv->second);
                }
                if (dirs.size() < 2) continue;
                Eigen::MatrixXd A(dirs.size(), 2);
                Eigen::VectorXd rhs(dirs.size());
                for (size_t k = 0; k < dirs.size(); ++k) {
                    A(k, 0) = dirs[k].real();
                    A(k, 1) = dirs[k].imag();
                    rhs[k] = project_coeff(vals[k], dirs[k]);
                }
                Eigen::Vector2d sol =
                    (A.transpose() * A).ldlt().solve(A.transpose() * rhs);
                df.on_polygon[{cell, static_cast<int>(s)}] = cplx(sol[0], sol[1]);
            }
        }
    }
    return df;
}

// ---------------------------------------------------------------------------
// Backward walk structure (white-flat T + conj(O), alpha = 1)

struct BackwardStructure {
    // per interior dual vertex: the white face carrying the negative increment
    std::vector<int> w_of_vertex;                 // -1 when undefined
    struct Entry {
        int white_cell;
        double p;  // transition probability
        double q;  // transition rate (tan increments / 8 S_{w(v)})
    };
    std::vector<std::vector<Entry>> transitions;  // per dual vertex
};

/// Builds the time-reversal structure on T + conj(O) for a triangulation:
/// around each interior vertex the coefficients tan(phi_{b_{k-1}}) -
/// tan(phi_{b_k}) are positive except exactly one, which identifies w(v).
inline BackwardStructure backward_structure(const TEmbedding& t, const OrigamiField& eta) {
    BackwardStructure bs;
    bs.w_of_vertex.assign(t.num_vertices(), -1);
    bs.transitions.resize(t.num_vertices());
    for (int v = 0; v < t.num_vertices(); ++v) {
        if (!t.is_interior_vertex(v)) continue;
        const auto& fan = t.star[v];
        const int m = static_cast<int>(fan.size());
        bool boundary_touch = false;
        for (const auto& se : fan)
            if (t.dual.cell_on_boundary[se.cell]) boundary_touch = true;
        if (boundary_touch) continue;  // V' differs from V only at the boundary
        // whites w_k with black b_k after them (ccw); coefficient of w_k is
        // tan(phi_{b_{k-1}}) - tan(phi_{b_k})
        std::vector<int> whites, blacks;
        int start = t.black_cell(fan[0].cell) ? 1 : 0;
        for (int i = 0; i < m; i += 2) {
            whites.push_back(fan[(start + i) % m].cell);
            blacks.push_back(fan[(start + i + 1) % m].cell);
        }
        const int k = static_cast<int>(whites.size());
        std::vector<double> coef(k);
        int neg = -1;
        for (int j = 0; j < k; ++j) {
            double phi_prev = eta.phi[blacks[(j - 1 + k) % k]];
            double phi_next = eta.phi[blacks[j]];
            if (std::abs(std::abs(phi_prev) - kPi / 2) < 1e-12 ||
                std::abs(std::abs(phi_next) - kPi / 2) < 1e-12)
                throw std::runtime_error("degenerate black face (Re eta = 0); backward structure "
                                         "needs a generic alpha");
            coef[j] = std::tan(phi_prev) - std::tan(phi_next);
            if (coef[j] < 0) {
                if (neg != -1) throw std::runtime_error("two negative tan increments at a vertex");
                neg = j;
            }
        }
        if (neg < 0) throw std::runtime_error("no negative tan increment at an interior vertex");
        bs.w_of_vertex[v] = whites[neg];
        double s_w = t.cell_area[whites[neg]];
        for (int j = 0; j < k; ++j) {
            if (j == neg) continue;
            bs.transitions[v].push_back({whites[j], coef[j] / (-coef[neg]), coef[j] / (8.0 * s_w)});
        }
    }
    return bs;
}

/// Residual of the backward-harmonicity identity
/// sum_k Im(F(w_k)) (tan phi_{b_{k-1}} - tan phi_{b_k}) = 0 at a vertex, for
/// values F per white cell.
inline double backward_identity_residual(const TEmbedding& t, const OrigamiField& eta, int v,
                                         const std::function<cplx(int)>& f_white) {
    const auto& fan = t.star[v];
    const int m = static_cast<int>(fan.size());
    int start = t.black_cell(fan[0].cell) ? 1 : 0;
    std::vector<int> whites, blacks;
    for (int i = 0; i < m; i += 2) {
        whites.push_back(fan[(start + i) % m].cell);
        blacks.push_back(fan[(start + i + 1) % m].cell);
    }
    const int k = static_cast<int>(whites.size());
    KahanSum acc;
    for (int j = 0; j < k; ++j) {
        double c = std::tan(eta.phi[blacks[(j - 1 + k) % k]]) - std::tan(eta.phi[blacks[j]]);
        acc.add(f_white(whites[j]).imag() * c);
    }
    return std::abs(acc.value());
}

// ---------------------------------------------------------------------------
// Event-exact trajectory simulation

struct WalkGraphView {
    // transitions with displacements; finite graphs have zero-displacement
    // bookkeeping handled by positions alone
    const WalkRates* rates = nullptr;
    const std::vector<cplx>* pos = nullptr;
    const std::vector<uint8_t>* is_sink = nullptr;
};

struct Trajectory {
    std::vector<int> nodes;
    std::vector<double> times;
    std::vector<cplx> positions;
    bool absorbed = false;
};

inline Trajectory simulate_walk(const WalkRates& wr, const std::vector<cplx>& pos,
                                const std::vector<uint8_t>& is_sink, int start, double horizon,
                                uint64_t seed, uint64_t walker_id) {
    if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
    RngStream rng(seed, walker_id);
    Trajectory out;
    int v = start;
    double time = 0.0;
    out.nodes.push_back(v);
    out.times.push_back(0.0);
    out.positions.push_back(pos[v]);
    while (true) {
        if (is_sink[v] || wr.out[v].empty()) {
            out.absorbed = true;
            return out;
        }
        double total = wr.total_rate(v);
        double dt = rng.exponential(total);
        if (time + dt > horizon) return out;
        time += dt;
        std::vector<double> w;
        w.reserve(wr.out[v].size());
        for (const auto& tr : wr.out[v]) w.push_back(tr.rate);
        v = wr.out[v][rng.pick_weighted(w, total)].target;
        out.nodes.push_back(v);
        out.times.push_back(time);
        out.positions.push_back(pos[v]);
    }
}

}  // namespace tembed
