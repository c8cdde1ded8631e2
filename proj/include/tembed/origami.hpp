#pragma once

// Origami square root function eta (stored as eta^2 plus a sign section on a
// spanning tree, since eta lives on a double cover), the origami map O, the
// angles phi, and the Lip / Exp-Fat assumption reports.

#include <optional>
#include <queue>
#include <vector>

#include "tembed/core.hpp"
#include "tembed/embedding.hpp"
#include "tembed/rng.hpp"

namespace tembed {

struct OrigamiField {
    std::vector<cplx> eta;        // one chosen square root per cell (sign section)
    std::vector<cplx> eta_sq;     // globally single-valued
    std::vector<double> phi;      // arg(eta) mod pi, in (-pi/2, pi/2]
    std::vector<int> branch_edges;     // non-tree primal edges whose sign holonomy is -1
    std::vector<int> branch_vertices;  // interior dual vertices with deg in 4Z
    double max_defining_residual = 0.0;  // | eta_b eta_w conj(tau) -+ 1 | over edges

    cplx eta_at(int cell) const { return eta[cell]; }
};

inline double phi_of(cplx eta_value) {
    double p = std::arg(eta_value);
    while (p <= -kPi / 2) p += kPi;
    while (p > kPi / 2) p -= kPi;
    return p;
}

/// Computes eta from the defining relation conj(eta_b) conj(eta_w) =
/// dT(bw*) / |dT(bw*)| by BFS over cells. gauge_cell's eta is pinned to
/// gauge_value (default: lowest-id white cell gets 1).
inline OrigamiField compute_eta(const TEmbedding& t, int gauge_cell = -1, cplx gauge_value = 1.0,
                                double tol = 1e-9) {
    const int U = t.num_cells();
    if (gauge_cell < 0) {
        for (int u = 0; u < U; ++u)
            if (!t.black_cell(u)) {
                gauge_cell = u;
                break;
            }
    }
    OrigamiField f;
    f.eta.assign(U, cplx(0, 0));
    f.eta_sq.assign(U, cplx(0, 0));
    f.phi.assign(U, 0.0);
    std::vector<uint8_t> known(U, 0);
    std::vector<std::vector<std::pair<int, int>>> inc(U);  // (edge, other)
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        inc[er.b].push_back({static_cast<int>(e), er.w});
        inc[er.w].push_back({static_cast<int>(e), er.b});
    }
    f.eta[gauge_cell] = unit(gauge_value);
    known[gauge_cell] = 1;
    std::queue<int> q;
    q.push(gauge_cell);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (auto [e, u2] : inc[u]) {
            cplx tau = unit(t.dT(e));  // = conj(eta_b) conj(eta_w)
            // eta_other = conj(tau) * conj(eta_this), for either color
            cplx val = std::conj(tau) * std::conj(f.eta[u]);
            if (!known[u2]) {
                f.eta[u2] = val;
                known[u2] = 1;
                q.push(u2);
            } else {
                double r_plus = std::abs(f.eta[u2] - val);
                double r_minus = std::abs(f.eta[u2] + val);
                double resid = std::min(r_plus, r_minus);
                f.max_defining_residual = std::max(f.max_defining_residual, resid);
                if (resid > tol)
                    throw std::runtime_error("eta^2 is not single-valued (invalid t-embedding)");
                if (r_minus < r_plus) f.branch_edges.push_back(e);
            }
        }
    }
    for (int u = 0; u < U; ++u) {
        if (!known[u]) throw std::runtime_error("dimer graph is not connected");
        f.eta_sq[u] = f.eta[u] * f.eta[u];
        f.phi[u] = phi_of(f.eta[u]);
    }
    for (int v = 0; v < t.num_vertices(); ++v)
        if (t.is_interior_vertex(v) && t.star[v].size() % 4 == 0) f.branch_vertices.push_back(v);
    return f;
}

// ---------------------------------------------------------------------------
// Origami map

struct OrigamiMap {
    std::vector<cplx> o;     // per dual vertex
    int base_vertex = 0;
    double max_closure_residual = 0.0;  // relative to cycle length

    cplx at(int v) const { return o[v]; }
};

/// dO on the primal edge e = (b, w): eta_w^2 dT(bw*) = conj(eta_b)^2 conj(dT).
inline cplx origami_increment(const TEmbedding& t, const OrigamiField& eta, int e) {
    return eta.eta_sq[t.dual.edges[e].w] * t.dT(e);
}

/// Integrates the origami form over the dual graph from base_vertex, checking
/// closure over every non-tree edge (including boundary-cycle sides, which
/// take the rotation of their unique incident cell).
inline OrigamiMap compute_origami(const TEmbedding& t, const OrigamiField& eta, int base_vertex = 0,
                                  double tol = 1e-12) {
    struct Arc {
        int to;
        cplx inc;
        double len;
    };
    std::vector<std::vector<Arc>> adj(t.num_vertices());
    auto add = [&](int v1, int v2, cplx d_o) {
        adj[v1].push_back({v2, d_o, std::abs(d_o)});
        adj[v2].push_back({v1, -d_o, std::abs(d_o)});
    };
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        add(er.v_from, er.v_to, origami_increment(t, eta, static_cast<int>(e)));
    }
    // boundary-cycle sides: one incident cell; use its face rotation
    for (int u = 0; u < t.num_cells(); ++u) {
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i) {
            if (t.dual.side_edge[u][i] != -1) continue;
            int v1 = cyc[i], v2 = cyc[(i + 1) % cyc.size()];
            cplx dz = t.pos[v2] - t.pos[v1];
            cplx d_o = t.black_cell(u) ? std::conj(eta.eta_sq[u]) * std::conj(dz)
                                       : eta.eta_sq[u] * dz;
            add(v1, v2, d_o);
        }
    }
    OrigamiMap om;
    om.base_vertex = base_vertex;
    om.o.assign(t.num_vertices(), cplx(0, 0));
    std::vector<uint8_t> known(t.num_vertices(), 0);
    std::vector<double> dist(t.num_vertices(), 0.0);  // tree path length, for scaling residuals
    known[base_vertex] = 1;
    std::queue<int> q;
    q.push(base_vertex);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& a : adj[v]) {
            if (!known[a.to]) {
                om.o[a.to] = om.o[v] + a.inc;
                dist[a.to] = dist[v] + a.len;
                known[a.to] = 1;
                q.push(a.to);
            } else {
                double cyc_len = dist[v] + dist[a.to] + a.len;
                double resid = std::abs(om.o[a.to] - (om.o[v] + a.inc));
                if (cyc_len > 0.0) {
                    double rel = resid / cyc_len;
                    om.max_closure_residual = std::max(om.max_closure_residual, rel);
                    if (rel > tol)
                        throw std::runtime_error("origami form is not closed on a cycle (residual " +
                                                 std::to_string(rel) + " per unit length)");
                }
            }
        }
    }
    for (int v = 0; v < t.num_vertices(); ++v)
        if (!known[v]) throw std::runtime_error("dual graph is not connected");
    return om;
}

// ---------------------------------------------------------------------------
// Assumption reports

struct LipschitzRow {
    double r;         // pair-distance threshold, in units of length
    double kappa;     // minimal valid Lipschitz constant over pairs at distance >= r
    long pairs = 0;
};

struct FatComponentRow {
    double beta;
    double rho;               // removal threshold exp(-beta/delta)
    int n_thin_cells = 0;
    int n_components = 0;
    double max_component_diameter = 0.0;
};

struct AssumptionReport {
    double delta = 0.0;  // mesh scale (max cell diameter)
    std::vector<LipschitzRow> lip;
    std::vector<FatComponentRow> fat;
    uint64_t sample_seed = 0;
    bool sampled = false;  // true when pair scan fell back to sampling
    cplx region_center;
    double region_radius = 0.0;  // 0: whole embedding
};

/// Empirical Lip(kappa, delta) and Exp-Fat(delta) measurements. Fat-face
/// radii use the inradius (triangles exactly, general convex faces by the
/// Chebyshev radius). Components of thin cells are vertex-connected.
inline AssumptionReport check_assumptions(const TEmbedding& t, const OrigamiMap& om,
                                          const std::vector<double>& r_grid,
                                          const std::vector<double>& beta_grid,
                                          uint64_t seed = 1, size_t max_pairs = 1000000,
                                          std::optional<std::pair<cplx, double>> region = {}) {
    AssumptionReport rep;
    rep.delta = t.mesh_delta();
    rep.sample_seed = seed;
    if (region) {
        rep.region_center = region->first;
        rep.region_radius = region->second;
    }
    auto in_region = [&](int v) {
        return !region || std::abs(t.pos[v] - region->first) <= region->second;
    };

    const int V = t.num_vertices();
    std::vector<int> verts;
    for (int v = 0; v < V; ++v)
        if (in_region(v)) verts.push_back(v);
    const size_t nv = verts.size();
    size_t all_pairs = nv * (nv - 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    if (all_pairs <= max_pairs) {
        pairs.reserve(all_pairs);
        for (size_t i = 0; i < nv; ++i)
            for (size_t j = i + 1; j < nv; ++j) pairs.push_back({verts[i], verts[j]});
    } else {
        rep.sampled = true;
        RngStream rng(seed, 3);
        pairs.reserve(max_pairs);
        for (size_t k = 0; k < max_pairs; ++k) {
            int i = verts[rng.next_u64() % nv];
            int j = verts[rng.next_u64() % nv];
            if (i != j) pairs.push_back({std::min(i, j), std::max(i, j)});
        }
    }
    for (double r : r_grid) {
        LipschitzRow row;
        row.r = r;
        row.kappa = 0.0;
        for (auto [i, j] : pairs) {
            double dz = std::abs(t.pos[i] - t.pos[j]);
            if (dz < r) continue;
            row.pairs++;
            row.kappa = std::max(row.kappa, std::abs(om.o[i] - om.o[j]) / dz);
        }
        rep.lip.push_back(row);
    }

    // thin-cell components per beta
    std::vector<double> rho_cell(t.num_cells());
    for (int u = 0; u < t.num_cells(); ++u) rho_cell[u] = polygon_inradius(t.cell_polygon(u));
    // cell adjacency through shared dual vertices
    std::vector<std::vector<int>> cells_at(V);
    for (int u = 0; u < t.num_cells(); ++u)
        for (int v : t.dual.cell[u]) cells_at[v].push_back(u);
    for (double beta : beta_grid) {
        FatComponentRow row;
        row.beta = beta;
        row.rho = std::exp(-beta / rep.delta);
        std::vector<uint8_t> thin(t.num_cells(), 0);
        for (int u = 0; u < t.num_cells(); ++u) thin[u] = rho_cell[u] < row.rho ? 1 : 0;
        std::vector<int> comp(t.num_cells(), -1);
        for (int u0 = 0; u0 < t.num_cells(); ++u0) {
            if (!thin[u0] || comp[u0] != -1) continue;
            int c = row.n_components++;
            std::vector<int> stack{u0};
            comp[u0] = c;
            std::vector<int> members;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                members.push_back(u);
                for (int v : t.dual.cell[u])
                    for (int u2 : cells_at[v])
                        if (thin[u2] && comp[u2] == -1) {
                            comp[u2] = c;
                            stack.push_back(u2);
                        }
            }
            double diam = 0.0;
            std::vector<cplx> pts;
            for (int u : members)
                for (int v : t.dual.cell[u]) pts.push_back(t.pos[v]);
            for (size_t i = 0; i < pts.size(); ++i)
                for (size_t j = i + 1; j < pts.size(); ++j)
                    diam = std::max(diam, std::abs(pts[i] - pts[j]));
            row.max_component_diameter = std::max(row.max_component_diameter, diam);
            row.n_thin_cells += static_cast<int>(members.size());
        }
        rep.fat.push_back(row);
    }
    return rep;
}

}  // namespace tembed
