#pragma once

// Kasteleyn inversion, exact matching enumeration (the brute-force oracle),
// determinantal probabilities, exact sampling, Thurston height functions and
// height-fluctuation correlations.

#include <Eigen/Dense>
#include <map>
#include <set>
#include <vector>

#include "tembed/core.hpp"
#include "tembed/embedding.hpp"
#include "tembed/rng.hpp"

namespace tembed {

// ---------------------------------------------------------------------------
// Inversion

struct CouplingMatrix {
    KasteleynMatrix km;
    Eigen::MatrixXcd inv;      // |W| x |B|
    double inverse_residual = 0.0;  // max |K*inv - I|
    double condition_estimate = 0.0;
    cplx log_abs_det = 0.0;    // log|det K| (real part carries the value)

    cplx K(int b_cell, int w_cell) const { return km.entry(b_cell, w_cell); }
    cplx Kinv(int w_cell, int b_cell) const { return inv(km.col_of[w_cell], km.row_of[b_cell]); }
};

inline CouplingMatrix invert_kasteleyn(const KasteleynMatrix& km) {
    CouplingMatrix cm;
    cm.km = km;
    const auto& K = km.K;
    if (K.rows() != K.cols())
        throw std::invalid_argument("Kasteleyn matrix is rectangular: |B| != |W|");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(K);
    // log|det| from the diagonal of U
    double log_abs = 0.0;
    bool singular = false;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        double d = std::abs(lu.matrixLU()(i, i));
        if (d == 0.0) singular = true;
        else log_abs += std::log(d);
    }
    if (singular) throw std::runtime_error("Kasteleyn matrix is singular (no perfect matching?)");
    cm.log_abs_det = log_abs;
    cm.inv = lu.solve(Eigen::MatrixXcd::Identity(K.rows(), K.cols()));
    cm.inverse_residual = (K * cm.inv - Eigen::MatrixXcd::Identity(K.rows(), K.cols()))
                              .cwiseAbs()
                              .maxCoeff();
    double n1 = K.cwiseAbs().colwise().sum().maxCoeff();
    double n2 = cm.inv.cwiseAbs().colwise().sum().maxCoeff();
    cm.condition_estimate = n1 * n2;
    if (cm.condition_estimate > 1e10 || cm.inverse_residual > 1e-8)
        throw std::runtime_error("Kasteleyn matrix numerically singular (cond ~ " +
                                 std::to_string(cm.condition_estimate) + ")");
    return cm;
}

// ---------------------------------------------------------------------------
// Enumeration oracle

struct MatchingList {
    std::vector<std::vector<int>> matchings;  // edge ids
    std::vector<double> weights;              // product of edge weights
    double z = 0.0;                           // partition function

    std::vector<double> probabilities() const {
        std::vector<double> p(weights.size());
        for (size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / z;
        return p;
    }
};

inline MatchingList enumerate_matchings(const DimerGraph& g, size_t max_edges = 24) {
    if (g.edges.size() > max_edges)
        throw std::invalid_argument("graph too large for exhaustive matching enumeration");
    int n_black = 0;
    for (auto c : g.color) n_black += (c == 0);
    std::vector<int> blacks;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.is_black(v)) blacks.push_back(v);
    MatchingList out;
    std::vector<uint8_t> used(g.num_vertices(), 0);
    std::vector<int> chosen;
    std::function<void(int, double)> rec = [&](int k, double wgt) {
        if (k == n_black) {
            out.matchings.push_back(chosen);
            out.weights.push_back(wgt);
            out.z += wgt;
            return;
        }
        int b = blacks[k];
        for (int e : g.rotation[b]) {
            int w = g.edges[e].w;
            if (used[w]) continue;
            used[w] = 1;
            chosen.push_back(e);
            rec(k + 1, wgt * g.edges[e].x);
            chosen.pop_back();
            used[w] = 0;
        }
    };
    int n_white = g.num_vertices() - n_black;
    if (n_black == n_white) rec(0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Determinantal probabilities

/// P(all edges present) = det[Kinv(w_j, b_k)] * prod_k K(b_k, w_k).
inline double matching_probability(const CouplingMatrix& cm, const TEmbedding& t,
                                   const std::vector<int>& edge_ids) {
    const int n = static_cast<int>(edge_ids.size());
    if (n == 0) return 1.0;
    std::set<int> verts;
    for (int e : edge_ids) {
        const auto& er = t.dual.edges[e];
        if (!verts.insert(er.b).second || !verts.insert(er.w).second)
            throw std::invalid_argument("edges must be pairwise vertex-disjoint");
    }
    Eigen::MatrixXcd M(n, n);
    cplx pref = 1.0;
    for (int j = 0; j < n; ++j) {
        const auto& ej = t.dual.edges[edge_ids[j]];
        pref *= cm.K(ej.b, ej.w);
        for (int k = 0; k < n; ++k) {
            const auto& ek = t.dual.edges[edge_ids[k]];
            M(j, k) = cm.Kinv(ej.w, ek.b);
        }
    }
    cplx p = M.determinant() * pref;
    if (std::abs(p.imag()) > 1e-8 * (1.0 + std::abs(p.real())))
        throw std::runtime_error("matching probability has a large imaginary part");
    return p.real();
}

// ---------------------------------------------------------------------------
// Exact sampling via sequential conditionals and rank-1 updates

inline std::vector<int> sample_matching(const CouplingMatrix& cm, const TEmbedding& t,
                                        uint64_t seed) {
    const int n = static_cast<int>(cm.km.whites.size());
    Eigen::MatrixXcd A = cm.inv;  // A(w_col, b_row) = Kinv, updated in place
    RngStream rng(seed, 17);
    std::vector<int> result;
    std::vector<uint8_t> black_used(n, 0);
    // incident black rows per white column, with edge ids
    std::vector<std::vector<std::pair<int, int>>> inc(n);  // (b_row, edge id)
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        inc[cm.km.col_of[er.w]].push_back({cm.km.row_of[er.b], static_cast<int>(e)});
    }
    for (int wi = 0; wi < n; ++wi) {
        std::vector<double> p;
        std::vector<std::pair<int, int>> avail;
        double total = 0.0;
        for (auto [bi, e] : inc[wi]) {
            if (black_used[bi]) continue;
            cplx prob = cm.km.K(bi, wi) * A(wi, bi);
            double pr = prob.real();
            if (pr < -1e-8 || pr > 1.0 + 1e-8 || std::abs(prob.imag()) > 1e-8)
                throw std::runtime_error("conditional probability out of range; numerics degraded");
            pr = std::clamp(pr, 0.0, 1.0);
            avail.push_back({bi, e});
            p.push_back(pr);
            total += pr;
        }
        if (avail.empty() || total < 1e-9)
            throw std::runtime_error("sampler stuck: no available partner");
        size_t pick = rng.pick_weighted(p, total);
        auto [bi, e] = avail[pick];
        result.push_back(e);
        black_used[bi] = 1;
        // Schur update conditioning on edge (bi, wi):
        // A'(w, b) = A(w, b) - A(w, bi) * A(wi, b) / A(wi, bi)
        cplx pivot = A(wi, bi);
        if (std::abs(pivot) < 1e-300) throw std::runtime_error("sampler pivot vanished");
        Eigen::VectorXcd col = A.col(bi), row = A.row(wi);
        A.noalias() -= (col / pivot) * row.transpose();
        A.row(wi).setZero();
        A.col(bi).setZero();
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ---------------------------------------------------------------------------
// Height functions

struct HeightField {
    std::vector<long> h;  // per dual vertex, h(base) = 0
    int base_vertex = 0;
};

/// Thurston height of matching P relative to P0: the primitive of the flow
/// P - P0 across dual edges (+1 across bw* with b on the right when bw is
/// used). Exact integer arithmetic; divergence-free by construction and
/// verified on every non-tree dual edge.
inline HeightField height_function(const TEmbedding& t, const std::vector<int>& matching,
                                   const std::vector<int>& reference, int base_vertex = 0) {
    auto check_perfect = [&](const std::vector<int>& m) {
        std::vector<int> cover(t.num_cells(), 0);
        for (int e : m) {
            cover[t.dual.edges[e].b]++;
            cover[t.dual.edges[e].w]++;
        }
        for (int u = 0; u < t.num_cells(); ++u)
            if (cover[u] != 1) throw std::invalid_argument("not a perfect matching");
    };
    check_perfect(matching);
    check_perfect(reference);
    std::vector<int> flow(t.dual.edges.size(), 0);  // along v_from -> v_to
    for (int e : matching) flow[e] += 1;
    for (int e : reference) flow[e] -= 1;

    HeightField hf;
    hf.base_vertex = base_vertex;
    hf.h.assign(t.num_vertices(), 0);
    std::vector<uint8_t> known(t.num_vertices(), 0);
    std::vector<std::vector<std::pair<int, long>>> adj(t.num_vertices());
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        adj[er.v_from].push_back({er.v_to, flow[e]});
        adj[er.v_to].push_back({er.v_from, -flow[e]});
    }
    // boundary-cycle sides carry zero flow
    for (int u = 0; u < t.num_cells(); ++u) {
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i)
            if (t.dual.side_edge[u][i] == -1) {
                adj[cyc[i]].push_back({cyc[(i + 1) % cyc.size()], 0});
                adj[cyc[(i + 1) % cyc.size()]].push_back({cyc[i], 0});
            }
    }
    known[base_vertex] = 1;
    std::queue<int> q;
    q.push(base_vertex);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [v2, dh] : adj[v]) {
            if (!known[v2]) {
                hf.h[v2] = hf.h[v] + dh;
                known[v2] = 1;
                q.push(v2);
            } else if (hf.h[v2] != hf.h[v] + dh) {
                throw std::runtime_error("height flow is not divergence-free");
            }
        }
    }
    return hf;
}

// ---------------------------------------------------------------------------
// Height-fluctuation correlations

struct DualPath {
    std::vector<int> vertices;
    std::vector<int> edges;   // primal edge ids crossed
    std::vector<int> signs;   // +1 if the black cell is to the right of the step
};

/// Shortest dual path between two vertices avoiding `blocked` vertices and
/// boundary-cycle sides.
inline DualPath dual_path(const TEmbedding& t, int from, int to,
                          const std::set<int>& blocked = {}) {
    std::vector<int> prev_v(t.num_vertices(), -1), prev_e(t.num_vertices(), -1);
    std::vector<uint8_t> seen(t.num_vertices(), 0);
    std::vector<std::vector<std::pair<int, int>>> adj(t.num_vertices());  // (other, edge)
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        adj[er.v_from].push_back({er.v_to, static_cast<int>(e)});
        adj[er.v_to].push_back({er.v_from, static_cast<int>(e)});
    }
    std::queue<int> q;
    seen[from] = 1;
    q.push(from);
    while (!q.empty() && !seen[to]) {
        int v = q.front();
        q.pop();
        for (auto [v2, e] : adj[v]) {
            if (seen[v2] || blocked.count(v2)) continue;
            seen[v2] = 1;
            prev_v[v2] = v;
            prev_e[v2] = e;
            q.push(v2);
        }
    }
    if (!seen[to]) throw std::runtime_error("no dual path between the requested vertices");
    DualPath p;
    for (int v = to; v != from; v = prev_v[v]) {
        p.vertices.push_back(v);
        p.edges.push_back(prev_e[v]);
        p.signs.push_back(t.dual.edges[prev_e[v]].v_to == v ? +1 : -1);
    }
    p.vertices.push_back(from);
    std::reverse(p.vertices.begin(), p.vertices.end());
    std::reverse(p.edges.begin(), p.edges.end());
    std::reverse(p.signs.begin(), p.signs.end());
    return p;
}

struct CorrelationResult {
    double value = 0.0;    // E[ prod_k (h(v_k) - h(anchor_k)) ], centered
    int n = 0;
    std::vector<DualPath> paths;
    bool paths_disjoint = true;
};

/// Differenced height correlations E[prod (hbar(v_k) - hbar(anchor_k))],
/// evaluated by summing the fixed-point-free determinant expansion of the
/// coupling function over edge tuples along the dual paths.
inline CorrelationResult height_correlations(const CouplingMatrix& cm, const TEmbedding& t,
                                             const std::vector<int>& points,
                                             const std::vector<int>& anchors) {
    const int n = static_cast<int>(points.size());
    if (n < 1 || n > 6) throw std::invalid_argument("height correlations support 1 <= n <= 6");
    if (anchors.size() != points.size()) throw std::invalid_argument("one anchor per point");
    CorrelationResult res;
    res.n = n;
    std::set<int> blocked;
    for (int k = 0; k < n; ++k) {
        DualPath p = dual_path(t, anchors[k], points[k], blocked);
        for (int v : p.vertices) blocked.insert(v);
        res.paths.push_back(std::move(p));
    }
    // (paths are constructed vertex-disjoint; flag kept for loaded paths)
    if (n == 1) {  // E[hbar(v) - hbar(anchor)] = 0 by centering
        res.value = 0.0;
        return res;
    }
    std::vector<size_t> idx(n, 0);
    KahanSum acc;
    Eigen::MatrixXcd M(n, n);
    std::vector<int> b_cell(n), w_cell(n);
    std::function<void(int)> loop = [&](int k) {
        if (k == n) {
            cplx pref = 1.0;
            for (int j = 0; j < n; ++j) {
                const auto& er = t.dual.edges[res.paths[j].edges[idx[j]]];
                b_cell[j] = er.b;
                w_cell[j] = er.w;
                pref *= static_cast<double>(res.paths[j].signs[idx[j]]) * cm.K(er.b, er.w);
            }
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    M(j, l) = (j == l) ? cplx(0, 0) : cm.Kinv(w_cell[j], b_cell[l]);
            acc.add((M.determinant() * pref).real());
            return;
        }
        for (idx[k] = 0; idx[k] < res.paths[k].edges.size(); ++idx[k]) loop(k + 1);
    };
    loop(0);
    res.value = acc.value();
    return res;
}

/// Exact covariance of two centered edge indicators from the coupling matrix.
inline double edge_indicator_covariance(const CouplingMatrix& cm, const TEmbedding& t, int e1,
                                        int e2) {
    const auto& a = t.dual.edges[e1];
    const auto& b = t.dual.edges[e2];
    double p1 = (cm.K(a.b, a.w) * cm.Kinv(a.w, a.b)).real();
    double p2 = (cm.K(b.b, b.w) * cm.Kinv(b.w, b.b)).real();
    if (e1 == e2) return p1 * (1.0 - p1);
    double joint;
    if (a.b == b.b || a.w == b.w) {
        joint = 0.0;  // conflicting edges
    } else {
        cplx det = cm.Kinv(a.w, a.b) * cm.Kinv(b.w, b.b) - cm.Kinv(a.w, b.b) * cm.Kinv(b.w, a.b);
        joint = (det * cm.K(a.b, a.w) * cm.K(b.b, b.w)).real();
    }
    return joint - p1 * p2;
}

/// Absolute two-point correlation via centered edge indicators along paths
/// from boundary-adjacent anchors; equals the n = 2 determinant expansion.
inline double height_cov2(const CouplingMatrix& cm, const TEmbedding& t, int v1, int v2, int anchor1,
                          int anchor2) {
    DualPath p1 = dual_path(t, anchor1, v1);
    std::set<int> blocked(p1.vertices.begin(), p1.vertices.end());
    DualPath p2 = dual_path(t, anchor2, v2, blocked);
    KahanSum acc;
    for (size_t i = 0; i < p1.edges.size(); ++i)
        for (size_t j = 0; j < p2.edges.size(); ++j)
            acc.add(p1.signs[i] * p2.signs[j] *
                    edge_indicator_covariance(cm, t, p1.edges[i], p2.edges[j]));
    return acc.value();
}

}  // namespace tembed
