#pragma once

// Bi-periodic (torus) T-graph walks, built as the quotient of a padded finite
// patch. All walk data (phi scan, rates, areas) is local and independent of
// the eta sign section, so rates read off translation-representative vertices
// define the torus chain consistently.

#include "tembed/lattices.hpp"
#include "tembed/tgraph.hpp"

namespace tembed {

enum class PeriodicKind { Honeycomb, Checkerboard };

struct PeriodicWalk {
    struct Transition {
        int target = -1;
        double rate = 0.0;
        cplx displacement;  // true geometric jump (unfolds the torus)
    };
    int n_nodes = 0;
    std::vector<std::vector<Transition>> out;
    std::vector<double> mu;          // area of the owning (sub-)face
    std::vector<int> owner_face;     // torus class of the owner flat face (-1 degenerate)
    std::vector<cplx> rep_pos;       // representative position
    std::vector<uint8_t> degenerate;
    double delta = 0.0;              // mesh of the underlying embedding
    // backward data (white-flat structures): torus white-face class of w(v)
    std::vector<int> w_class_of_node;

    double total_rate(int n) const {
        double s = 0;
        for (const auto& tr : out[n]) s += tr.rate;
        return s;
    }
};

namespace detail {
struct TorusIndexer {
    PeriodicKind kind;
    int n, m;
    double delta;
    cplx omega = std::polar(1.0, kPi / 3.0);

    // lattice coordinates of a dual vertex position
    std::pair<int, int> vertex_coord(cplx z) const {
        if (kind == PeriodicKind::Honeycomb) {
            double j = z.imag() / (delta * omega.imag());
            double i = (z.real() - j * delta * omega.real()) / delta;
            return {static_cast<int>(std::lround(i)), static_cast<int>(std::lround(j))};
        }
        return {static_cast<int>(std::lround(z.real() / delta)),
                static_cast<int>(std::lround(z.imag() / delta))};
    }
    static int mod(int a, int p) { return ((a % p) + p) % p; }
    int vclass(std::pair<int, int> c) const { return mod(c.first, n) + n * mod(c.second, m); }
};
}  // namespace detail

/// Torus walk on T + alpha^2 O (black-flat) or T + conj(alpha^2 O)
/// (white-flat) over an n x m fundamental domain. The honeycomb needs n, m
/// divisible by 3 so that eta is periodic.
inline PeriodicWalk make_periodic_walk(PeriodicKind kind, int n, int m, double delta, cplx alpha,
                                       TGraphFlavor flavor, int anchor_shift = 0) {
    if (kind == PeriodicKind::Honeycomb && (n % 3 || m % 3))
        throw std::invalid_argument("periodic honeycomb needs n, m divisible by 3");
    if (kind == PeriodicKind::Checkerboard && (n % 2 || m % 2))
        throw std::invalid_argument("periodic checkerboard needs even n, m");
    const int pad = 3;
    TEmbedding t = (kind == PeriodicKind::Honeycomb)
                       ? make_honeycomb(n + 2 * pad, m + 2 * pad, delta)
                       : make_checkerboard(n + 2 * pad, m + 2 * pad, delta);
    OrigamiField eta = compute_eta(t);
    OrigamiMap om = compute_origami(t, eta);
    uint8_t flat_color = (flavor == TGraphFlavor::BlackFlat) ? 0 : 1;
    auto split = std::make_shared<Splitting>(
        make_splitting(t, eta, flat_color, anchor_shift, /*geometric*/ true));
    TGraph tg = build_tgraph(t, eta, om, alpha, flavor, split);
    WalkRates wr = walk_rates(t, tg);

    detail::TorusIndexer ix{kind, n, m, delta};
    // torus node classes: vertex classes merged along collapsed-face classes.
    // A collapsed face is identified by the set of its member vertex classes;
    // use the minimal member class as the face-node key.
    auto node_class = [&](int patch_node) {
        int cls = INT32_MAX;
        for (int v : tg.node_members[patch_node]) {
            auto c = ix.vertex_coord(t.pos[v]);
            cls = std::min(cls, ix.vclass({c.first - pad, c.second - pad}));
        }
        return cls;
    };
    // collect representative patch nodes: one per torus class. The anchor
    // member (lexicographically smallest coordinate) must lie in the central
    // block; other members of a merged node may stick out by one cell.
    std::map<int, int> rep;  // class key -> patch node
    for (int pn = 0; pn < tg.num_nodes(); ++pn) {
        if (tg.node_is_sink[pn]) continue;
        std::pair<int, int> anchor{INT32_MAX, INT32_MAX};
        for (int v : tg.node_members[pn]) {
            auto c = ix.vertex_coord(t.pos[v]);
            anchor = std::min(anchor, std::make_pair(c.second, c.first));
        }
        int i = anchor.second - pad, j = anchor.first - pad;
        if (i < 0 || i >= n || j < 0 || j >= m) continue;
        rep.emplace(node_class(pn), pn);
    }
    // reindex classes densely
    std::map<int, int> dense;
    for (const auto& [cls, pn] : rep) dense.emplace(cls, static_cast<int>(dense.size()));

    PeriodicWalk pw;
    pw.n_nodes = static_cast<int>(dense.size());
    pw.out.resize(pw.n_nodes);
    pw.mu.assign(pw.n_nodes, 0.0);
    pw.owner_face.assign(pw.n_nodes, -1);
    pw.rep_pos.resize(pw.n_nodes);
    pw.degenerate.assign(pw.n_nodes, 0);
    pw.w_class_of_node.assign(pw.n_nodes, -1);
    pw.delta = t.mesh_delta();

    auto dense_class_of_patch_node = [&](int pn) {
        int cls = node_class(pn);
        auto it = dense.find(cls);
        if (it == dense.end()) throw std::runtime_error("torus class missing (pad too small?)");
        return it->second;
    };
    // owner face torus class, for the alpha-independence report
    auto face_class = [&](int cell) {
        // identify a face by the minimal vertex class of its corners
        int cls = INT32_MAX;
        for (int v : t.dual.cell[cell]) {
            auto c = ix.vertex_coord(t.pos[v]);
            cls = std::min(cls, ix.vclass({c.first - pad, c.second - pad}));
        }
        // disambiguate the face among those sharing the minimal corner by the
        // offset of its centroid from that corner (translation invariant)
        cplx centroid(0, 0);
        for (int v : t.dual.cell[cell]) centroid += t.pos[v];
        centroid /= static_cast<double>(t.dual.cell[cell].size());
        cplx corner = t.pos[t.dual.cell[cell][0]];
        for (int v : t.dual.cell[cell]) {
            auto c = ix.vertex_coord(t.pos[v]);
            if (ix.vclass({c.first - pad, c.second - pad}) == cls) corner = t.pos[v];
        }
        long dx = std::lround((centroid - corner).real() / delta * 12.0);
        long dy = std::lround((centroid - corner).imag() / delta * 12.0);
        return cls * 10000 + static_cast<int>(((dx + 50) * 101 + (dy + 50)) % 9973);
    };

    for (const auto& [cls, pn] : rep) {
        int me = dense.at(cls);
        pw.rep_pos[me] = tg.node_pos[pn];
        pw.mu[me] = wr.mu[pn];
        pw.degenerate[me] = tg.degenerate_of_node[pn] >= 0;
        if (tg.owner[pn].cell >= 0) {
            int sub = tg.owner[pn].sub;
            pw.owner_face[me] = face_class(tg.owner[pn].cell) * 16 + sub;
        }
        for (const auto& tr : wr.out[pn]) {
            PeriodicWalk::Transition pt;
            pt.target = dense_class_of_patch_node(tr.target);
            pt.rate = tr.rate;
            pt.displacement = tg.node_pos[tr.target] - tg.node_pos[pn];
            pw.out[me].push_back(pt);
        }
    }
    // backward identification for white-flat graphs without degeneracies
    if (flavor == TGraphFlavor::WhiteFlat && std::abs(alpha - 1.0) < 1e-14) {
        BackwardStructure bs = backward_structure(t, eta);
        for (const auto& [cls, pn] : rep) {
            if (tg.node_members[pn].size() != 1) continue;
            int v = tg.node_members[pn][0];
            if (bs.w_of_vertex[v] >= 0)
                pw.w_class_of_node[dense.at(cls)] = face_class(bs.w_of_vertex[v]);
        }
    }
    return pw;
}

/// Exact stationarity residual of mu: max over nodes of |inflow - outflow|.
inline double stationarity_residual(const PeriodicWalk& pw) {
    std::vector<KahanSum> inflow(pw.n_nodes);
    for (int v = 0; v < pw.n_nodes; ++v)
        for (const auto& tr : pw.out[v]) inflow[tr.target].add(pw.mu[v] * tr.rate);
    double worst = 0.0;
    for (int v = 0; v < pw.n_nodes; ++v) {
        double outflow = pw.mu[v] * pw.total_rate(v);
        worst = std::max(worst, std::abs(inflow[v].value() - outflow));
    }
    return worst;
}

struct PeriodicWalkSample {
    cplx displacement;  // X_t - X_0
    double sup_abs = 0.0;  // sup_{s <= t} |X_s - X_0|
    long jumps = 0;
};

inline PeriodicWalkSample simulate_periodic_walk(const PeriodicWalk& pw, int start, double horizon,
                                                 uint64_t seed, uint64_t walker_id) {
    RngStream rng(seed, walker_id);
    PeriodicWalkSample out;
    int v = start;
    cplx x(0, 0);
    double time = 0.0;
    std::vector<double> w;
    while (true) {
        double total = pw.total_rate(v);
        double dt = rng.exponential(total);
        if (time + dt > horizon) return out;
        time += dt;
        w.clear();
        for (const auto& tr : pw.out[v]) w.push_back(tr.rate);
        const auto& tr = pw.out[v][rng.pick_weighted(w, total)];
        x += tr.displacement;
        v = tr.target;
        out.displacement = x;
        out.sup_abs = std::max(out.sup_abs, std::abs(x));
        out.jumps++;
    }
}

}  // namespace tembed
