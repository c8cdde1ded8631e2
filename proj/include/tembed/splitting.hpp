#pragma once

// Deterministic fan splittings of faces into triangles. Added diagonals are
// 2-gons of the opposite color with zero angles; they inherit an eta value
// from the defining relation, so the split complex is again a t-embedding.

#include <map>
#include <vector>

#include "tembed/embedding.hpp"
#include "tembed/origami.hpp"

namespace tembed {

struct FaceSplit {
    int cell = -1;
    int anchor_pos = 0;  // index into the face cycle

    struct Side {
        // exactly one of these is set
        int primal_edge = -1;  // original side
        int diagonal = -1;     // index into diagonals
        bool boundary = false; // boundary-cycle side
        cplx eta_dir;          // eta line of whatever is across this side
    };
    struct Sub {
        std::array<int, 3> v;      // dual vertices, ccw
        std::array<Side, 3> side;  // side k runs v[k] -> v[k+1]
    };
    std::vector<Sub> subs;

    struct Diagonal {
        int va = -1, vb = -1;  // oriented from anchor outward
        cplx eta;              // eta of the 2-gon (sign fixed by this orientation)
        int sub_a = -1, sub_b = -1;  // subs on either side
    };
    std::vector<Diagonal> diagonals;
};

struct Splitting {
    uint8_t split_color = 1;  // which color gets fan-split (1: white splitting)
    std::map<int, FaceSplit> faces;  // per cell of that color
    std::string id;

    const FaceSplit& at(int cell) const { return faces.at(cell); }
};

/// eta of a 2-gon or of the outer face glued to a boundary side: determined
/// by the defining relation along the segment (va -> vb) as traversed ccw by
/// the neighbouring face of the opposite color.
inline cplx eta_across_segment(cplx d_t, cplx eta_face, bool face_is_white) {
    cplx tau = unit(d_t);
    // relation: conj(eta_b) conj(eta_w) = dT(bw*)/|dT|, dT oriented ccw around w
    if (face_is_white) return std::conj(tau) * std::conj(eta_face);
    return std::conj(-tau) * std::conj(eta_face);  // ccw around w is cw around b
}

/// Fan splitting of all faces of the given color. anchor_shift rotates the
/// anchor choice (0: lowest dual-vertex id) and is recorded in the id so
/// different versions of walks can be compared.
inline Splitting make_splitting(const TEmbedding& t, const OrigamiField& eta, uint8_t color,
                                int anchor_shift = 0, bool geometric_anchor = false) {
    Splitting s;
    s.split_color = color;
    s.id = std::string(color ? "white" : "black") + "-fan-shift" + std::to_string(anchor_shift) +
           (geometric_anchor ? "-geo" : "");
    for (int u = 0; u < t.num_cells(); ++u) {
        if (t.dual.cell_color[u] != color) continue;
        const auto& cyc = t.dual.cell[u];
        const int d = static_cast<int>(cyc.size());
        FaceSplit fs;
        fs.cell = u;
        // anchor: lowest dual-vertex id; boundary faces anchor at their lowest
        // boundary (sink-adjacent) vertex so that T-graph transitions near the
        // boundary follow a fixed diagonal choice
        int a = 0;
        bool bnd = t.dual.cell_on_boundary[u];
        auto better = [&](int i, int j) {
            if (bnd) {
                bool bi = t.dual.is_boundary_vertex[cyc[i]], bj = t.dual.is_boundary_vertex[cyc[j]];
                if (bi != bj) return bi;
            }
            if (geometric_anchor) {
                // translation-invariant rule for periodic quotients
                cplx zi = t.pos[cyc[i]], zj = t.pos[cyc[j]];
                if (std::abs(zi.imag() - zj.imag()) > 1e-12) return zi.imag() < zj.imag();
                if (std::abs(zi.real() - zj.real()) > 1e-12) return zi.real() < zj.real();
            }
            return cyc[i] < cyc[j];
        };
        for (int i = 1; i < d; ++i)
            if (better(i, a)) a = i;
        a = (a + anchor_shift) % d;
        fs.anchor_pos = a;
        bool is_white = (color == 1);
        auto original_side = [&](int pos) {
            FaceSplit::Side side;
            int e = t.dual.side_edge[u][pos];
            if (e >= 0) {
                side.primal_edge = e;
                int other = (t.dual.edges[e].b == u) ? t.dual.edges[e].w : t.dual.edges[e].b;
                side.eta_dir = eta.eta[other];
            } else {
                side.boundary = true;
                int v1 = cyc[pos], v2 = cyc[(pos + 1) % d];
                side.eta_dir = eta_across_segment(t.pos[v2] - t.pos[v1], eta.eta[u], is_white);
            }
            return side;
        };
        if (d == 3) {
            FaceSplit::Sub sub;
            for (int k = 0; k < 3; ++k) {
                sub.v[k] = cyc[(a + k) % 3];
                sub.side[k] = original_side((a + k) % 3);
            }
            fs.subs.push_back(sub);
        } else {
            // sub k = (anchor, cyc[a+k+1], cyc[a+k+2]), k = 0..d-3
            for (int k = 0; k + 2 < d; ++k) {
                FaceSplit::Sub sub;
                sub.v = {cyc[a], cyc[(a + k + 1) % d], cyc[(a + k + 2) % d]};
                // side 0: anchor -> cyc[a+k+1]: diagonal unless k == 0
                // side 1: original side of the face
                // side 2: cyc[a+k+2] -> anchor: diagonal unless k == d-3
                sub.side[1] = original_side((a + k + 1) % d);
                if (k == 0) {
                    sub.side[0] = original_side(a);
                } else {
                    sub.side[0].diagonal = k - 1;
                }
                if (k == d - 3) {
                    sub.side[2] = original_side((a + d - 1) % d);
                } else {
                    sub.side[2].diagonal = k;
                }
                fs.subs.push_back(sub);
            }
            for (int k = 0; k + 3 < d; ++k) {
                FaceSplit::Diagonal dg;
                dg.va = cyc[a];
                dg.vb = cyc[(a + k + 2) % d];
                dg.eta = eta_across_segment(t.pos[dg.vb] - t.pos[dg.va], eta.eta[u], is_white);
                dg.sub_a = k;      // sub with side 2 on this diagonal
                dg.sub_b = k + 1;  // sub with side 0 on this diagonal
                fs.diagonals.push_back(dg);
            }
            for (auto& sub : fs.subs)
                for (auto& side : sub.side)
                    if (side.diagonal >= 0) side.eta_dir = fs.diagonals[side.diagonal].eta;
        }
        s.faces.emplace(u, std::move(fs));
    }
    return s;
}

inline int sub_of_edge(const Splitting& s, int cell, int primal_edge) {
    const FaceSplit& fs = s.at(cell);
    for (size_t k = 0; k < fs.subs.size(); ++k)
        for (const auto& side : fs.subs[k].side)
            if (side.primal_edge == primal_edge) return static_cast<int>(k);
    throw std::runtime_error("edge is not a side of the cell");
}

}  // namespace tembed
