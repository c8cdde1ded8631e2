#pragma once

// Appendix frameworks: orthodiagonal discrete complex analysis, s-embeddings
// built from Dirac spinors on the corner double cover, isoradial grids, and
// the square-lattice / honeycomb special notions of discrete holomorphicity
// with their translations to t-holomorphic functions.

#include <functional>

#include "tembed/lattices.hpp"
#include "tembed/origami.hpp"
#include "tembed/tholo.hpp"

namespace tembed {

// ---------------------------------------------------------------------------
// Orthodiagonal operators on a quad complex (Lambda = Gamma u Gamma*)

namespace ortho {

/// Gamma-diagonal (class 0) and Gamma*-diagonal endpoints of a quad, ordered
/// so that (b-, b+) and (b*-, b*+) appear ccw as in the quad cycle.
struct QuadDiagonals {
    int b_minus, b_plus, bs_minus, bs_plus;
};

inline QuadDiagonals diagonals(const QuadComplex& q, int t) {
    const auto& quad = q.quads[t];
    int g0 = q.lambda_class[quad[0]] == 0 ? 0 : 1;
    return {quad[g0], quad[(g0 + 2) % 4], quad[(g0 + 1) % 4], quad[(g0 + 3) % 4]};
}

inline double conductance(const QuadComplex& q, int t) {
    QuadDiagonals d = diagonals(q, t);
    return std::abs(q.lambda_pos[d.bs_plus] - q.lambda_pos[d.bs_minus]) /
           std::abs(q.lambda_pos[d.b_plus] - q.lambda_pos[d.b_minus]);
}

inline double orthogonality_residual(const QuadComplex& q, int t) {
    QuadDiagonals d = diagonals(q, t);
    cplx u = unit(q.lambda_pos[d.b_plus] - q.lambda_pos[d.b_minus]);
    cplx v = unit(q.lambda_pos[d.bs_plus] - q.lambda_pos[d.bs_minus]);
    return std::abs(std::real(std::conj(u) * v));
}

inline double mu_quad(const QuadComplex& q, int t) {
    QuadDiagonals d = diagonals(q, t);
    return 0.5 * std::abs(q.lambda_pos[d.bs_plus] - q.lambda_pos[d.bs_minus]) *
           std::abs(q.lambda_pos[d.b_plus] - q.lambda_pos[d.b_minus]);
}

/// Quads around each Lambda vertex in ccw order, with the ccw-ordered pair of
/// opposite-class corners (bs_k, bs_{k+1}) per quad.
struct VertexFan {
    std::vector<int> quads;
    std::vector<std::pair<int, int>> opp;  // (first, next) opposite-class corners, ccw around v
    bool complete = false;                 // full circle
};

inline std::vector<VertexFan> vertex_fans(const QuadComplex& q) {
    std::vector<VertexFan> fans(q.num_lambda());
    std::vector<std::vector<std::pair<double, int>>> at(q.num_lambda());
    for (int t = 0; t < q.num_quads(); ++t) {
        const auto& quad = q.quads[t];
        for (int k = 0; k < 4; ++k) {
            int v = quad[k];
            cplx ctr = 0.25 * (q.lambda_pos[quad[0]] + q.lambda_pos[quad[1]] +
                               q.lambda_pos[quad[2]] + q.lambda_pos[quad[3]]);
            at[v].push_back({std::arg(ctr - q.lambda_pos[v]), t});
        }
    }
    for (int v = 0; v < q.num_lambda(); ++v) {
        std::sort(at[v].begin(), at[v].end());
        KahanSum angle;
        for (auto [a, t] : at[v]) {
            fans[v].quads.push_back(t);
            const auto& quad = q.quads[t];
            int k = 0;
            while (quad[k] != v) ++k;
            // ccw around v inside the quad: from the outgoing corner to the
            // incoming one
            fans[v].opp.push_back({quad[(k + 1) % 4], quad[(k + 3) % 4]});
            cplx a1 = q.lambda_pos[quad[(k + 1) % 4]] - q.lambda_pos[v];
            cplx a2 = q.lambda_pos[quad[(k + 3) % 4]] - q.lambda_pos[v];
            angle.add(std::abs(std::arg(std::conj(a1) * a2)));
        }
        fans[v].complete = std::abs(angle.value() - 2 * kPi) < 1e-9;
    }
    return fans;
}

inline double mu_lambda(const QuadComplex& q, const std::vector<VertexFan>& fans, int v) {
    KahanSum s;
    for (size_t k = 0; k < fans[v].quads.size(); ++k) {
        auto [o1, o2] = fans[v].opp[k];
        int t = fans[v].quads[k];
        // |b*_{k+1} - b*_k| |w_k - b| with w_k at the quad crossing point
        QuadDiagonals d = diagonals(q, t);
        cplx b_m = q.lambda_pos[d.b_minus], b_p = q.lambda_pos[d.b_plus];
        cplx s_m = q.lambda_pos[d.bs_minus], s_p = q.lambda_pos[d.bs_plus];
        // intersection of the two diagonals
        cplx r = b_p - b_m, u = s_p - s_m;
        double det = r.real() * (-u.imag()) + u.real() * r.imag();
        double par = ((s_m.real() - b_m.real()) * (-u.imag()) + u.real() * (s_m.imag() - b_m.imag())) / det;
        cplx w = b_m + par * r;
        s.add(std::abs(q.lambda_pos[o2] - q.lambda_pos[o1]) * std::abs(w - q.lambda_pos[v]));
    }
    return 0.25 * s.value();
}

/// del F (u') = (1/2) [ dF/dz over the Gamma diagonal + over the Gamma* one ].
inline cplx del(const QuadComplex& q, const std::vector<cplx>& f_lambda, int t) {
    QuadDiagonals d = diagonals(q, t);
    cplx g = (f_lambda[d.b_plus] - f_lambda[d.b_minus]) /
             (q.lambda_pos[d.b_plus] - q.lambda_pos[d.b_minus]);
    cplx gs = (f_lambda[d.bs_plus] - f_lambda[d.bs_minus]) /
              (q.lambda_pos[d.bs_plus] - q.lambda_pos[d.bs_minus]);
    return 0.5 * (g + gs);
}

inline cplx delbar(const QuadComplex& q, const std::vector<cplx>& f_lambda, int t) {
    QuadDiagonals d = diagonals(q, t);
    cplx g = (f_lambda[d.b_plus] - f_lambda[d.b_minus]) /
             std::conj(q.lambda_pos[d.b_plus] - q.lambda_pos[d.b_minus]);
    cplx gs = (f_lambda[d.bs_plus] - f_lambda[d.bs_minus]) /
              std::conj(q.lambda_pos[d.bs_plus] - q.lambda_pos[d.bs_minus]);
    return 0.5 * (g + gs);
}

/// Adjoint derivative: [del* G](v) = i/(4 mu_Lambda(v)) sum (b*_{k+1} - b*_k) G(w_k).
inline cplx delstar(const QuadComplex& q, const std::vector<VertexFan>& fans,
                    const std::vector<cplx>& g_quad, int v) {
    KahanSumC s;
    for (size_t k = 0; k < fans[v].quads.size(); ++k) {
        auto [o1, o2] = fans[v].opp[k];
        s.add((q.lambda_pos[o2] - q.lambda_pos[o1]) * g_quad[fans[v].quads[k]]);
    }
    return cplx(0, 1) / (4.0 * mu_lambda(q, fans, v)) * s.value();
}

/// Cotangent Laplacian within one Lambda class.
inline cplx laplacian(const QuadComplex& q, const std::vector<VertexFan>& fans,
                      const std::vector<cplx>& h_lambda, int v) {
    KahanSumC s;
    for (size_t k = 0; k < fans[v].quads.size(); ++k) {
        int t = fans[v].quads[k];
        QuadDiagonals d = diagonals(q, t);
        bool on_gamma = (q.lambda_class[v] == 0);
        int other = on_gamma ? (d.b_minus == v ? d.b_plus : d.b_minus)
                             : (d.bs_minus == v ? d.bs_plus : d.bs_minus);
        double c = on_gamma ? conductance(q, t) : 1.0 / conductance(q, t);
        s.add(c * (h_lambda[other] - h_lambda[v]));
    }
    return s.value() / (2.0 * mu_lambda(q, fans, v));
}

}  // namespace ortho

// ---------------------------------------------------------------------------
// S-embeddings from Dirac spinors

struct IsingModel {
    DimerGraph g;                 // planar graph (colors are bookkeeping only)
    std::vector<double> theta;    // per edge, in (0, pi/2)
    std::string outer_face_key;
    std::vector<cplx> reference_pos;  // optional vertex positions (generators)
};

/// Combinatorial scaffold of the s-embedding: Lambda vertices (vertices of G
/// and interior faces), one quad per interior edge, and corner ids.
struct SEmbeddingScaffold {
    IsingModel ising;
    FaceStructure faces;
    int outer = -1;
    std::vector<int> lam_of_vertex;          // g vertex -> Lambda id
    std::vector<int> lam_of_face;            // face -> Lambda id (-1 for outer)
    std::vector<int> lambda_vertex;          // Lambda id -> g vertex or -1
    std::vector<int> lambda_face;            // Lambda id -> face or -1
    int n_lambda = 0;
    std::vector<std::array<int, 4>> quads;   // [v_b, f_right, v_w, f_left] ccw
    std::vector<int> quad_edge;
    int n_corners = 0;
    std::vector<int> corner_of_quad_side;    // per quad * 4 + k
    std::vector<std::pair<int, int>> corner_pair;  // corner -> (lambda vertex, lambda face)

    int corner_at(int quad, int side) const { return corner_of_quad_side[4 * quad + side]; }
};

inline SEmbeddingScaffold make_sembedding_scaffold(IsingModel ising) {
    SEmbeddingScaffold sc;
    sc.ising = std::move(ising);
    const DimerGraph& g = sc.ising.g;
    sc.faces = trace_faces(g);
    for (int f = 0; f < sc.faces.num_faces(); ++f)
        if (sc.faces.face_key[f] == sc.ising.outer_face_key) sc.outer = f;
    if (sc.outer < 0) throw std::invalid_argument("outer face key not found");
    sc.lam_of_vertex.assign(g.num_vertices(), -1);
    sc.lam_of_face.assign(sc.faces.num_faces(), -1);
    auto lam_vertex = [&](int v) {
        if (sc.lam_of_vertex[v] < 0) {
            sc.lam_of_vertex[v] = sc.n_lambda++;
            sc.lambda_vertex.push_back(v);
            sc.lambda_face.push_back(-1);
        }
        return sc.lam_of_vertex[v];
    };
    auto lam_face = [&](int f) {
        if (sc.lam_of_face[f] < 0) {
            sc.lam_of_face[f] = sc.n_lambda++;
            sc.lambda_vertex.push_back(-1);
            sc.lambda_face.push_back(f);
        }
        return sc.lam_of_face[f];
    };
    for (int e = 0; e < g.num_edges(); ++e) {
        int f_left = sc.faces.face_of_halfedge[2 * e];
        int f_right = sc.faces.face_of_halfedge[2 * e + 1];
        if (f_left == sc.outer || f_right == sc.outer) continue;
        sc.quads.push_back({lam_vertex(g.edges[e].b), lam_face(f_right),
                            lam_vertex(g.edges[e].w), lam_face(f_left)});
        sc.quad_edge.push_back(e);
    }
    if (sc.quads.empty()) throw std::invalid_argument("no interior edges to embed");
    std::map<std::pair<int, int>, int> corner_id;
    sc.corner_of_quad_side.assign(4 * sc.quads.size(), -1);
    for (size_t t = 0; t < sc.quads.size(); ++t)
        for (int k = 0; k < 4; ++k) {
            int a = sc.quads[t][k], b = sc.quads[t][(k + 1) % 4];
            if (sc.lambda_vertex[a] < 0) std::swap(a, b);  // a: vertex, b: face
            auto [it, fresh] = corner_id.emplace(std::make_pair(a, b), sc.n_corners);
            if (fresh) {
                ++sc.n_corners;
                sc.corner_pair.push_back({a, b});
            }
            sc.corner_of_quad_side[4 * static_cast<int>(t) + k] = it->second;
        }
    return sc;
}

struct SEmbeddingData {
    SEmbeddingScaffold scaffold;
    QuadComplex lambda;            // positions integrated from the spinor
    std::vector<cplx> chi;         // the supplied spinor section
    std::vector<double> q_val;     // Q per Lambda vertex
    double max_propagation_residual = 0.0;
    double max_tangential_residual = 0.0;
    IncircleResult view;           // derived t-embedding (vertices: Lambda + centers)
    bool proper = true;
};

/// Builds S_X and Q_X from a Dirac spinor given on all corners. The
/// propagation equation X(c) = cos(theta) X(c_v) + sin(theta) X(c_f) (c_v
/// sharing the vertex, c_f the face of the corner) is re-checked around every
/// quad up to the double-cover signs of the supplied section; S and Q are the
/// primitives of X(c)^2 and |X(c)|^2 across corners.
inline SEmbeddingData from_ising(SEmbeddingScaffold scaffold, std::vector<cplx> chi,
                                 double tol = 1e-9) {
    SEmbeddingData s;
    s.scaffold = std::move(scaffold);
    const auto& sc = s.scaffold;
    if (static_cast<int>(chi.size()) != sc.n_corners)
        throw std::invalid_argument("spinor must be given on every corner");
    s.chi = std::move(chi);
    double chi_scale = 0.0;
    for (cplx x : s.chi) chi_scale = std::max(chi_scale, std::abs(x));
    // propagation residuals, section-free: allow independent +-1 on each term
    for (size_t t = 0; t < sc.quads.size(); ++t) {
        double th = sc.ising.theta[sc.quad_edge[t]];
        double cth = std::cos(th), sth = std::sin(th);
        std::array<int, 4> c{sc.corner_at(static_cast<int>(t), 0), sc.corner_at(static_cast<int>(t), 1),
                             sc.corner_at(static_cast<int>(t), 2), sc.corner_at(static_cast<int>(t), 3)};
        // cos-neighbour shares the G-vertex, sin-neighbour shares the face:
        // around the ccw cycle (v_b, f_r), (v_w, f_r), (v_w, f_l), (v_b, f_l)
        int cosn[4] = {c[3], c[2], c[1], c[0]};
        int sinn[4] = {c[1], c[0], c[3], c[2]};
        for (int k = 0; k < 4; ++k) {
            double best = 1e300;
            for (double e1 : {1.0, -1.0})
                for (double e2 : {1.0, -1.0})
                    best = std::min(best, std::abs(s.chi[c[k]] - e1 * cth * s.chi[cosn[k]] -
                                                   e2 * sth * s.chi[sinn[k]]));
            s.max_propagation_residual = std::max(s.max_propagation_residual, best);
        }
    }
    if (s.max_propagation_residual > tol * std::max(1.0, chi_scale))
        throw std::runtime_error("spinor does not satisfy the propagation equation (residual " +
                                 std::to_string(s.max_propagation_residual) + ")");

    // integrate S and Q over corners
    s.lambda.lambda_pos.assign(sc.n_lambda, cplx(0, 0));
    s.lambda.lambda_class.resize(sc.n_lambda);
    for (int l = 0; l < sc.n_lambda; ++l)
        s.lambda.lambda_class[l] = sc.lambda_vertex[l] >= 0 ? 0 : 1;
    s.q_val.assign(sc.n_lambda, 0.0);
    std::vector<uint8_t> have(sc.n_lambda, 0);
    have[sc.corner_pair[0].first] = 1;
    bool moved = true;
    double close_worst = 0.0;
    while (moved) {
        moved = false;
        for (int cid = 0; cid < sc.n_corners; ++cid) {
            auto [lv, lf] = sc.corner_pair[cid];
            cplx inc = s.chi[cid] * s.chi[cid];
            double qinc = std::norm(s.chi[cid]);
            if (have[lv] && !have[lf]) {
                s.lambda.lambda_pos[lf] = s.lambda.lambda_pos[lv] - inc;
                s.q_val[lf] = s.q_val[lv] - qinc;
                have[lf] = 1;
                moved = true;
            } else if (have[lf] && !have[lv]) {
                s.lambda.lambda_pos[lv] = s.lambda.lambda_pos[lf] + inc;
                s.q_val[lv] = s.q_val[lf] + qinc;
                have[lv] = 1;
                moved = true;
            } else if (have[lv] && have[lf]) {
                close_worst = std::max(close_worst,
                                       std::abs(s.lambda.lambda_pos[lv] - s.lambda.lambda_pos[lf] - inc));
            }
        }
    }
    for (int l = 0; l < sc.n_lambda; ++l)
        if (!have[l]) throw std::runtime_error("Lambda is not corner-connected");
    if (close_worst > tol * std::max(1.0, chi_scale * chi_scale))
        throw std::runtime_error("S increments do not close (invalid spinor)");

    s.lambda.quads = sc.quads;
    // fix a global reflection if the spinor produced clockwise quads; mixed
    // orientations mean the embedding is not proper
    int neg = 0;
    for (const auto& quad : s.lambda.quads) {
        std::vector<cplx> p;
        for (int k = 0; k < 4; ++k) p.push_back(s.lambda.lambda_pos[quad[k]]);
        if (polygon_signed_area(p) < 0) ++neg;
    }
    if (neg == static_cast<int>(s.lambda.quads.size())) {
        for (auto& z : s.lambda.lambda_pos) z = std::conj(z);
    } else if (neg != 0) {
        s.proper = false;
    }
    if (s.proper) {
        double dmax = 0.0;
        for (const auto& quad : s.lambda.quads)
            for (int k = 0; k < 4; ++k)
                dmax = std::max(dmax, std::abs(s.lambda.lambda_pos[quad[k]] -
                                               s.lambda.lambda_pos[quad[(k + 1) % 4]]));
        s.lambda.delta = dmax;
        s.view = incircle_tembedding(s.lambda);
        s.max_tangential_residual = s.view.max_tangential_residual;
    }
    return s;
}

/// The Ising model carried by an isoradial rhombic lattice: G = the class-0
/// graph, one edge per rhombus, theta = the rhombus half-angle at the
/// Gamma-diagonal. The closed-form spinor chi(c) = sqrt(v_bullet - v_circ)
/// reproduces the lattice as its own s-embedding.
inline IsingModel ising_from_isoradial(const QuadComplex& iso) {
    IsingModel m;
    std::vector<int> vid(iso.num_lambda(), -1);
    int nv = 0;
    for (int v = 0; v < iso.num_lambda(); ++v)
        if (iso.lambda_class[v] == 0) vid[v] = nv++;
    m.g.color.assign(nv, 0);
    m.reference_pos.resize(nv);
    for (int t = 0; t < iso.num_quads(); ++t) {
        ortho::QuadDiagonals d = ortho::diagonals(iso, t);
        int a = vid[d.b_minus], b = vid[d.b_plus];
        m.reference_pos[a] = iso.lambda_pos[d.b_minus];
        m.reference_pos[b] = iso.lambda_pos[d.b_plus];
        m.g.edges.push_back({a, b, 1.0});
        double full = std::abs(std::arg(
            std::conj(iso.lambda_pos[d.bs_minus] - iso.lambda_pos[d.b_minus]) *
            (iso.lambda_pos[d.bs_plus] - iso.lambda_pos[d.b_minus])));
        m.theta.push_back(0.5 * full);
    }
    m.g.rotation.assign(nv, {});
    for (int v = 0; v < nv; ++v) {
        std::vector<std::pair<double, int>> inc;
        for (int e = 0; e < m.g.num_edges(); ++e)
            if (m.g.edges[e].b == v || m.g.edges[e].w == v)
                inc.push_back({std::arg(m.reference_pos[m.g.other_end(e, v)] - m.reference_pos[v]), e});
        std::sort(inc.begin(), inc.end());
        for (auto& [a, e] : inc) m.g.rotation[v].push_back(e);
    }
    FaceStructure fsq = trace_faces(m.g);
    size_t best = 0;
    for (int f = 0; f < fsq.num_faces(); ++f)
        if (fsq.face_halfedges[f].size() > fsq.face_halfedges[best].size()) best = f;
    m.outer_face_key = fsq.face_key[best];
    return m;
}

/// Closed-form isoradial spinor on a scaffold whose Ising model came from
/// ising_from_isoradial over the given quad complex.
inline std::vector<cplx> isoradial_spinor(const SEmbeddingScaffold& sc, const QuadComplex& iso) {
    // positions: vertices from the model; faces matched to the nearest
    // class-1 Lambda vertex of the complex
    std::vector<cplx> face_pos(sc.faces.num_faces(), cplx(0, 0));
    for (int f = 0; f < sc.faces.num_faces(); ++f) {
        if (f == sc.outer) continue;
        cplx centroid(0, 0);
        const auto& hs = sc.faces.face_halfedges[f];
        for (int h : hs) centroid += sc.ising.reference_pos[he_tail(sc.ising.g, h)];
        centroid /= static_cast<double>(hs.size());
        double best = 1e300;
        for (int v = 0; v < iso.num_lambda(); ++v) {
            if (iso.lambda_class[v] != 1) continue;
            if (std::abs(iso.lambda_pos[v] - centroid) < best) {
                best = std::abs(iso.lambda_pos[v] - centroid);
                face_pos[f] = iso.lambda_pos[v];
            }
        }
    }
    std::vector<cplx> chi(sc.n_corners);
    for (int c = 0; c < sc.n_corners; ++c) {
        auto [lv, lf] = sc.corner_pair[c];
        cplx d = sc.ising.reference_pos[sc.lambda_vertex[lv]] - face_pos[sc.lambda_face[lf]];
        chi[c] = std::sqrt(d);
    }
    return chi;
}

// ---------------------------------------------------------------------------
// Square-lattice frameworks (Ferrand and s-holomorphicity)

/// Residuals of the classical discrete Cauchy-Riemann equation on the
/// checkerboard: values per black cell, real on (even, even), imaginary on
/// (odd, odd). Returns the max violation over interior white squares.
inline double ferrand_residual(int n, const std::function<cplx(int, int)>& f_black) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if ((i + j) % 2 == 0) continue;  // white squares only
            if (i == 0 || j == 0 || i + 1 >= n || j + 1 >= n) continue;
            cplx r = f_black(i, j + 1) - f_black(i, j - 1) -
                     cplx(0, 1) * (f_black(i + 1, j) - f_black(i - 1, j));
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

/// s-holomorphicity residual on the diagonal grid V_diamond: for each square
/// the projections of the two V_diamond corner values onto eta(s) R agree.
inline double shol_square_residual(int n, const std::function<cplx(int, int)>& f_diamond,
                                   const std::function<bool(int, int)>& in_domain) {
    const cplx lam = std::polar(1.0, kPi / 4);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // square (i, j) has V_diamond corners at grid points with even sum
            std::vector<std::pair<int, int>> zs;
            for (auto [a, b] : {std::pair{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}})
                if ((a + b) % 2 == 0 && in_domain(a, b)) zs.push_back({a, b});
            if (zs.size() < 2) continue;
            cplx eta_s;
            if (i % 2 == 0 && j % 2 == 0) eta_s = 1.0;
            else if (i % 2 == 1 && j % 2 == 1) eta_s = cplx(0, 1);
            else if (i % 2 == 1) eta_s = lam;       // W_lambda: odd i, even j
            else eta_s = cplx(0, 1) * lam;          // W_ilambda
            cplx v0 = project_line(f_diamond(zs[0].first, zs[0].second), eta_s);
            for (size_t k = 1; k < zs.size(); ++k)
                worst = std::max(worst,
                                 std::abs(project_line(f_diamond(zs[k].first, zs[k].second), eta_s) - v0));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Honeycomb frameworks

/// Dynnikov-Novikov residual: values per white (triangular-lattice) cell must
/// sum to zero around every interior black cell.
inline double dn_residual(const TEmbedding& t, const std::function<double(int)>& g_white) {
    double worst = 0.0;
    for (int b = 0; b < t.num_cells(); ++b) {
        if (!t.black_cell(b) || !t.is_interior_cell(b)) continue;
        KahanSum s;
        for (int e : t.g.rotation[b]) s.add(g_white(t.g.other_end(e, b)));
        worst = std::max(worst, std::abs(s.value()));
    }
    return worst;
}

/// Canonical corner-spinor representative for the honeycomb-edge framework:
/// on a lattice whose Lambda-edge directions are multiples of 60 degrees the
/// section follows the twelfth-root pattern with index 0 or 3 mod 4.
inline cplx cgs_canonical_rep(cplx lambda_edge_dir) {
    cplx e = std::exp(cplx(0, -0.5 * std::arg(lambda_edge_dir)));
    for (cplx cand : {e, -e}) {
        double a = std::arg(cand);
        if (a < 0) a += 2 * kPi;
        long k = std::lround(a / (kPi / 6.0));
        if (std::abs(a - static_cast<double>(k) * kPi / 6.0) > 1e-6) continue;
        k %= 12;
        if (k % 4 == 0 || k % 4 == 3) return cand;
    }
    throw std::invalid_argument("edge direction is not aligned with the honeycomb frame");
}

/// CGS residuals on values per edge of a honeycomb H, listed ccw per face:
/// G(e4)-G(e1) = G(e2)-G(e5) = G(e6)-G(e3) and sum G(e_i) = 0.
inline double cgs_residual(const std::vector<std::array<double, 6>>& faces) {
    double worst = 0.0;
    for (const auto& g : faces) {
        double d1 = (g[3] - g[0]) - (g[1] - g[4]);
        double d2 = (g[1] - g[4]) - (g[5] - g[2]);
        double s = g[0] + g[1] + g[2] + g[3] + g[4] + g[5];
        worst = std::max({worst, std::abs(d1), std::abs(d2), std::abs(s)});
    }
    return worst;
}

}  // namespace tembed
