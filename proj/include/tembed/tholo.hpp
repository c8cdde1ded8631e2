#pragma once

// T-holomorphic functions: projected values on one bipartite class lying on
// eta lines, true complex values on the other (per split sub-face for faces
// of degree > 3), extension between the classes, primitives, the product
// form, coupling-derived observables and the F^{++-..} decomposition.

#include <memory>
#include <set>

#include "tembed/coupling.hpp"
#include "tembed/splitting.hpp"

namespace tembed {

struct THoloField {
    uint8_t primary = 1;  // 1: t-white-holomorphic (complex values on whites)
    std::shared_ptr<const Splitting> split;  // splitting of primary-color faces
    // projected values on the opposite color, stored as the real coefficient
    // t with value = t * eta; indexed by cell
    std::vector<double> proj;
    std::vector<uint8_t> has_proj;
    // true complex values on primary-color cells, one per splitting sub-face
    std::map<int, std::vector<cplx>> values;
    // shared projections carried by the splitting diagonals (real coeff per
    // diagonal, value = t * diag.eta)
    std::map<int, std::vector<double>> diag_proj;
    std::set<int> punctures;
    bool standard_boundary = false;

    bool is_primary_cell(const TEmbedding& t, int u) const {
        return t.dual.cell_color[u] == (primary ? 1 : 0);
    }
    cplx value_of(int cell, int sub = 0) const { return values.at(cell)[sub]; }
    cplx proj_value(const OrigamiField& eta, int cell) const { return proj[cell] * eta.eta[cell]; }
};

// ---------------------------------------------------------------------------
// Checks

struct THoloReport {
    double max_projection_residual = 0.0;
    int worst_projection_cell = -1;
    double max_contour_residual = 0.0;
    int worst_contour_cell = -1;
};

/// Projection law + contour law residuals. The contour law at a primary face
/// u is |oint_{du} F dT| evaluated with the projected values (equivalently
/// |(F K)(u)|); with standard boundary conditions, boundary sides contribute
/// zero, so boundary faces are checked too.
inline THoloReport check_tholomorphic(const TEmbedding& t, const OrigamiField& eta,
                                      const THoloField& f) {
    THoloReport rep;
    for (const auto& [cell, vals] : f.values) {
        if (f.punctures.count(cell)) continue;
        const FaceSplit& fs = f.split->at(cell);
        for (size_t s = 0; s < fs.subs.size(); ++s) {
            for (const auto& side : fs.subs[s].side) {
                if (side.primal_edge < 0) continue;
                const auto& er = t.dual.edges[side.primal_edge];
                int other = (er.b == cell) ? er.w : er.b;
                if (!f.has_proj[other]) continue;
                double r = std::abs(project_line(vals[s], eta.eta[other]) -
                                    f.proj[other] * eta.eta[other]);
                if (r > rep.max_projection_residual) {
                    rep.max_projection_residual = r;
                    rep.worst_projection_cell = cell;
                }
            }
        }
    }
    for (int u = 0; u < t.num_cells(); ++u) {
        if (t.dual.cell_color[u] != (f.primary ? 1 : 0)) continue;
        if (f.punctures.count(u)) continue;
        bool on_boundary = !t.is_interior_cell(u);
        if (on_boundary && !f.standard_boundary) continue;
        KahanSumC acc;
        bool complete = true;
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i) {
            int e = t.dual.side_edge[u][i];
            if (e < 0) continue;  // boundary side: zero under standard conditions
            const auto& er = t.dual.edges[e];
            int other = (er.b == u) ? er.w : er.b;
            if (!f.has_proj[other]) {
                complete = false;
                break;
            }
            cplx d_t = t.pos[cyc[(i + 1) % cyc.size()]] - t.pos[cyc[i]];
            acc.add(f.proj[other] * eta.eta[other] * d_t);
        }
        if (!complete) continue;
        double r = std::abs(acc.value());
        if (r > rep.max_contour_residual) {
            rep.max_contour_residual = r;
            rep.worst_contour_cell = u;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Extension from projections to true complex values

/// Solves, per primary face, the real least-squares system
///   Re(conj(eta_side) F) = t_side  for original sides,
///   Re(conj(eta_diag) (F_i - F_j)) = 0  across diagonals,
/// and stores the per-sub values together with the diagonal projections.
/// Throws when the residual exceeds tol * scale (the solvability condition
/// oint F dT = 0 fails) or when the eta directions are collinear.
inline void extend_projections(const TEmbedding& t, const OrigamiField& eta, THoloField& f,
                               double tol = 1e-8) {
    if (!f.split || f.split->split_color != (f.primary ? 1 : 0))
        throw std::invalid_argument("field needs a splitting of its primary color");
    f.values.clear();
    f.diag_proj.clear();
    for (const auto& [cell, fs] : f.split->faces) {
        if (f.punctures.count(cell)) continue;
        bool on_boundary = !t.is_interior_cell(cell);
        const int ns = static_cast<int>(fs.subs.size());
        struct Row {
            int sub, sub2;
            cplx dir;
            double rhs;
        };
        std::vector<Row> rows;
        double scale = 0.0;
        auto add_row = [&](int sub, cplx dir, double rhs, int sub2 = -1) {
            rows.push_back({sub, sub2, dir, rhs});
        };
        // Re(conj(d) * (x + iy)) = d.re x + d.im y
        bool incomplete = false;
        for (int s = 0; s < ns && !incomplete; ++s) {
            for (const auto& side : fs.subs[s].side) {
                if (side.primal_edge >= 0) {
                    const auto& er = t.dual.edges[side.primal_edge];
                    int other = (er.b == cell) ? er.w : er.b;
                    if (!f.has_proj[other]) {
                        incomplete = true;
                        break;
                    }
                    add_row(s, eta.eta[other], f.proj[other]);
                    scale = std::max(scale, std::abs(f.proj[other]));
                } else if (side.boundary) {
                    if (f.standard_boundary && on_boundary) add_row(s, side.eta_dir, 0.0);
                }
            }
        }
        if (incomplete) continue;
        for (size_t d = 0; d < fs.diagonals.size(); ++d)
            add_row(fs.diagonals[d].sub_b, fs.diagonals[d].eta, 0.0, fs.diagonals[d].sub_a);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows.size(), 2 * ns);
        Eigen::VectorXd b(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) {
            // Re(conj(dir) * (x + iy)) = Re(dir) x + Im(dir) y
            A(r, 2 * rows[r].sub) = rows[r].dir.real();
            A(r, 2 * rows[r].sub + 1) = rows[r].dir.imag();
            if (rows[r].sub2 >= 0) {
                A(r, 2 * rows[r].sub2) = -rows[r].dir.real();
                A(r, 2 * rows[r].sub2 + 1) = -rows[r].dir.imag();
            }
            b[r] = rows[r].rhs;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.rank() < 2 * ns) {
            if (on_boundary && !f.standard_boundary) continue;  // underdetermined rim face
            throw std::runtime_error("degenerate extension system (collinear eta directions) at cell " +
                                     std::to_string(cell));
        }
        Eigen::VectorXd x = svd.solve(b);
        double resid = (A * x - b).norm();
        if (resid > tol * std::max(1.0, scale))
            throw std::runtime_error("projected values violate the contour condition at cell " +
                                     std::to_string(cell) + " (residual " + std::to_string(resid) +
                                     ")");
        std::vector<cplx> vals(ns);
        for (int s = 0; s < ns; ++s) vals[s] = cplx(x[2 * s], x[2 * s + 1]);
        std::vector<double> dproj;
        for (const auto& dg : fs.diagonals)
            dproj.push_back(project_coeff(vals[dg.sub_a], dg.eta));
        f.values[cell] = std::move(vals);
        if (!dproj.empty()) f.diag_proj[cell] = std::move(dproj);
    }
}

// ---------------------------------------------------------------------------
// Coupling-derived observables

/// F_w(b) = conj(eta_w) Kinv(w, b) on all black cells, zero outer values and
/// standard boundary conditions; true values extended away from the puncture.
inline THoloField coupling_field_white(const TEmbedding& t, const OrigamiField& eta,
                                       const CouplingMatrix& cm, int w_anchor,
                                       std::shared_ptr<const Splitting> split) {
    if (t.black_cell(w_anchor)) throw std::invalid_argument("anchor must be a white cell");
    THoloField f;
    f.primary = 1;
    f.split = std::move(split);
    f.proj.assign(t.num_cells(), 0.0);
    f.has_proj.assign(t.num_cells(), 0);
    for (int u = 0; u < t.num_cells(); ++u) {
        if (!t.black_cell(u)) continue;
        cplx v = std::conj(eta.eta[w_anchor]) * cm.Kinv(w_anchor, u);
        f.proj[u] = project_coeff(v, eta.eta[u]);
        f.has_proj[u] = 1;
    }
    f.punctures.insert(w_anchor);
    f.standard_boundary = true;
    extend_projections(t, eta, f);
    return f;
}

/// Symmetric black version: F_b(w) = conj(eta_b) Kinv(w, b).
inline THoloField coupling_field_black(const TEmbedding& t, const OrigamiField& eta,
                                       const CouplingMatrix& cm, int b_anchor,
                                       std::shared_ptr<const Splitting> split) {
    if (!t.black_cell(b_anchor)) throw std::invalid_argument("anchor must be a black cell");
    THoloField f;
    f.primary = 0;
    f.split = std::move(split);
    f.proj.assign(t.num_cells(), 0.0);
    f.has_proj.assign(t.num_cells(), 0);
    for (int u = 0; u < t.num_cells(); ++u) {
        if (t.black_cell(u)) continue;
        cplx v = std::conj(eta.eta[b_anchor]) * cm.Kinv(u, b_anchor);
        f.proj[u] = project_coeff(v, eta.eta[u]);
        f.has_proj[u] = 1;
    }
    f.punctures.insert(b_anchor);
    f.standard_boundary = true;
    extend_projections(t, eta, f);
    return f;
}

// ---------------------------------------------------------------------------
// Primitives

/// Increment of the closed form associated with F along the dual step
/// (v1 -> v2). For a t-white-holomorphic field the form is
/// 2 F_w dT = F_w dT + conj(F_w) d conj(O); the black-side expression
/// 2 F(b) dT is used on edges, the face rotation on boundary sides.
inline cplx tholo_increment(const TEmbedding& t, const OrigamiField& eta, const THoloField& f,
                            int v1, int v2, int edge_or_minus1, int cell_of_boundary_side) {
    if (edge_or_minus1 >= 0) {
        const auto& er = t.dual.edges[edge_or_minus1];
        int opp = f.primary ? er.b : er.w;  // projected side
        cplx d_t = t.pos[er.v_to] - t.pos[er.v_from];
        double sgn = (er.v_from == v1) ? 1.0 : -1.0;
        return 2.0 * f.proj[opp] * eta.eta[opp] * d_t * sgn;
    }
    // boundary side inside cell u
    int u = cell_of_boundary_side;
    cplx dz = t.pos[v2] - t.pos[v1];
    bool u_primary = (t.dual.cell_color[u] == (f.primary ? 1 : 0));
    if (!u_primary) {
        // opposite color: the form is 2 F(u) dT on this side
        return 2.0 * f.proj[u] * eta.eta[u] * dz;
    }
    // primary-color boundary cell: use the true value on the sub-face whose
    // boundary side this is
    const FaceSplit& fs = f.split->at(u);
    for (size_t s = 0; s < fs.subs.size(); ++s)
        for (int k = 0; k < 3; ++k)
            if (fs.subs[s].side[k].boundary &&
                ((fs.subs[s].v[k] == v1 && fs.subs[s].v[(k + 1) % 3] == v2) ||
                 (fs.subs[s].v[k] == v2 && fs.subs[s].v[(k + 1) % 3] == v1))) {
                cplx val = f.values.at(u)[s];
                if (f.primary) return val * dz + std::conj(val) * std::conj(eta.eta_sq[u] * dz);
                return val * dz + std::conj(val * eta.eta_sq[u] * dz);
            }
    throw std::runtime_error("boundary side not found in splitting");
}

/// Integral of the closed form along an explicit dual path (vertex list).
inline cplx integrate_along_dual_path(const TEmbedding& t, const OrigamiField& eta,
                                      const THoloField& f, const std::vector<int>& path) {
    // adjacency with edge ids / boundary cells
    std::map<std::pair<int, int>, std::pair<int, int>> step;  // (v1,v2) -> (edge, cell)
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        step[{er.v_from, er.v_to}] = {static_cast<int>(e), -1};
        step[{er.v_to, er.v_from}] = {static_cast<int>(e), -1};
    }
    for (int u = 0; u < t.num_cells(); ++u) {
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i)
            if (t.dual.side_edge[u][i] == -1) {
                step[{cyc[i], cyc[(i + 1) % cyc.size()]}] = {-1, u};
                step[{cyc[(i + 1) % cyc.size()], cyc[i]}] = {-1, u};
            }
    }
    KahanSumC acc;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        auto it = step.find({path[i], path[i + 1]});
        if (it == step.end()) throw std::invalid_argument("path steps must follow dual edges");
        acc.add(tholo_increment(t, eta, f, path[i], path[i + 1], it->second.first,
                                it->second.second));
    }
    return acc.value();
}

/// Loop around a face (its boundary cycle, counterclockwise, closed).
inline std::vector<int> face_loop(const TEmbedding& t, int cell) {
    std::vector<int> loop = t.dual.cell[cell];
    loop.push_back(loop.front());
    return loop;
}

struct Primitive {
    std::vector<cplx> value;         // full complex primitive (branch) or projected
    int base_vertex = 0;
    double max_closure_residual = 0.0;
};

/// Single-valued primitive of Pr(I_C[F], alpha R): the projected increments
/// are integrated over a BFS tree; closure is verified on all co-tree steps.
/// Throws if some cycle has a nonzero projected monodromy.
inline Primitive primitive_projected(const TEmbedding& t, const OrigamiField& eta,
                                     const THoloField& f, cplx alpha, int base_vertex = 0,
                                     double tol = 1e-8) {
    alpha = unit(alpha);
    struct Arc {
        int to;
        double inc;
    };
    std::vector<std::vector<Arc>> adj(t.num_vertices());
    auto add_step = [&](int v1, int v2, int e, int cell) {
        cplx inc = tholo_increment(t, eta, f, v1, v2, e, cell);
        adj[v1].push_back({v2, project_coeff(inc, alpha)});
        adj[v2].push_back({v1, -project_coeff(inc, alpha)});
    };
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        int opp = f.primary ? er.b : er.w;
        if (!f.has_proj[opp]) continue;
        add_step(er.v_from, er.v_to, static_cast<int>(e), -1);
    }
    for (int u = 0; u < t.num_cells(); ++u) {
        const auto& cyc = t.dual.cell[u];
        for (size_t i = 0; i < cyc.size(); ++i)
            if (t.dual.side_edge[u][i] == -1) {
                bool u_primary = (t.dual.cell_color[u] == (f.primary ? 1 : 0));
                if (u_primary && !f.values.count(u)) continue;
                if (!u_primary && !f.has_proj[u]) continue;
                add_step(cyc[i], cyc[(i + 1) % cyc.size()], -1, u);
            }
    }
    Primitive pr;
    pr.base_vertex = base_vertex;
    pr.value.assign(t.num_vertices(), cplx(0, 0));
    std::vector<uint8_t> known(t.num_vertices(), 0);
    std::vector<double> h(t.num_vertices(), 0.0);
    known[base_vertex] = 1;
    std::queue<int> q;
    q.push(base_vertex);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& a : adj[v]) {
            if (!known[a.to]) {
                h[a.to] = h[v] + a.inc;
                known[a.to] = 1;
                q.push(a.to);
            } else {
                double r = std::abs(h[a.to] - (h[v] + a.inc));
                pr.max_closure_residual = std::max(pr.max_closure_residual, r);
            }
        }
    }
    for (int v = 0; v < t.num_vertices(); ++v)
        if (!known[v])
            throw std::runtime_error("region is not connected to the basepoint (vertex " +
                                     std::to_string(v) + " unreachable; missing face values?)");
    double scale = 0.0;
    for (int v = 0; v < t.num_vertices(); ++v) scale = std::max(scale, std::abs(h[v]));
    if (pr.max_closure_residual > tol * std::max(1.0, scale))
        throw std::runtime_error("projected primitive has monodromy (closure residual " +
                                 std::to_string(pr.max_closure_residual) + ")");
    for (int v = 0; v < t.num_vertices(); ++v) pr.value[v] = h[v] * alpha;
    return pr;
}

/// Full complex primitive for puncture-free fields (both projections).
inline Primitive primitive_complex(const TEmbedding& t, const OrigamiField& eta,
                                   const THoloField& f, int base_vertex = 0, double tol = 1e-8) {
    Primitive p1 = primitive_projected(t, eta, f, 1.0, base_vertex, tol);
    Primitive p2 = primitive_projected(t, eta, f, cplx(0, 1), base_vertex, tol);
    Primitive pr;
    pr.base_vertex = base_vertex;
    pr.max_closure_residual = std::max(p1.max_closure_residual, p2.max_closure_residual);
    pr.value.resize(t.num_vertices());
    for (int v = 0; v < t.num_vertices(); ++v)
        pr.value[v] = cplx(p1.value[v].real(), p2.value[v].imag());
    return pr;
}

// ---------------------------------------------------------------------------
// Product form

struct ProductFormResult {
    cplx direct = 0.0;  // oint F_w F_b dT with projected values
    cplx via_identity = 0.0;  // oint (1/2) Re(F_w F_b dT + F_w conj(F_b) dO)
    double max_edgewise_mismatch = 0.0;
};

/// Both sides of the product-form identity along a dual loop running over
/// primal-dual edges (punctures and boundary must be avoided by the loop).
inline ProductFormResult product_form_integral(const TEmbedding& t, const OrigamiField& eta,
                                               const THoloField& fw, const THoloField& fb,
                                               const std::vector<int>& loop) {
    if (fw.primary != 1 || fb.primary != 0)
        throw std::invalid_argument("product form needs a t-white and a t-black field");
    std::map<std::pair<int, int>, int> edge_of;
    for (size_t e = 0; e < t.dual.edges.size(); ++e) {
        const auto& er = t.dual.edges[e];
        edge_of[{er.v_from, er.v_to}] = static_cast<int>(e);
        edge_of[{er.v_to, er.v_from}] = static_cast<int>(e);
    }
    ProductFormResult out;
    KahanSumC lhs, rhs;
    for (size_t i = 0; i + 1 < loop.size(); ++i) {
        auto it = edge_of.find({loop[i], loop[i + 1]});
        if (it == edge_of.end()) throw std::invalid_argument("loop must follow primal-dual edges");
        const auto& er = t.dual.edges[it->second];
        if (fw.punctures.count(er.w) || fw.punctures.count(er.b) || fb.punctures.count(er.w) ||
            fb.punctures.count(er.b))
            throw std::invalid_argument("loop touches a puncture");
        double sgn = (er.v_from == loop[i]) ? 1.0 : -1.0;
        cplx d_t = sgn * (t.pos[er.v_to] - t.pos[er.v_from]);
        cplx fw_b = fw.proj[er.b] * eta.eta[er.b];
        cplx fb_w = fb.proj[er.w] * eta.eta[er.w];
        // true values adjacent to this edge (any sub touching the edge)
        cplx fw_w = fw.values.at(er.w)[sub_of_edge(*fw.split, er.w, it->second)];
        cplx fb_b = fb.values.at(er.b)[sub_of_edge(*fb.split, er.b, it->second)];
        cplx d_o = eta.eta_sq[er.w] * d_t;
        cplx one = fw_b * fb_w * d_t;
        cplx two = 0.5 * std::real(fw_w * fb_b * d_t + fw_w * std::conj(fb_b) * d_o);
        lhs.add(one);
        rhs.add(two);
        out.max_edgewise_mismatch = std::max(out.max_edgewise_mismatch, std::abs(one - two));
    }
    out.direct = lhs.value();
    out.via_identity = rhs.value();
    return out;
}

// ---------------------------------------------------------------------------
// F^{±±} decomposition of the coupling function

struct FpmpmValues {
    cplx fpp, fpm, fmp, fmm;           // F^{++}, F^{+-}, F^{-+}, F^{--}
    std::array<double, 3> c_at_black;  // t-triple over the white neighbours of u_black
    std::array<double, 3> c_at_white;  // t-triple over the black neighbours of u_white
    std::string splitting_id;
};

namespace detail {
/// Solve sum t_k = 2, sum t_k eta_k^2 = 0 for real t (3 equations, 3 unknowns).
inline std::array<double, 3> c_coefficients(const std::array<cplx, 3>& etas) {
    Eigen::Matrix3d A;
    for (int k = 0; k < 3; ++k) {
        cplx e2 = etas[k] * etas[k];
        A(0, k) = 1.0;
        A(1, k) = e2.real();
        A(2, k) = e2.imag();
    }
    Eigen::Vector3d b(2.0, 0.0, 0.0);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible())
        throw std::runtime_error("collinear eta directions: coefficient system singular");
    Eigen::Vector3d x = lu.solve(b);
    return {x[0], x[1], x[2]};
}
}  // namespace detail

/// The four functions F^{±±}(u_black, u_white) built from the coupling matrix
/// (triangulation faces; general faces go through the splitting of the
/// embedding itself). Both cells must be interior with three neighbours.
inline FpmpmValues f_pmpm(const TEmbedding& t, const OrigamiField& eta, const CouplingMatrix& cm,
                          int u_black, int u_white) {
    if (!t.black_cell(u_black) || t.black_cell(u_white))
        throw std::invalid_argument("f_pmpm expects (black, white) interior faces");
    if (!t.is_interior_cell(u_black) || !t.is_interior_cell(u_white))
        throw std::invalid_argument("f_pmpm faces must be interior");
    auto neighbours = [&](int u) {
        std::vector<int> nb;
        for (int e : t.g.rotation[u]) nb.push_back(t.g.other_end(e, u));
        return nb;
    };
    std::vector<int> ws = neighbours(u_black), bs = neighbours(u_white);
    if (ws.size() != 3 || bs.size() != 3)
        throw std::invalid_argument("f_pmpm needs degree-3 faces (apply a splitting first)");
    std::array<cplx, 3> eta_w{eta.eta[ws[0]], eta.eta[ws[1]], eta.eta[ws[2]]};
    std::array<cplx, 3> eta_b{eta.eta[bs[0]], eta.eta[bs[1]], eta.eta[bs[2]]};
    FpmpmValues out;
    out.c_at_black = detail::c_coefficients(eta_w);
    out.c_at_white = detail::c_coefficients(eta_b);
    out.splitting_id = "triangulation";
    cplx fpp = 0, fpm = 0, fmp = 0, fmm = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // first superscript pairs with c_{u_black, w}, second with c_{u_white, b}
            double kern =
                std::real(std::conj(eta_b[j]) * std::conj(eta_w[i]) * cm.Kinv(ws[i], bs[j]));
            cplx cw_p = out.c_at_black[i] * eta_w[i];
            cplx cb_p = out.c_at_white[j] * eta_b[j];
            fpp += cw_p * cb_p * kern;
            fpm += cw_p * std::conj(cb_p) * kern;
            fmp += std::conj(cw_p) * cb_p * kern;
            fmm += std::conj(cw_p) * std::conj(cb_p) * kern;
        }
    out.fpp = fpp;
    out.fpm = fpm;
    out.fmp = fmp;
    out.fmm = fmm;
    return out;
}

}  // namespace tembed
