#pragma once

// Configuration-driven experiment pipelines behind the CLI: each stage reads
// the config, runs on a bundled or loaded embedding, writes deterministic
// JSON/CSV/SVG artifacts and records them in the manifest.

#include <filesystem>

#include "tembed/coupling.hpp"
#include "tembed/frameworks.hpp"
#include "tembed/gff.hpp"
#include "tembed/io.hpp"
#include "tembed/probes.hpp"

namespace tembed {

struct ExperimentConfig {
    json raw = json::object();
    std::string out_dir = "out";
    uint64_t seed = 1;
    bool paranoid = false;

    json lattice() const { return raw.value("lattice", json{{"kind", "checkerboard"}, {"n", 8}}); }
    static ExperimentConfig from_file(const std::string& path) {
        ExperimentConfig c;
        c.raw = read_json(path);
        c.seed = c.raw.value("seed", 1);
        c.out_dir = c.raw.value("out", "out");
        return c;
    }
};

struct Bundle {
    std::string kind;
    TEmbedding emb;
    OrigamiField eta;
    OrigamiMap om;
    double delta = 1.0;
};

inline Bundle make_bundle(const json& lat, uint64_t seed) {
    Bundle b;
    b.kind = lat.value("kind", "checkerboard");
    int n = lat.value("n", 8), m = lat.value("m", n);
    double delta = lat.value("delta", 1.0);
    b.delta = delta;
    if (b.kind == "checkerboard") {
        b.emb = make_checkerboard(n, m, delta);
    } else if (b.kind == "honeycomb") {
        b.emb = make_honeycomb(n, m, delta);
    } else if (b.kind == "honeycomb-hexagon") {
        b.emb = make_honeycomb_hexagon(n, delta);
    } else if (b.kind == "triangulation") {
        b.emb = make_random_triangulation(n, m, delta, lat.value("seed", seed));
    } else if (b.kind == "isoradial") {
        b.emb = medial_tembedding(make_isoradial_random(n, m, delta, lat.value("seed", seed))).emb;
    } else if (b.kind == "orthodiagonal") {
        RngStream rng(lat.value("seed", seed), 2);
        std::vector<double> xs{0.0}, ys{0.0};
        for (int i = 0; i < n; ++i) xs.push_back(xs.back() + delta * (0.6 + 0.8 * rng.uniform()));
        for (int j = 0; j < m; ++j) ys.push_back(ys.back() + delta * (0.6 + 0.8 * rng.uniform()));
        b.emb = medial_tembedding(make_orthodiagonal_grid(xs, ys)).emb;
    } else if (b.kind == "s-embedding") {
        QuadComplex iso = make_isoradial_random(n, m, delta, lat.value("seed", seed));
        IsingModel ising = ising_from_isoradial(iso);
        SEmbeddingScaffold sc = make_sembedding_scaffold(ising);
        b.emb = from_ising(sc, isoradial_spinor(sc, iso)).view.emb;
    } else if (b.kind == "file") {
        b.emb = tembedding_from_json(read_json(lat.at("path").get<std::string>()));
    } else {
        throw std::invalid_argument("unknown lattice kind: " + b.kind);
    }
    b.eta = compute_eta(b.emb);
    b.om = compute_origami(b.emb, b.eta);
    b.delta = b.emb.mesh_delta();
    return b;
}

namespace fsys = std::filesystem;

inline std::string join(const std::string& dir, const std::string& name) {
    return (fsys::path(dir) / name).string();
}

// ---------------------------------------------------------------------------
// Stages; each returns 0 on success, 2 on validation failure.

inline int stage_validate(const ExperimentConfig& cfg, Manifest& man) {
    Bundle b = make_bundle(cfg.lattice(), cfg.seed);
    auto rep = validate_tembedding(b.emb, EmbeddingMode::Finite, cfg.paranoid);
    json out;
    out["kind"] = b.kind;
    out["max_angle_residual"] = rep.max_angle_residual;
    out["nonconvex_cells"] = rep.nonconvex_cells;
    out["misoriented_cells"] = rep.misoriented_cells;
    out["overlaps"] = rep.overlapping_cells.size();
    out["eta_defining_residual"] = b.eta.max_defining_residual;
    out["origami_closure_residual"] = b.om.max_closure_residual;
    out["mesh_delta"] = b.delta;
    bool ok = rep.ok();
    try {
        KasteleynMatrix km = kasteleyn_matrix(b.emb);
        out["kasteleyn_sign_residual"] = km.max_sign_residual;
    } catch (const std::exception& e) {
        out["kasteleyn_error"] = e.what();
        ok = false;
    }
    int w0 = -1;
    for (int u = 0; u < b.emb.num_cells(); ++u)
        if (!b.emb.black_cell(u) && b.emb.is_interior_cell(u)) w0 = u;
    if (w0 >= 0) {
        CirclePattern cp = circle_pattern(b.emb, w0, cplx(0, 0));
        out["circle_pattern_closure"] = cp.max_closure_residual;
    }
    auto assume = check_assumptions(b.emb, b.om, {2 * b.delta, 4 * b.delta, 8 * b.delta},
                                    {b.delta, 2 * b.delta}, cfg.seed);
    json lips = json::array();
    for (const auto& row : assume.lip)
        lips.push_back({{"r", row.r}, {"kappa", row.kappa}, {"pairs", row.pairs}});
    out["lip"] = lips;
    json fats = json::array();
    for (const auto& row : assume.fat)
        fats.push_back({{"beta", row.beta},
                        {"rho", row.rho},
                        {"thin_cells", row.n_thin_cells},
                        {"components", row.n_components},
                        {"max_component_diameter", row.max_component_diameter}});
    out["exp_fat"] = fats;
    out["valid"] = ok;
    std::string report = join(cfg.out_dir, "validate.json");
    write_json(report, out);
    man.artifact(report, "validate");
    std::string drawing = join(cfg.out_dir, "tembedding.svg");
    render_tembedding_svg(b.emb, drawing);
    man.artifact(drawing, "validate");
    std::string heat = join(cfg.out_dir, "origami_heatmap.svg");
    render_origami_heatmap_svg(b.emb, b.eta, heat);
    man.artifact(heat, "validate");
    std::string file = join(cfg.out_dir, "tembedding.json");
    write_json(file, tembedding_to_json(b.emb));
    man.artifact(file, "validate");
    return ok ? 0 : 2;
}

inline int stage_build_tgraph(const ExperimentConfig& cfg, Manifest& man) {
    Bundle b = make_bundle(cfg.lattice(), cfg.seed);
    json alphas = cfg.raw.value("alphas", json::array({{1.0, 0.0}}));
    json out = json::array();
    int idx = 0;
    for (const auto& a : alphas) {
        cplx alpha(a.at(0).get<double>(), a.at(1).get<double>());
        auto split = std::make_shared<Splitting>(make_splitting(b.emb, b.eta, 0));
        TGraph tg = build_tgraph(b.emb, b.eta, b.om, alpha, TGraphFlavor::BlackFlat, split);
        WalkRates wr = walk_rates(b.emb, tg);
        json rec;
        rec["alpha"] = {alpha.real(), alpha.imag()};
        rec["nodes"] = tg.num_nodes();
        rec["degenerate_faces"] = tg.degenerates.size();
        double mu_total = 0;
        for (double m : wr.mu) mu_total += m;
        rec["mu_total"] = mu_total;
        std::string svg = join(cfg.out_dir, "tgraph_" + std::to_string(idx) + ".svg");
        render_tgraph_svg(tg, svg);
        man.artifact(svg, "build-tgraph");
        out.push_back(rec);
        ++idx;
    }
    std::string report = join(cfg.out_dir, "tgraph.json");
    write_json(report, out);
    man.artifact(report, "build-tgraph");
    return 0;
}

inline int stage_walk(const ExperimentConfig& cfg, Manifest& man) {
    json w = cfg.raw.value("walk", json::object());
    int n = w.value("n", 6), m = w.value("m", 6);
    double delta = w.value("delta", 1.0);
    long n_walks = w.value("n_walks", 10000);
    std::vector<double> ts = w.value("t_values", std::vector<double>{1.0});
    PeriodicKind kind = w.value("kind", std::string("honeycomb")) == "checkerboard"
                            ? PeriodicKind::Checkerboard
                            : PeriodicKind::Honeycomb;
    PeriodicWalk pw = make_periodic_walk(kind, n, m, delta, 1.0, TGraphFlavor::BlackFlat);
    CsvWriter traj(join(cfg.out_dir, "trajectories.csv"), {"walker", "time", "x", "y"});
    long n_dump = std::min<long>(n_walks, 32);
    json stats = json::array();
    for (double t : ts) {
        KahanSum sx, sy, s2;
        for (long k = 0; k < n_walks; ++k) {
            auto s = simulate_periodic_walk(pw, static_cast<int>(k % pw.n_nodes), t, cfg.seed, k);
            sx.add(s.displacement.real());
            sy.add(s.displacement.imag());
            s2.add(std::norm(s.displacement));
            if (k < n_dump)
                traj.row({static_cast<double>(k), t, s.displacement.real(), s.displacement.imag()});
        }
        json rec;
        rec["t"] = t;
        rec["mean"] = {sx.value() / n_walks, sy.value() / n_walks};
        rec["trace_variance"] = s2.value() / n_walks;
        rec["n_walks"] = n_walks;
        rec["stationarity_residual"] = stationarity_residual(pw);
        stats.push_back(rec);
    }
    std::string report = join(cfg.out_dir, "walk.json");
    write_json(report, stats);
    man.artifact(report, "walk");
    man.artifact(join(cfg.out_dir, "trajectories.csv"), "walk");
    return 0;
}

inline int stage_couple(const ExperimentConfig& cfg, Manifest& man) {
    Bundle b = make_bundle(cfg.lattice(), cfg.seed);
    CouplingMatrix cm = invert_kasteleyn(kasteleyn_matrix(b.emb));
    json out;
    out["inverse_residual"] = cm.inverse_residual;
    out["condition_estimate"] = cm.condition_estimate;
    out["log_abs_det"] = cm.log_abs_det.real();
    // coupling field around a central white cell + monodromy
    cplx ctr(0, 0);
    for (cplx z : b.emb.pos) ctr += z / static_cast<double>(b.emb.pos.size());
    int anchor = -1;
    double bd = 1e300;
    for (int u = 0; u < b.emb.num_cells(); ++u) {
        if (b.emb.black_cell(u) || !b.emb.is_interior_cell(u)) continue;
        cplx z(0, 0);
        for (int v : b.emb.dual.cell[u])
            z += b.emb.pos[v] / static_cast<double>(b.emb.dual.cell[u].size());
        if (std::abs(z - ctr) < bd) {
            bd = std::abs(z - ctr);
            anchor = u;
        }
    }
    auto split = std::make_shared<Splitting>(make_splitting(b.emb, b.eta, 1));
    THoloField f = coupling_field_white(b.emb, b.eta, cm, anchor, split);
    THoloReport rep = check_tholomorphic(b.emb, b.eta, f);
    out["anchor_cell"] = anchor;
    out["projection_residual"] = rep.max_projection_residual;
    out["contour_residual"] = rep.max_contour_residual;
    cplx mono = integrate_along_dual_path(b.emb, b.eta, f, face_loop(b.emb, anchor));
    out["monodromy_error"] = std::abs(mono - 2.0 * std::conj(b.eta.eta[anchor]));
    // field CSV: face id, color, Re, Im (projected fields keep t and eta)
    CsvWriter field(join(cfg.out_dir, "coupling_field.csv"),
                    {"cell", "color", "re", "im", "proj_t", "eta_re", "eta_im"});
    for (int u = 0; u < b.emb.num_cells(); ++u) {
        if (b.emb.black_cell(u)) {
            field.row({static_cast<double>(u), 0.0, 0.0, 0.0, f.proj[u], b.eta.eta[u].real(),
                       b.eta.eta[u].imag()});
        } else if (f.values.count(u)) {
            cplx v = f.values.at(u)[0];
            field.row({static_cast<double>(u), 1.0, v.real(), v.imag(), 0.0, b.eta.eta[u].real(),
                       b.eta.eta[u].imag()});
        }
    }
    man.artifact(join(cfg.out_dir, "coupling_field.csv"), "couple");
    // sampled matchings
    long n_samples = cfg.raw.value("samples", 3);
    json samples = json::array();
    for (long s = 0; s < n_samples; ++s)
        samples.push_back(sample_matching(cm, b.emb, cfg.seed + s));
    out["matchings"] = samples;
    std::string report = join(cfg.out_dir, "couple.json");
    write_json(report, out);
    man.artifact(report, "couple");
    return 0;
}

inline int stage_gff(const ExperimentConfig& cfg, Manifest& man) {
    json g = cfg.raw.value("gff", json::object());
    int n = g.value("n", 32);
    TEmbedding t = make_checkerboard(n, n, 1.0 / n);
    CouplingMatrix cm = invert_kasteleyn(kasteleyn_matrix(t));
    auto find_vertex = [&](double x, double y) {
        int best = -1;
        double bd = 1e300;
        for (int v = 0; v < t.num_vertices(); ++v)
            if (std::abs(t.pos[v] - cplx(x, y)) < bd) {
                bd = std::abs(t.pos[v] - cplx(x, y));
                best = v;
            }
        return best;
    };
    // dyadic separations around the center, anchors near the left/bottom edges
    int a1 = find_vertex(1.0 / n, 0.5), a2 = find_vertex(0.5, 1.0 / n);
    std::vector<double> seps = g.value("separations", std::vector<double>{});
    if (seps.empty())
        for (double s = 4.0 / n; s <= 0.45; s *= 2) seps.push_back(s);
    CsvWriter csv(join(cfg.out_dir, "gff_h2.csv"), {"x1", "y1", "x2", "y2", "sep", "h2",
                                                    "gff_ref", "ratio"});
    std::vector<std::pair<double, double>> fitted;
    for (double s : seps) {
        int v1 = find_vertex(0.5 - s / 2, 0.5), v2 = find_vertex(0.5 + s / 2, 0.5);
        if (v1 == v2) continue;
        CorrelationResult c = height_correlations(cm, t, {v1, v2}, {a1, a2});
        double gref = green_rectangle(t.pos[v1], t.pos[v2], 1.0, 1.0) / kPi;
        csv.row({t.pos[v1].real(), t.pos[v1].imag(), t.pos[v2].real(), t.pos[v2].imag(),
                 std::abs(t.pos[v2] - t.pos[v1]), c.value, gref,
                 gref != 0 ? c.value / gref : 0.0});
        fitted.push_back({std::log(std::abs(t.pos[v2] - t.pos[v1])), c.value});
    }
    man.artifact(join(cfg.out_dir, "gff_h2.csv"), "gff");
    // log fit of H2 against log separation
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : fitted) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double nn = static_cast<double>(fitted.size());
    double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    json out;
    out["n"] = n;
    out["h2_log_slope"] = slope;
    out["expected_slope"] = -1.0 / (2.0 * kPi * kPi);
    std::string report = join(cfg.out_dir, "gff.json");
    write_json(report, out);
    man.artifact(report, "gff");
    // overlay plot
    std::vector<std::pair<double, double>> overlay;
    for (auto& [x, y] : fitted)
        overlay.push_back({x, out["expected_slope"].get<double>() * x + (fitted[0].second -
                           out["expected_slope"].get<double>() * fitted[0].first)});
    render_xy_svg(fitted, overlay, "log r", "H2", join(cfg.out_dir, "gff_overlay.svg"));
    man.artifact(join(cfg.out_dir, "gff_overlay.svg"), "gff");
    return 0;
}

inline int stage_appendix(const ExperimentConfig& cfg, Manifest& man) {
    json out;
    // orthodiagonal identities
    {
        QuadComplex qc = make_orthodiagonal_grid({0, 0.9, 1.7, 2.8, 4.1}, {0, 1.1, 2.3, 3.0});
        MedialResult mr = medial_tembedding(qc);
        out["orthodiagonal"]["valid"] = validate_tembedding(mr.emb).ok();
        double worst = 0.0;
        for (int t = 0; t < qc.num_quads(); ++t)
            worst = std::max(worst, ortho::orthogonality_residual(qc, t));
        out["orthodiagonal"]["orthogonality_residual"] = worst;
    }
    // isoradial s-embedding with Q = +-delta/2
    {
        QuadComplex iso = make_isoradial_random(5, 5, 1.0, cfg.seed);
        IsingModel ising = ising_from_isoradial(iso);
        SEmbeddingScaffold sc = make_sembedding_scaffold(ising);
        SEmbeddingData se = from_ising(sc, isoradial_spinor(sc, iso));
        out["s_embedding"]["propagation_residual"] = se.max_propagation_residual;
        out["s_embedding"]["tangential_residual"] = se.max_tangential_residual;
        out["s_embedding"]["proper"] = se.proper;
        double lo = 1e300, hi = -1e300;
        for (double q : se.q_val) {
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        out["s_embedding"]["q_spread"] = hi - lo;
    }
    std::string report = join(cfg.out_dir, "appendix.json");
    write_json(report, out);
    man.artifact(report, "appendix");
    return 0;
}

inline int stage_probe(const ExperimentConfig& cfg, Manifest& man) {
    json p = cfg.raw.value("probe", json::object());
    int n = p.value("n", 6), m = p.value("m", 6);
    double delta = p.value("delta", 1.0);
    long n_walks = p.value("n_walks", 5000);
    PeriodicWalk pw = make_periodic_walk(PeriodicKind::Honeycomb, n, m, delta, 1.0,
                                         TGraphFlavor::BlackFlat);
    auto var = mc_variance_probe(pw, p.value("t_values", std::vector<double>{1.0}),
                                 {cplx(1, 0), cplx(0, 1)}, {1.0, 2.0, 3.0}, n_walks, cfg.seed);
    CsvWriter csv(join(cfg.out_dir, "probes.csv"),
                  {"probe", "t", "param", "estimate", "std_error", "n"});
    for (const auto& r : var.directional)
        csv.row({0.0, r.params.at("t"), r.params.at("beta_re"), r.estimate, r.std_error,
                 static_cast<double>(r.n_samples)});
    for (const auto& r : var.trace)
        csv.row({1.0, r.params.at("t"), 0.0, r.estimate, r.std_error,
                 static_cast<double>(r.n_samples)});
    for (const auto& r : var.tails)
        csv.row({2.0, r.params.at("t"), r.params.at("lambda"), r.estimate, r.std_error,
                 static_cast<double>(r.n_samples)});
    ProbeResult fwd = mc_crossing_forward(pw, 20.0 * pw.delta, n_walks, cfg.seed);
    csv.row({3.0, 0.0, fwd.params.at("r"), fwd.estimate, fwd.std_error,
             static_cast<double>(fwd.n_samples)});
    PeriodicBackwardWalk pb = make_periodic_backward_walk(PeriodicKind::Honeycomb, n, m, delta);
    ProbeResult bwd = mc_crossing_backward(pb, 20.0 * pb.delta, n_walks, cfg.seed);
    csv.row({4.0, 0.0, bwd.params.at("r"), bwd.estimate, bwd.std_error,
             static_cast<double>(bwd.n_samples)});
    man.artifact(join(cfg.out_dir, "probes.csv"), "probe");
    json out;
    out["forward_crossing"] = {{"estimate", fwd.estimate}, {"se", fwd.std_error}};
    out["backward_crossing"] = {{"estimate", bwd.estimate}, {"se", bwd.std_error}};
    out["seed"] = cfg.seed;
    std::string report = join(cfg.out_dir, "probe.json");
    write_json(report, out);
    man.artifact(report, "probe");
    return 0;
}

inline int stage_report(const ExperimentConfig& cfg, Manifest& man) {
    std::ostringstream html;
    html << "<!doctype html><html><head><meta charset=\"utf-8\"><title>run report</title>"
         << "</head><body><h1>Run report</h1>\n";
    for (const char* name : {"validate.json", "tgraph.json", "walk.json", "couple.json",
                             "gff.json", "appendix.json", "probe.json"}) {
        std::string path = join(cfg.out_dir, name);
        if (!fsys::exists(path)) continue;
        html << "<h2>" << name << "</h2><pre>" << read_json(path).dump(1) << "</pre>\n";
    }
    for (const char* name : {"tembedding.svg", "tgraph_0.svg", "gff_overlay.svg"}) {
        std::string path = join(cfg.out_dir, name);
        if (!fsys::exists(path)) continue;
        html << "<h2>" << name << "</h2><img src=\"" << name << "\" width=\"640\"/>\n";
    }
    html << "</body></html>\n";
    std::ofstream os(join(cfg.out_dir, "report.html"));
    os << html.str();
    man.artifact(join(cfg.out_dir, "report.html"), "report");
    return 0;
}

inline int run_pipeline(const std::string& stage, const ExperimentConfig& cfg) {
    fsys::create_directories(cfg.out_dir);
    Manifest man;
    man.set("stage", stage);
    man.set("seed", cfg.seed);
    man.set("config", cfg.raw);
    int rc = 0;
    if (stage == "validate") rc = stage_validate(cfg, man);
    else if (stage == "build-tgraph") rc = stage_build_tgraph(cfg, man);
    else if (stage == "walk") rc = stage_walk(cfg, man);
    else if (stage == "couple") rc = stage_couple(cfg, man);
    else if (stage == "gff") rc = stage_gff(cfg, man);
    else if (stage == "appendix") rc = stage_appendix(cfg, man);
    else if (stage == "probe") rc = stage_probe(cfg, man);
    else if (stage == "report") rc = stage_report(cfg, man);
    else throw std::invalid_argument("unknown stage: " + stage);
    man.save(join(cfg.out_dir, "manifest_" + stage + ".json"));
    return rc;
}

}  // namespace tembed
