#pragma once

// Monte Carlo and exact-computation probes of the a priori regularity theory:
// directional variance / tail estimates of the T-graph walks, crossing
// probabilities for the forward and backward walks, and oscillation profiles
// with fitted Holder exponents. Estimators with confidence intervals, not
// proofs; no probe asserts the theory's constants.

#include "tembed/periodic.hpp"
#include "tembed/tholo.hpp"

namespace tembed {

struct ProbeResult {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    uint64_t seed = 0;
    std::map<std::string, double> params;
    bool regime_ok = true;  // false when the requested scale is out of range
};

// ---------------------------------------------------------------------------
// Directional variance and Bennett-type tails

struct VarianceProbeResult {
    std::vector<ProbeResult> directional;  // one per (t, beta)
    std::vector<ProbeResult> tails;        // one per (t, lambda), estimate = frequency
    std::vector<ProbeResult> trace;        // one per t: Tr Var(X_t), target t
};

inline double bennett_bound(double lambda, double t, double delta) {
    return 4.0 * std::exp(-0.5 * lambda * lambda / (1.0 + (2.0 / 3.0) * delta * lambda / std::sqrt(t)));
}

inline VarianceProbeResult mc_variance_probe(const PeriodicWalk& pw, const std::vector<double>& ts,
                                             const std::vector<cplx>& betas,
                                             const std::vector<double>& lambdas, long n_walks,
                                             uint64_t seed) {
    VarianceProbeResult out;
    for (double t : ts) {
        bool regime = t >= pw.delta * pw.delta;
        std::vector<KahanSum> s1(betas.size()), s2(betas.size()), s4(betas.size());
        std::vector<long> tail_hits(lambdas.size(), 0);
        KahanSum tr2, tr4;
        for (long k = 0; k < n_walks; ++k) {
            auto smp = simulate_periodic_walk(pw, static_cast<int>(k % pw.n_nodes), t, seed, k);
            for (size_t b = 0; b < betas.size(); ++b) {
                double x = project_coeff(smp.displacement, betas[b]);
                s1[b].add(x);
                s2[b].add(x * x);
                s4[b].add(x * x * x * x);
            }
            double n2 = std::norm(smp.displacement);
            tr2.add(n2);
            tr4.add(n2 * n2);
            for (size_t l = 0; l < lambdas.size(); ++l)
                if (smp.sup_abs >= 2.0 * lambdas[l] * std::sqrt(t)) tail_hits[l]++;
        }
        for (size_t b = 0; b < betas.size(); ++b) {
            ProbeResult r;
            r.name = "directional-variance";
            double m1 = s1[b].value() / n_walks, m2 = s2[b].value() / n_walks;
            r.estimate = m2 - m1 * m1;
            double m4 = s4[b].value() / n_walks;
            r.std_error = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n_walks);
            r.n_samples = n_walks;
            r.seed = seed;
            r.params = {{"t", t}, {"beta_re", betas[b].real()}, {"beta_im", betas[b].imag()}};
            r.regime_ok = regime;
            out.directional.push_back(r);
        }
        {
            ProbeResult r;
            r.name = "trace-variance";
            double m2 = tr2.value() / n_walks, m4 = tr4.value() / n_walks;
            r.estimate = m2;  // E|X_t - X_0|^2; the drift is zero in expectation
            r.std_error = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n_walks);
            r.n_samples = n_walks;
            r.seed = seed;
            r.params = {{"t", t}, {"target", t}};
            r.regime_ok = regime;
            out.trace.push_back(r);
        }
        for (size_t l = 0; l < lambdas.size(); ++l) {
            ProbeResult r;
            r.name = "bennett-tail";
            double p = static_cast<double>(tail_hits[l]) / n_walks;
            r.estimate = p;
            r.std_error = std::sqrt(std::max(p * (1 - p), 1.0 / n_walks) / n_walks);
            r.n_samples = n_walks;
            r.seed = seed;
            r.params = {{"t", t},
                        {"lambda", lambdas[l]},
                        {"bound", bennett_bound(lambdas[l], t, pw.delta)}};
            r.regime_ok = regime;
            out.tails.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Crossing probes on unfolded periodic walks

/// Forward crossing estimate: walks start at the center of B1 of the
/// rectangle R(z, r) = z + [-3r, 3r] x [-r, r] and must hit B2 before exiting
/// R. r below 10 mesh units is flagged as out of regime.
inline ProbeResult mc_crossing_forward(const PeriodicWalk& pw, double r, long n_walks,
                                       uint64_t seed) {
    ProbeResult res;
    res.name = "forward-crossing";
    res.seed = seed;
    res.params = {{"r", r}, {"delta", pw.delta}};
    if (r < 10.0 * pw.delta) {
        res.regime_ok = false;
        return res;
    }
    long hits = 0;
    for (long k = 0; k < n_walks; ++k) {
        int v = static_cast<int>(k % pw.n_nodes);
        RngStream rng(seed, k);
        cplx x(-2.0 * r, 0.0);  // start at the center of B1; rectangle centered 0
        std::vector<double> w;
        while (true) {
            if (std::abs(x - cplx(2.0 * r, 0.0)) <= 0.5 * r) {
                hits++;
                break;
            }
            if (std::abs(x.real()) > 3.0 * r || std::abs(x.imag()) > r) break;
            double total = pw.total_rate(v);
            w.clear();
            for (const auto& tr : pw.out[v]) w.push_back(tr.rate);
            const auto& tr = pw.out[v][rng.pick_weighted(w, total)];
            x += tr.displacement;
            v = tr.target;
        }
    }
    double p = static_cast<double>(hits) / n_walks;
    res.estimate = p;
    res.std_error = std::sqrt(std::max(p * (1 - p), 1.0 / n_walks) / n_walks);
    res.n_samples = n_walks;
    return res;
}

/// Backward (time-reversed) chain on the torus: explicit backward rates, not
/// trajectory reversal.
struct PeriodicBackwardWalk {
    int n_nodes = 0;
    struct Transition {
        int target;
        double rate;
        cplx displacement;
    };
    std::vector<std::vector<Transition>> out;
    std::vector<double> mu;  // white-face areas, for mu-weighted starts
    double delta = 0.0;

    double total_rate(int n) const {
        double s = 0;
        for (const auto& tr : out[n]) s += tr.rate;
        return s;
    }
};

inline PeriodicBackwardWalk make_periodic_backward_walk(PeriodicKind kind, int n, int m,
                                                        double delta) {
    const int pad = 3;
    TEmbedding t = (kind == PeriodicKind::Honeycomb)
                       ? make_honeycomb(n + 2 * pad, m + 2 * pad, delta)
                       : make_checkerboard(n + 2 * pad, m + 2 * pad, delta);
    OrigamiField eta = compute_eta(t);
    OrigamiMap om = compute_origami(t, eta);
    BackwardStructure bs = backward_structure(t, eta);
    detail::TorusIndexer ix{kind, n, m, delta};
    auto vclass = [&](int v) {
        auto c = ix.vertex_coord(t.pos[v]);
        return ix.vclass({c.first - pad, c.second - pad});
    };
    // representatives: vertices in the central block with defined w(v)
    std::map<int, int> rep;
    for (int v = 0; v < t.num_vertices(); ++v) {
        if (t.dual.is_boundary_vertex[v] || bs.w_of_vertex[v] < 0) continue;
        auto c = ix.vertex_coord(t.pos[v]);
        int i = c.first - pad, j = c.second - pad;
        if (i < 0 || i >= n || j < 0 || j >= m) continue;
        rep.emplace(vclass(v), v);
    }
    std::map<int, int> dense;
    for (const auto& [cls, v] : rep) dense.emplace(cls, static_cast<int>(dense.size()));
    // inverse of v -> w(v) on the patch: white face -> vertex
    std::map<int, int> v_of_w;
    for (int v = 0; v < t.num_vertices(); ++v)
        if (bs.w_of_vertex[v] >= 0) v_of_w[bs.w_of_vertex[v]] = v;

    PeriodicBackwardWalk pb;
    pb.n_nodes = static_cast<int>(dense.size());
    pb.out.resize(pb.n_nodes);
    pb.mu.assign(pb.n_nodes, 0.0);
    pb.delta = t.mesh_delta();
    auto image = [&](int v) { return tgraph_image(t, om, 1.0, TGraphFlavor::WhiteFlat, v); };
    for (const auto& [cls, v] : rep) {
        int me = dense.at(cls);
        pb.mu[me] = t.cell_area[bs.w_of_vertex[v]];
        for (const auto& e : bs.transitions[v]) {
            auto it = v_of_w.find(e.white_cell);
            if (it == v_of_w.end())
                throw std::runtime_error("backward target white face has no interior vertex");
            int v2 = it->second;
            auto it2 = dense.find(vclass(v2));
            if (it2 == dense.end()) throw std::runtime_error("backward torus class missing");
            pb.out[me].push_back({it2->second, e.q, image(v2) - image(v)});
        }
    }
    return pb;
}

inline ProbeResult mc_crossing_backward(const PeriodicBackwardWalk& pb, double r, long n_walks,
                                        uint64_t seed) {
    ProbeResult res;
    res.name = "backward-crossing";
    res.seed = seed;
    res.params = {{"r", r}, {"delta", pb.delta}};
    if (r < 10.0 * pb.delta) {
        res.regime_ok = false;
        return res;
    }
    // mu-weighted start nodes
    double mu_total = 0.0;
    for (double m : pb.mu) mu_total += m;
    long hits = 0;
    for (long k = 0; k < n_walks; ++k) {
        RngStream rng(seed, k);
        int v = static_cast<int>(rng.pick_weighted(pb.mu, mu_total));
        cplx x(-2.0 * r, 0.0);
        std::vector<double> w;
        while (true) {
            if (std::abs(x - cplx(2.0 * r, 0.0)) <= 0.5 * r) {
                hits++;
                break;
            }
            if (std::abs(x.real()) > 3.0 * r || std::abs(x.imag()) > r) break;
            double total = pb.total_rate(v);
            w.clear();
            for (const auto& tr : pb.out[v]) w.push_back(tr.rate);
            const auto& tr = pb.out[v][rng.pick_weighted(w, total)];
            x += tr.displacement;
            v = tr.target;
        }
    }
    double p = static_cast<double>(hits) / n_walks;
    res.estimate = p;
    res.std_error = std::sqrt(std::max(p * (1 - p), 1.0 / n_walks) / n_walks);
    res.n_samples = n_walks;
    return res;
}

// ---------------------------------------------------------------------------
// Oscillation profiles

struct OscillationProfile {
    std::vector<double> radii;
    std::vector<double> osc;
    double slope = 0.0;      // fitted log-log exponent
    double r_squared = 0.0;  // fit quality
    int n_fitted = 0;
};

/// Oscillation ladder of a complex field sampled at points; the fitted slope
/// is the empirical Holder exponent over the given radii.
inline OscillationProfile oscillation_profile(const std::vector<std::pair<cplx, cplx>>& samples,
                                              cplx center, const std::vector<double>& radii) {
    if (radii.size() < 3) throw std::invalid_argument("need at least 3 radii");
    OscillationProfile out;
    for (double r : radii) {
        std::vector<cplx> in;
        for (const auto& [p, v] : samples)
            if (std::abs(p - center) <= r) in.push_back(v);
        double osc = 0.0;
        for (size_t i = 0; i < in.size(); ++i)
            for (size_t j = i + 1; j < in.size(); ++j) osc = std::max(osc, std::abs(in[i] - in[j]));
        out.radii.push_back(r);
        out.osc.push_back(osc);
    }
    // least-squares fit of log osc = slope log r + c over radii with osc > 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (size_t i = 0; i < out.radii.size(); ++i) {
        if (out.osc[i] <= 0) continue;
        double x = std::log(out.radii[i]), y = std::log(out.osc[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    out.n_fitted = n;
    if (n >= 2) {
        double den = n * sxx - sx * sx;
        if (den > 0) {
            out.slope = (n * sxy - sx * sy) / den;
            double ss_tot = syy - sy * sy / n;
            double ss_res = ss_tot - out.slope * (sxy - sx * sy / n);
            out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
        }
    }
    return out;
}

/// Gradient-vs-oscillation dichotomy witness: reports max |D| over B(v, d/2)
/// against osc over B(v, d) / d and which branch the instance sits in.
struct LipschitzWitness {
    double max_gradient = 0.0;
    double osc_over_d = 0.0;
    double ratio = 0.0;  // max_gradient / (osc / d)
    bool moderate_branch = true;  // true: gradient <= C0 osc / d with C0 = 100
};

inline LipschitzWitness lipschitz_witness(const std::vector<std::pair<cplx, double>>& h_samples,
                                          const std::vector<std::pair<cplx, cplx>>& grad_samples,
                                          cplx center, double d) {
    LipschitzWitness w;
    double lo = 1e300, hi = -1e300;
    for (const auto& [p, v] : h_samples)
        if (std::abs(p - center) <= d) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    for (const auto& [p, g] : grad_samples)
        if (std::abs(p - center) <= 0.5 * d) w.max_gradient = std::max(w.max_gradient, std::abs(g));
    w.osc_over_d = (hi - lo) / d;
    w.ratio = w.osc_over_d > 0 ? w.max_gradient / w.osc_over_d : 0.0;
    w.moderate_branch = w.ratio <= 100.0;
    return w;
}

}  // namespace tembed
