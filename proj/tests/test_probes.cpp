#include <catch2/catch.hpp>

#include "tembed/probes.hpp"

using namespace tembed;

TEST_CASE("variance probe: trace identity, Bennett tails, regime guard") {
    PeriodicWalk pw = make_periodic_walk(PeriodicKind::Honeycomb, 6, 6, 0.5, 1.0,
                                         TGraphFlavor::BlackFlat);
    auto res = mc_variance_probe(pw, {0.05, 1.0}, {cplx(1, 0), cplx(0, 1)}, {1.0, 2.0}, 8000, 11);
    // t below delta^2 flagged (delta = mesh = 0.5 here, delta^2 = 0.25)
    REQUIRE(pw.delta == Approx(0.5));
    for (const auto& r : res.trace) {
        if (r.params.at("t") < pw.delta * pw.delta) {
            REQUIRE_FALSE(r.regime_ok);
            continue;
        }
        REQUIRE(r.regime_ok);
        REQUIRE(std::abs(r.estimate - r.params.at("target")) <= 3.5 * r.std_error);
    }
    // directional variances over {1, i} sum to about t
    double sum = 0.0, se = 0.0;
    for (const auto& r : res.directional) {
        if (r.params.at("t") != 1.0) continue;
        sum += r.estimate;
        se += r.std_error;
    }
    REQUIRE(std::abs(sum - 1.0) <= 3.5 * se);
    // tails below the Bennett bound (with slack)
    for (const auto& r : res.tails) {
        if (!r.regime_ok) continue;
        REQUIRE(r.estimate <= r.params.at("bound") + 3.0 * r.std_error);
    }
}

TEST_CASE("crossing probes: positive lower confidence bounds, guard") {
    const double delta_track = 1.0;
    PeriodicWalk pw = make_periodic_walk(PeriodicKind::Checkerboard, 6, 6, delta_track, 1.0,
                                         TGraphFlavor::BlackFlat);
    double r = 20.0 * pw.delta;
    ProbeResult fwd = mc_crossing_forward(pw, r, 25000, 5);
    REQUIRE(fwd.regime_ok);
    REQUIRE(fwd.estimate - 3.0 * fwd.std_error > 0.0);
    REQUIRE(fwd.estimate < 1.0);
    ProbeResult guard = mc_crossing_forward(pw, 0.5 * pw.delta, 10, 5);
    REQUIRE_FALSE(guard.regime_ok);

    PeriodicBackwardWalk pb = make_periodic_backward_walk(PeriodicKind::Honeycomb, 6, 6, 1.0);
    ProbeResult bwd = mc_crossing_backward(pb, 20.0 * pb.delta, 4000, 6);
    REQUIRE(bwd.regime_ok);
    REQUIRE(bwd.estimate - 3.0 * bwd.std_error > 0.0);
}

TEST_CASE("backward periodic chain: probabilities normalize") {
    PeriodicBackwardWalk pb = make_periodic_backward_walk(PeriodicKind::Honeycomb, 6, 6, 1.0);
    REQUIRE(pb.n_nodes == 36);
    for (int v = 0; v < pb.n_nodes; ++v) {
        REQUIRE(pb.out[v].size() >= 2);
        for (const auto& tr : pb.out[v]) REQUIRE(tr.rate > 0.0);
    }
}

TEST_CASE("Lipschitz dichotomy witness reports the moderate branch for affine data") {
    std::vector<std::pair<cplx, double>> h;
    std::vector<std::pair<cplx, cplx>> grad;
    cplx beta(0.6, -0.2);
    for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) {
            cplx z(0.1 * i, 0.1 * j);
            h.push_back({z, project_coeff(z, beta)});
            grad.push_back({z, std::conj(beta)});
        }
    LipschitzWitness w = lipschitz_witness(h, grad, 0.0, 1.0);
    REQUIRE(w.moderate_branch);
    REQUIRE(w.ratio == Approx(std::abs(beta) / (2.0 * std::abs(beta))).epsilon(0.1));
}

TEST_CASE("assumption report region restriction") {
    TEmbedding t = make_checkerboard(10, 10, 1.0);
    OrigamiField eta = compute_eta(t);
    OrigamiMap om = compute_origami(t, eta);
    auto whole = check_assumptions(t, om, {4.0}, {});
    auto region = check_assumptions(t, om, {4.0}, {}, 1, 1000000,
                                    std::make_pair(cplx(5.0, 5.0), 2.5));
    REQUIRE(region.lip[0].pairs < whole.lip[0].pairs);
    REQUIRE(region.lip[0].kappa <= whole.lip[0].kappa + 1e-12);
    REQUIRE(region.region_radius == 2.5);
}

TEST_CASE("oscillation profiles: constant, affine, coupling field") {
    SECTION("constant and affine fields") {
        std::vector<std::pair<cplx, cplx>> flat, affine;
        for (int i = -20; i <= 20; ++i)
            for (int j = -20; j <= 20; ++j) {
                cplx z(0.1 * i, 0.1 * j);
                flat.push_back({z, cplx(2.5, -1.0)});
                affine.push_back({z, z * cplx(0.3, 0.7)});
            }
        auto p0 = oscillation_profile(flat, 0.0, {0.5, 1.0, 1.5});
        for (double o : p0.osc) REQUIRE(o == 0.0);
        auto p1 = oscillation_profile(affine, 0.0, {0.4, 0.8, 1.2, 1.6});
        REQUIRE(p1.slope == Approx(1.0).margin(0.05));
        REQUIRE(p1.r_squared >= 0.99);
        REQUIRE_THROWS_AS(oscillation_profile(affine, 0.0, {0.5, 1.0}), std::invalid_argument);
    }
    SECTION("coupling-derived field has a positive fitted exponent") {
        const int n = 32;
        TEmbedding t = make_checkerboard(n, n, 1.0 / n);
        OrigamiField eta = compute_eta(t);
        CouplingMatrix cm = invert_kasteleyn(kasteleyn_matrix(t));
        auto split = std::make_shared<Splitting>(make_splitting(t, eta, 1));
        int anchor = checkerboard_cell(n, 2, 3);
        if (t.black_cell(anchor)) anchor = checkerboard_cell(n, 2, 4);
        THoloField f = coupling_field_white(t, eta, cm, anchor, split);
        std::vector<std::pair<cplx, cplx>> samples;
        for (const auto& [cell, vals] : f.values) {
            cplx ctr(0, 0);
            for (int v : t.dual.cell[cell])
                ctr += t.pos[v] / static_cast<double>(t.dual.cell[cell].size());
            samples.push_back({ctr, vals[0]});
        }
        cplx center(0.75, 0.75);  // away from the anchor near (0.08, 0.11)
        double delta = 1.0 / n;
        auto prof = oscillation_profile(samples, center,
                                        {2 * delta, 3 * delta, 4 * delta, 6 * delta, 8 * delta});
        REQUIRE(prof.slope > 0.0);
        REQUIRE(prof.r_squared >= 0.9);
    }
}
