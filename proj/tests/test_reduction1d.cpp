#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "w4d/reduction1d.hpp"

using namespace w4d;

// reference values: tools/oracles.py
namespace {
cfield sech(const Grid1D& g, double a, double v) {
    cfield f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = a / std::cosh(a * g.x(i)) * std::exp(I * v * g.x(i));
    return f;
}
double c1_drift(const std::vector<Series1DRow>& s) {
    double d = 0;
    for (const auto& r : s) d = std::max(d, std::abs(r.C1 - s.front().C1) / std::abs(s.front().C1));
    return d;
}
}  // namespace

TEST_CASE("AKNS with constant potentials") {
    const cplx p(0.3, 0.2), q = -std::conj(p);
    const auto m = akns_constant(p, q, 0.7, 1.3);
    const cplx ref[4] = {{0.26124570139729619, 0.6723373114089215},
                         {0.57628912406479005, 0.38419274937652659},
                         {-0.57628912406479005, 0.38419274937652664},
                         {0.26124570139729619, -0.67233731140892161}};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(m[k] - ref[k]) < 1e-14);

    AknsProblem pr;
    pr.grid = {0.0, 2.6, 257, false};
    pr.p.assign(257, p);
    pr.q.assign(257, q);
    pr.lambda = 0.7;
    const auto F = akns_solve(pr, false);
    const auto& last = F.phi[128];  // x = 1.3
    for (int k = 0; k < 4; ++k) CHECK(std::abs(last[k] - ref[k]) < 1e-9);
    CHECK(F.det_drift < 1e-10);
    pr.lambda = 1e3;
    CHECK_THROWS_AS(akns_solve(pr), Error);
}

TEST_CASE("KdV traveling wave by shooting") {
    CHECK(kdv_shooting_amplitude(1.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(kdv_shooting_amplitude(2.25) == doctest::Approx(1.125).epsilon(1e-8));
    Grid1D g{-30, 60, 512, true};
    const auto q = kdv_soliton_profile(g, 1.0, 0.0);
    double e = 0;
    for (int i = 0; i < g.n; ++i) e = std::max(e, std::abs(q[i] - 0.5 / std::pow(std::cosh(g.x(i) / 2), 2)));
    CHECK(e < 1e-7);
}

TEST_CASE("NLS: reference invariants and conservation") {
    Grid1D g{-20, 40, 1024, true};
    Evolve1DOptions eo;
    eo.T = 0.2;
    const auto r = nls_evolve(sech(g, 1.0, 0.5), -1, g, eo);
    CHECK(r.series.front().mass == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.series.front().energy == doctest::Approx(-0.16666666666666666).epsilon(1e-8));
    CHECK(c1_drift(r.series) < 1e-8);
    eo.dt = 1.0;
    CHECK_THROWS_AS(nls_evolve(sech(g, 1.0, 0.5), -1, g, eo), Error);
}

TEST_CASE("KdV and mKdV: reference invariants and conservation") {
    Grid1D g{-50, 100, 1024, true};
    Evolve1DOptions eo;
    eo.T = 0.05;
    const auto q0 = kdv_soliton_profile(g, 1.0, 0.0);
    const auto k = kdv_evolve(q0, g, eo);
    CHECK(k.series.front().mass == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(k.series.front().energy == doctest::Approx(0.66666666666666663).epsilon(1e-8));
    CHECK(c1_drift(k.series) < 1e-8);

    rfield p0(g.n);
    for (int i = 0; i < g.n; ++i) p0[i] = 1 / std::cosh(g.x(i));
    const auto m = mkdv_evolve(p0, g, eo);
    CHECK(m.series.front().mass == doctest::Approx(PI).epsilon(1e-10));
    CHECK(m.series.front().C1 == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(m.series.front().energy == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(c1_drift(m.series) < 1e-8);
}

TEST_CASE("curves on the sphere and the hyperboloid") {
    Grid1D g{-20, 40, 1024, true};
    const auto p = sech(g, 1.0, 0.5);
    const auto c = curve_from_reduction(p, g, 0.5, 0.5, Rep::R4);
    CHECK(c.radius2 == doctest::Approx(1.0));
    CHECK(c.constraint_defect < 1e-10);
    CHECK(c.imag_defect < 1e-10);
    const auto h = curve_from_reduction(p, g, 0.5, 0.5, Rep::R22);
    CHECK(h.constraint_defect < 1e-8);
    CHECK_THROWS_AS(curve_from_reduction(p, g, 0.5, -0.5, Rep::R4), Error);
}

TEST_CASE("separable surfaces") {
    Grid1D g{-10, 20, 256, false};
    const auto p = sech(g, 1.0, 0.0);
    // 2D immersion of the same data: quadrature error in y, falling at >= 2nd order
    Grid1D gf{-10, 20, 511, false};
    const double c0 = cone_immersion_gap(p, g, 0.5, 0.5, Rep::R4, 1.0, 33);
    const double c1 = cone_immersion_gap(sech(gf, 1.0, 0.0), gf, 0.5, 0.5, Rep::R4, 1.0, 65);
    CHECK(c0 < 1e-5);
    CHECK(std::log2(c0 / c1) > 1.8);
    const auto rev = surface_of_revolution(p, g, 0.5, 0.3, 1.0, 33);
    CHECK(rev.metric_y_variation < 1e-8);
    CHECK(rev.metric_A_gap < 1e-6);
}

TEST_CASE("NLS-driven curve motion stays on the sphere") {
    Grid1D g{-20, 40, 512, true};
    Evolve1DOptions eo;
    eo.T = 0.2;
    eo.sample_every = 20;
    const auto m = curve_motion(sech(g, 1.0, 0.5), -1, g, 0.5, 0.5, eo);
    CHECK(m.frames.size() >= 2u);
    CHECK(m.max_constraint_defect < 1e-8);
}
