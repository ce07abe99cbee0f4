#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "w4d/deformation.hpp"
#include "w4d/geometry.hpp"

using namespace w4d;

namespace {
Grid torus(int n) { return Grid::box(PI, n, true); }

cfield smooth_data(const Grid& g, double amp) {
    return sample(g, [&](cplx z) {
        const double x = z.real(), y = z.imag();
        return amp * (std::exp(I * (2 * x)) * std::cos(y) + 0.5 * std::exp(-I * (y - x)) + 0.3 * std::sin(3 * y));
    });
}

double relative_drift(const std::vector<SeriesRow>& s, bool w) {
    double d = 0;
    const double ref = w ? s.front().W : s.front().C1;
    for (const auto& r : s) d = std::max(d, std::abs((w ? r.W : r.C1) - ref) / std::abs(ref));
    return d;
}
}  // namespace

TEST_CASE("spectral operators") {
    Grid g = torus(32);
    Spectral2D sp(g);
    const auto f = sample(g, [](cplx z) { return std::exp(I * (z.real() + 2 * z.imag())); });
    const auto a = sp.dz(f), b = sp.dzbar(f), c = sp.dzdzbar(f);
    // d_z e^{i(x+2y)} = (i + 2)/2 e,  d_zbar = (i - 2)/2 e
    double e = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        e = std::max({e, std::abs(a[k] - 0.5 * (I + 2.0) * f[k]), std::abs(b[k] - 0.5 * (I - 2.0) * f[k]),
                      std::abs(c[k] + 1.25 * f[k])});
    CHECK(e < 1e-12);
    const auto back = sp.inv_dzdzbar(c);
    for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(back[k] - f[k]));
    CHECK(e < 1e-12);

    Spectral1D s1(64, 2 * PI);
    cfield h(64);
    for (int i = 0; i < 64; ++i) h[i] = std::sin(3 * i * s1.h());
    const auto d3 = s1.deriv(h, 3);
    double e1 = 0;
    for (int i = 0; i < 64; ++i) e1 = std::max(e1, std::abs(d3[i] + 27.0 * std::cos(3 * i * s1.h())));
    CHECK(e1 < 1e-10);
    CHECK_THROWS_AS(Spectral2D(Grid::box(1.0, 16)), Error);
}

TEST_CASE("auxiliary fields match the reference mode solution") {
    // p = 0.3 e^{ix} + 0.2 e^{2iy}, eps = -1: w1 = 2 C cos(x - 2y) with
    // 2 C cos(0.4 + 2.2) = 0.12339198048512841 + 0.16452264064683786 i  (tools/oracles.py)
    Grid g = torus(32);
    const auto p = sample(g, [](cplx z) { return 0.3 * std::exp(I * z.real()) + 0.2 * std::exp(2.0 * I * z.imag()); });
    const auto aux = solve_auxiliary(p, -1, g);
    const cplx C2 = cplx(0.12339198048512841, 0.16452264064683786) / std::cos(2.6);
    double e = 0, gauge = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            e = std::max(e, std::abs(aux.w1[k] - C2 * std::cos(g.x(i) - 2 * g.y(j))));
            gauge = std::max(gauge, std::abs(aux.u[k] - aux.w1[k] - aux.w2[k]));
        }
    CHECK(e < 1e-13);
    CHECK(gauge < 1e-14);
    // defining relations
    Spectral2D sp(g);
    const auto P = to_complex(abs2(p));
    const auto l1 = sp.dz(aux.w1), r1 = sp.dzbar(P), l2 = sp.dzbar(aux.w2), r2 = sp.dz(P);
    double d = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        d = std::max({d, std::abs(l1[k] - 2.0 * r1[k]), std::abs(l2[k] - 2.0 * r2[k])});
    CHECK(d < 1e-13);
}

TEST_CASE("state construction is validated") {
    Grid g = torus(16);
    const cfield p(g.size(), 0.1);
    CHECK_THROWS_AS(make_state(Grid::box(PI, 16), p, -1), Error);
    CHECK_THROWS_AS(make_state(g, p, 0), Error);
    CHECK_THROWS_AS(make_state(g, cfield(5), -1), Error);
    const auto s = make_state(g, p, -1);
    CHECK_THROWS_AS(ds2_step(s, 2 * stable_dt(g, 1.0), Spectral2D(g)), Error);
}

TEST_CASE("Willmore functional is invariant; drift falls at RK4 order") {
    Grid g = torus(32);
    const auto s0 = make_state(g, smooth_data(g, 0.3), -1);
    EvolveOptions eo;
    eo.T = 0.05;
    eo.track_spinors = false;
    eo.dt = stable_dt(g);
    const auto r1 = evolve_and_track(s0, eo);
    eo.dt = r1.dt / 2;
    const auto r2 = evolve_and_track(s0, eo);
    const double d1 = relative_drift(r1.series, true), d2 = relative_drift(r2.series, true);
    CHECK(d1 < 1e-6);
    CHECK(relative_drift(r1.series, false) == doctest::Approx(d1));
    CHECK(std::log2(d1 / d2) > 3.5);
    CHECK(r1.series.front().W == doctest::Approx(4 * r1.series.front().C1));
    for (std::size_t k = 1; k < r1.series.size(); ++k) CHECK(r1.series[k].t > r1.series[k - 1].t);
    CHECK(std::isnan(r1.series.front().dirac_residual));
}

TEST_CASE("blow-up is reported") {
    Grid g = torus(16);
    auto s0 = make_state(g, smooth_data(g, 2.0), -1);
    EvolveOptions eo;
    eo.T = 0.01;
    eo.track_spinors = false;
    eo.step.blowup = 0.5;
    CHECK_THROWS_AS(evolve_and_track(s0, eo), BlowupError);
}

TEST_CASE("evolved soliton follows the explicit time dependence") {
    const double L = 8 * PI;
    Grid g{-L, L, -L, L, 128, 128, true, true};
    SolitonParams sp;
    sp.lambda = {0.5};
    sp.mu = {0.0};
    sp.nu = {1.0};
    const auto p0 = sample(g, [&](cplx z) { return soliton1_p(sp, z); });
    EvolveOptions eo;
    eo.T = 0.05;
    eo.dt = 0.0025;
    eo.track_spinors = false;
    const auto r = evolve_and_track(make_state(g, p0, -1), eo);
    auto st = sp;
    st.t2 = 0.05;
    double err = 0, peak = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double ex = std::norm(soliton1_p(st, g.z(i, j)));
            peak = std::max(peak, ex);
            err = std::max(err, std::abs(std::norm(r.final_state.p[g.idx(i, j)]) - ex));
        }
    CHECK(err / peak < 1e-3);
}

TEST_CASE("coordinate velocity: flow and local formula agree") {
    const double L = 4 * PI;
    const int n = 256;
    Grid gp{-L, L, -L, L, n, n, true, true};
    Grid g = gp;
    g.periodic_x = g.periodic_y = false;
    g.x_max = g.y_max = -L + (n - 1) * gp.hx();
    SolitonParams sp;
    sp.lambda = {0.5};
    sp.mu = {0.3};
    sp.nu = {1.0};
    const auto f = soliton_fields(sp, g);
    const auto aux = solve_auxiliary(f.p, -1, gp);
    ImmerseOptions io;
    io.i0 = io.j0 = n / 2;
    const auto v = coordinate_velocity(f.sq, f.p, aux, io);
    CHECK(v.formula_gap < 1e-3);
    CHECK(v.reconstruction_gap < 1e-3);
    for (int c = 0; c < 4; ++c) CHECK(v.flow[c][g.idx(n / 2, n / 2)] == 0.0);
}
