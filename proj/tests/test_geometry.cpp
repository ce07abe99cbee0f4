#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "w4d/geometry.hpp"

using namespace w4d;

namespace {
SolitonParams soliton() {
    SolitonParams sp;
    sp.lambda = {0.5};
    sp.mu = {0.0};
    sp.nu = {1.0};
    return sp;
}
}  // namespace

TEST_CASE("soliton Willmore quadrature matches the reference integral") {
    // 4 int |p|^2 over [-40,40]^2 for nu = 1 (tools/oracles.py); the plane value is 4 pi
    Grid g = Grid::box(40.0, 256);
    const auto r = soliton_fields(soliton(), g);
    const auto geo = curvatures(r.sq, {r.p, {}});
    CHECK(geo.W == doctest::Approx(12.560592061883076).epsilon(1e-3));
    CHECK(geo.W_area == doctest::Approx(geo.W).epsilon(1e-6));
    CHECK(geo.conformality_defect < 1e-10);
}

TEST_CASE("closed metric agrees with the exact 1-form metric") {
    Grid g = Grid::box(6.0, 96);
    const auto r = soliton_fields(soliton(), g);
    const auto mc = metric_closed(r.sq);
    const auto mf = metric_from_form(weierstrass_form(r.sq));
    double gap = 0, scale = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        gap = std::max(gap, std::abs(mc.g_zzb[k] - mf.g_zzb[k]));
        scale = std::max(scale, std::abs(mc.g_zzb[k]));
    }
    CHECK(gap < 1e-12 * scale);
    CHECK(mf.conformality_defect < 1e-12);
}

TEST_CASE("numeric geometry converges to the closed forms") {
    double eF[3], eH[3];
    const int ns[3] = {65, 129, 257};
    for (int l = 0; l < 3; ++l) {
        Grid g = Grid::box(6.0, ns[l]);
        const auto r = soliton_fields(soliton(), g);
        ImmerseOptions io;
        io.i0 = io.j0 = g.nx / 2;
        const auto sp = immerse(r.sq, {r.p, {}}, io);
        const auto geo = curvatures(r.sq, {r.p, {}});
        const auto ng = geometry_numeric(sp);
        const auto mc = metric_closed(r.sq);
        // compare on the fixed physical window [-3,3]^2
        double eh = 0, ef = 0, sh = 0, sf = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (std::abs(g.x(i)) > 3 || std::abs(g.y(j)) > 3) continue;
                const auto k = g.idx(i, j);
                eh = std::max(eh, std::abs(ng.H2[k] - geo.H2_vec[k]));
                sh = std::max(sh, std::abs(geo.H2_vec[k]));
                ef = std::max(ef, std::abs(ng.metric.factor[k] - mc.factor[k]));
                sf = std::max(sf, std::abs(mc.factor[k]));
            }
        eF[l] = ef / sf, eH[l] = eh / sh;
    }
    CHECK(std::log2(eF[0] / eF[1]) > 1.8);
    CHECK(std::log2(eF[1] / eF[2]) > 1.8);
    CHECK(std::log2(eH[0] / eH[1]) > 1.8);
    CHECK(std::log2(eH[1] / eH[2]) > 1.8);
}

TEST_CASE("closed H2 scalar equals |H|^2 from the vector") {
    Grid g = Grid::box(6.0, 96);
    const auto r = soliton_fields(soliton(), g);
    const auto geo = curvatures(r.sq, {r.p, {}});
    double gap = 0, sc = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!geo.mask.empty() && geo.mask[k]) continue;
        gap = std::max(gap, std::abs(geo.H2[k] - geo.H2_vec[k]));
        sc = std::max(sc, std::abs(geo.H2[k]));
    }
    CHECK(gap < 1e-10 * sc);
}

TEST_CASE("Brioschi curvature of the round sphere chart") {
    Grid g = Grid::box(1.0, 81);
    rfield E(g.size()), F(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
            E[g.idx(i, j)] = 4 / ((1 + r2) * (1 + r2));
        }
    const auto K = brioschi(E, F, E, g);
    double e = 0;
    for (int j = 3; j < g.ny - 3; ++j)
        for (int i = 3; i < g.nx - 3; ++i) e = std::max(e, std::abs(K[g.idx(i, j)] - 1.0));
    CHECK(e < 1e-5);
}

TEST_CASE("normals, Gauss map and Kenmotsu data of a soliton") {
    Grid g = Grid::box(5.0, 128);
    const auto r = soliton_fields(soliton(), g);
    const Potentials pot{r.p, {}};
    const auto gm = normals_and_gauss(r.sq, pot);
    CHECK(gm.quadric_defect < 1e-10);
    CHECK(gm.tangency_defect < 1e-10);
    CHECK(gm.orthonormality_defect < 1e-10);
    CHECK(gm.h_decomposition_gap < 1e-8);
    CHECK(gm.h2_gap < 1e-8);
    const auto kd = kenmotsu_convert(r.sq, pot);
    CHECK(kd.p_gap < 1e-3);
    CHECK(kd.modulus_gap < 1e-4);  // finite-difference F1, F2
}

TEST_CASE("class predicates") {
    Grid g = Grid::box(1.5, 64);
    const auto psi1 = sample(g, [](cplx) { return cplx(1.0); });
    const auto psi2 = sample(g, [](cplx z) { return std::conj(z); });
    const Potentials zero{cfield(g.size(), 0.0), cfield(g.size(), 0.0)};
    // superminimal: phi_a = a_a conj(psi_a)
    const cplx a1(0.5, 0.5), a2 = 2.0;
    cfield phi1(g.size()), phi2(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) phi1[k] = a1 * std::conj(psi1[k]), phi2[k] = a2 * std::conj(psi2[k]);
    const auto sq = minimal_spinors(g, phi1, phi2, psi1, psi2, Rep::R4);
    const auto c = class_predicates(sq, zero);
    CHECK(c.minimal < 1e-12);
    CHECK(c.superminimal_sufficient < 1e-12);
    CHECK(c.superminimal_direct < 1e-8);
    CHECK(c.superminimal_rhs_gap < 1e-8);

    const auto h = constant_h2_r4(g, 1.0, cplx(0.6, 0.8), cplx(-0.8, 0.6));
    CHECK(class_predicates(h.sq, h.pot).constant_h2 < 1e-10);

    CHECK(superminimal_sign(Rep::R4) == 1.0);
    CHECK(superminimal_sign(Rep::R22) == -1.0);
    CHECK_THROWS(superminimal_sign(Rep::R31T));
}
