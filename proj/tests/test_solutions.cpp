#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "w4d/solutions.hpp"

using namespace w4d;

// reference values: tools/oracles.py
namespace {
SolitonParams one_soliton() {
    SolitonParams sp;
    sp.lambda = {0.5};
    sp.mu = {cplx(0.3, 0.1)};
    sp.nu = {0.8};
    sp.eps = -1;
    return sp;
}
}  // namespace

TEST_CASE("minimal data solves the free system") {
    Grid g = Grid::box(1.0, 32);
    const auto h1 = sample(g, [](cplx z) { return z; });
    const auto h2 = sample(g, [](cplx z) { return 1.0 + 0.5 * z * z; });
    const auto a1 = sample(g, [](cplx) { return cplx(1.0); });
    const auto a2 = sample(g, [](cplx z) { return std::conj(z); });
    const auto sq = minimal_spinors(g, h1, h2, a1, a2, Rep::R4);
    Potentials zero{cfield(g.size(), 0.0), cfield(g.size(), 0.0)};
    CHECK(dirac_residual(sq, zero) < 1e-10);
    // z-bar dependence in phi violates phi_zbar = 0
    CHECK_THROWS_AS(minimal_spinors(g, a2, h2, a1, a2, Rep::R4), Error);
}

TEST_CASE("one soliton: closed form against reference values") {
    const auto sp = one_soliton();
    CHECK(std::norm(soliton1_p(sp, {0, 0})) == doctest::Approx(1.1687363038714389).epsilon(1e-13));
    CHECK(std::norm(soliton1_p(sp, {1, 0.5})) == doctest::Approx(0.088445433313525265).epsilon(1e-13));
    CHECK(std::norm(soliton1_p(sp, {-2, 3})) == doctest::Approx(0.0037067154099743073).epsilon(1e-12));
    auto st = sp;
    st.t2 = 0.2;
    CHECK(std::norm(soliton1_p(st, {1, 0.5})) == doctest::Approx(0.072554954709836861).epsilon(1e-13));
}

TEST_CASE("one soliton: linear system, Jacobi and log-det agree") {
    const auto sp = one_soliton();
    for (cplx z : {cplx(0, 0), cplx(1, 0.5), cplx(-2, 3)}) {
        CHECK(std::abs(soliton_p_at(sp, z) - soliton1_p(sp, z)) < 1e-12);
        CHECK(soliton_p2_jacobi(sp, z) == doctest::Approx(std::norm(soliton1_p(sp, z))).epsilon(1e-11));
    }
    auto st = sp;
    st.t2 = 0.2;
    CHECK(std::abs(soliton_p_at(st, {1, 0.5}) - soliton1_p(st, {1, 0.5})) < 1e-12);

    Grid g = Grid::box(10.0, 201);
    const auto ld = soliton_p2_logdet(sp, g, 8);
    double gap = 0, peak = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (ld.mask[k]) continue;
            const double ex = std::norm(soliton1_p(sp, g.z(i, j)));
            peak = std::max(peak, ex);
            gap = std::max(gap, std::abs(ld.p2[k] - ex));
        }
    CHECK(gap / peak < 1e-4);
}

TEST_CASE("soliton spinor fields") {
    Grid g = Grid::box(10.0, 161);
    const auto r = soliton_fields(one_soliton(), g);
    CHECK(r.closed_gap < 1e-12);
    CHECK(r.tilde_gap < 1e-12);
    // finite-difference residual: must fall at >= 2nd order under refinement
    const auto rf = soliton_fields(one_soliton(), Grid::box(10.0, 321));
    const double r0 = dirac_residual(r.sq, {r.p, {}}), r1 = dirac_residual(rf.sq, {rf.p, {}});
    CHECK(r0 < 1e-2);
    CHECK(std::log2(r0 / r1) > 1.8);

    SolitonParams two;
    two.lambda = {0.5, 0.8};
    two.mu = {0.0, 3.0};
    two.nu = {1.0, 1.0};
    const auto r2 = soliton_fields(two, g);
    CHECK(r2.tilde_gap < 1e-10);
    for (cplx z : {cplx(0.2, 0.1), cplx(-1.3, 2.0)})
        CHECK(soliton_p2_jacobi(two, z) == doctest::Approx(std::norm(soliton_p_at(two, z))).epsilon(1e-10));
}

TEST_CASE("soliton parameters are validated") {
    SolitonParams sp = one_soliton();
    sp.eps = 0;
    CHECK_THROWS_AS(sp.validate(), Error);
    sp = one_soliton();
    sp.lambda = {0.5, 0.5};
    sp.mu = {0.0, 1.0};
    sp.nu = {1.0, 1.0};
    CHECK_THROWS_AS(sp.validate(), Error);
    sp = one_soliton();
    sp.spectral = 0.1;
    CHECK_THROWS_AS(sp.validate(), Error);
}

TEST_CASE("dromion Willmore value") {
    DromionParams dp;
    dp.rho = {0.5};
    dp.X = {Profile{}};
    dp.Y = {Profile{}};
    CHECK(willmore_dromion(dp) == doctest::Approx(0.5753641449035618).epsilon(1e-14));
    Grid g = Grid::box(12.0, 256);
    const auto r = dromion_p2(dp, g);
    CHECK(std::abs(2 * r.integral - 0.5753641449035618) / 0.5753641449035618 < 1e-2);
    dp.rho = {1.0};
    CHECK_THROWS(willmore_dromion(dp));
}

TEST_CASE("constant potentials") {
    const cplx p0(0.5, 0.2);
    double tl[2], h2[2];
    for (int l = 0; l < 2; ++l) {
        Grid g = Grid::box(1.0, l ? 161 : 81);
        const auto sq = constant_p_timelike(g, p0, 1.0);
        tl[l] = dirac_residual(sq, {cfield(g.size(), p0), {}});
        const auto h = constant_h2_r4(g, 1.0, cplx(0.6, 0.8), cplx(-0.8, 0.6));
        h2[l] = dirac_residual(h.sq, h.pot);
    }
    CHECK(tl[1] < 1e-3);
    CHECK(h2[1] < 1e-3);
    CHECK(std::log2(tl[0] / tl[1]) > 1.8);
    CHECK(std::log2(h2[0] / h2[1]) > 1.8);
    Grid g = Grid::box(1.0, 64);
    CHECK_THROWS_AS(constant_p_timelike(g, p0, 0.0), Error);
    CHECK_THROWS_AS(constant_h2_r4(g, 1.0, 0.3, 0.2), Error);
}

TEST_CASE("representation names round-trip") {
    for (Rep r : {Rep::R4, Rep::R22, Rep::R31, Rep::R3, Rep::R21, Rep::R31T, Rep::R22T})
        CHECK(rep_from_string(to_string(r)) == r);
    CHECK(is_timelike(Rep::R31T));
    CHECK_FALSE(is_timelike(Rep::R31));
    CHECK_THROWS_AS(rep_from_string("R5"), Error);
}
