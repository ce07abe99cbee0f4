#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "w4d/immersion.hpp"

using namespace w4d;

namespace {
// psi1 = 1, psi2 = zbar, phi1 = z, phi2 = 1 + z^2/2 on [-1.5, 1.5]^2, h = 0.05
SpinorQuad minimal_quad(const Grid& g) {
    const auto h1 = sample(g, [](cplx z) { return z; });
    const auto h2 = sample(g, [](cplx z) { return 1.0 + 0.5 * z * z; });
    const auto a1 = sample(g, [](cplx) { return cplx(1.0); });
    const auto a2 = sample(g, [](cplx z) { return std::conj(z); });
    return minimal_spinors(g, h1, h2, a1, a2, Rep::R4);
}
Potentials zero(const Grid& g) { return {cfield(g.size(), 0.0), cfield(g.size(), 0.0)}; }
}  // namespace

TEST_CASE("minimal R4 immersion matches reference coordinates") {
    Grid g = Grid::box(1.5, 61);
    const auto sq = minimal_quad(g);
    ImmerseOptions io;
    io.i0 = io.j0 = 30;  // z = 0
    const auto sp = immerse(sq, zero(g), io);
    // tools/oracles.py: X(1 + 0.5i)
    const double ref[4] = {0.0546875, -1.1875, 1.125, -0.27083333333333331};
    const auto k = g.idx(50, 40);
    for (int c = 0; c < 4; ++c) CHECK(sp.X[c][k] == doctest::Approx(ref[c]).epsilon(1e-6));
    for (int c = 0; c < 4; ++c) CHECK(sp.X[c][g.idx(30, 30)] == 0.0);
    CHECK(sp.max_imag < 1e-12);
}

TEST_CASE("immersion is path independent") {
    Grid g = Grid::box(1.5, 61);
    const auto sq = minimal_quad(g);
    ImmerseOptions a, b;
    b.order = PathOrder::column_first;
    const auto pa = immerse(sq, zero(g), a), pb = immerse(sq, zero(g), b);
    double gap = 0;
    for (int c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < g.size(); ++k) gap = std::max(gap, std::abs(pa.X[c][k] - pb.X[c][k]));
    CHECK(gap < 1e-10 * diameter(pa));
    const auto w = weierstrass_form(sq);
    // d(omega) by one-sided stencils at the edges: O(h^2) there, check the rate
    Grid gf = Grid::box(1.5, 121);
    const double c0 = closedness_residual(w), c1 = closedness_residual(weierstrass_form(minimal_quad(gf)));
    CHECK(c0 < 1e-2);
    CHECK(std::log2(c0 / c1) > 1.8);
    const auto I1 = integrate_contour(w, straight_contour({0, 0}, {60, 45}, true));
    const auto I2 = integrate_contour(w, straight_contour({0, 0}, {60, 45}, false));
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(I1[c] - I2[c]) < 1e-10);
        CHECK(std::abs(I1[c].real() - pa.X[c][g.idx(60, 45)]) < 1e-10);
    }
}

TEST_CASE("non-solutions are refused") {
    Grid g = Grid::box(1.0, 32);
    auto sq = minimal_quad(g);
    sq.phi1 = sample(g, [](cplx z) { return std::conj(z) * z; });
    CHECK_THROWS_AS(immerse(sq, zero(g)), Error);
}

TEST_CASE("ambient conformal factor") {
    Grid g = Grid::box(1.5, 61);
    const auto sp = immerse(minimal_quad(g), zero(g));
    const auto cf = conformal_scale(sp, 1.0);
    const auto k = g.idx(50, 40);
    double r2 = 0;
    for (int c = 0; c < 4; ++c) r2 += sp.X[c][k] * sp.X[c][k];
    CHECK(cf.e2s[k] == doctest::Approx(std::pow(1 + r2 / 4, -2)).epsilon(1e-14));
    const auto cn = conformal_scale(sp, -0.5);
    CHECK(cn.e2s[k] == doctest::Approx(std::pow(1 - 0.5 * r2 / 4, -2)).epsilon(1e-14));
}

TEST_CASE("timelike minimal immersion is real and closed") {
    Grid g = Grid::box(1.0, 64);
    // psi depends on eta only, phi on xi only
    const auto h1 = sample(g, [](cplx z) { return cplx(z.real(), 0.3); });
    const auto h2 = sample(g, [](cplx z) { return cplx(1.0 + z.real() * z.real(), 0); });
    const auto a1 = sample(g, [](cplx z) { return cplx(1.0, z.imag()); });
    const auto a2 = sample(g, [](cplx z) { return cplx(z.imag(), 0); });
    const auto sq = minimal_spinors(g, h1, h2, a1, a2, Rep::R31T);
    const auto sp = immerse(sq, zero(g));
    CHECK(sp.sig.tag == Sig::R31);
    CHECK(closedness_residual(sq) < 1e-2);
    CHECK(sp.max_imag < 1e-12);
}
