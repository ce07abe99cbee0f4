#include "w4d/deformation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "w4d/geometry.hpp"

namespace w4d {

namespace {

constexpr double NaN = std::numeric_limits<double>::quiet_NaN();

void axpy(cfield& y, cplx a, const cfield& x) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

cfield lin(const cfield& y, double a, const cfield& x) {
    cfield r = y;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += a * x[k];
    return r;
}

struct Fields {
    cfield p;
    std::array<cfield, 4> s;  // psi1, phi1, psi2, phi2
    bool spinors = false;
};

Fields combine(const Fields& y, double a, const Fields& k) {
    Fields r;
    r.spinors = y.spinors;
    r.p = lin(y.p, a, k.p);
    if (y.spinors)
        for (int c = 0; c < 4; ++c) r.s[c] = lin(y.s[c], a, k.s[c]);
    return r;
}

// RHS of the coupled system.  Pair 1 carries (p, eps pb), pair 2 (pb, eps p).
Fields rhs(const Fields& y, int eps, const Spectral2D& sp, Auxiliary* aux_out = nullptr) {
    const std::size_t n = y.p.size();
    const auto aux = solve_auxiliary(y.p, eps, sp);
    if (aux_out) *aux_out = aux;
    Fields d;
    d.spinors = y.spinors;
    d.p = sp.dzz(y.p);
    const auto pzbzb = sp.dzbzb(y.p);
    for (std::size_t k = 0; k < n; ++k) d.p[k] = I * (d.p[k] + pzbzb[k] + aux.u[k] * y.p[k]);
    if (!y.spinors) return d;
    cfield pb(n);
    for (std::size_t k = 0; k < n; ++k) pb[k] = std::conj(y.p[k]);
    const auto pz = sp.dz(y.p), pzb = sp.dzbar(y.p), pbz = sp.dz(pb), pbzb = sp.dzbar(pb);
    const double e = eps;
    // pair 1
    {
        const auto& s = y.s[0];
        const auto& f = y.s[1];
        const auto szbzb = sp.dzbzb(s), szb = sp.dzbar(s), fzz = sp.dzz(f), fz = sp.dz(f);
        d.s[0].resize(n), d.s[1].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            d.s[0][k] = I * (szbzb[k] + aux.w1[k] * s[k]) + I * (pz[k] * f[k] - y.p[k] * fz[k]);
            d.s[1][k] = -I * e * (pbzb[k] * s[k] - pb[k] * szb[k]) - I * (fzz[k] + aux.w2[k] * f[k]);
        }
    }
    // pair 2
    {
        const auto& s = y.s[2];
        const auto& f = y.s[3];
        const auto szbzb = sp.dzbzb(s), szb = sp.dzbar(s), fzz = sp.dzz(f), fz = sp.dz(f);
        d.s[2].resize(n), d.s[3].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            d.s[2][k] = -I * (szbzb[k] + aux.w1[k] * s[k]) - I * (pbz[k] * f[k] - pb[k] * fz[k]);
            d.s[3][k] = I * e * (pzb[k] * s[k] - y.p[k] * szb[k]) + I * (fzz[k] + aux.w2[k] * f[k]);
        }
    }
    return d;
}

double max_modulus(const cfield& f) {
    double m = 0;
    for (auto v : f) {
        const double a = std::abs(v);
        if (!std::isfinite(a)) return std::numeric_limits<double>::infinity();
        m = std::max(m, a);
    }
    return m;
}

}  // namespace

Auxiliary solve_auxiliary(const cfield& p, int eps, const Spectral2D& sp) {
    if (eps != 1 && eps != -1) throw Error("solve_auxiliary: eps must be +-1");
    const std::size_t n = p.size();
    if (n != sp.grid().size()) throw Error("solve_auxiliary: field size mismatch");
    cfield p2(n);
    for (std::size_t k = 0; k < n; ++k) p2[k] = std::norm(p[k]);
    Auxiliary a;
    a.w1 = sp.zbar_over_z(p2);
    a.w2 = sp.z_over_zbar(p2);
    a.u.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        a.w1[k] *= -2.0 * eps;
        a.w2[k] *= -2.0 * eps;
        a.u[k] = a.w1[k] + a.w2[k];
    }
    return a;
}

Auxiliary solve_auxiliary(const cfield& p, int eps, const Grid& g) {
    const Spectral2D sp(g);
    return solve_auxiliary(p, eps, sp);
}

DS2State make_state(const Grid& g, cfield p, int eps, std::optional<SpinorQuad> sq) {
    g.validate();
    if (!g.periodic_x || !g.periodic_y) throw Error("DS-II evolution needs a doubly periodic grid");
    if (p.size() != g.size()) throw Error("make_state: p has wrong size");
    if (eps != 1 && eps != -1) throw Error("make_state: eps must be +-1");
    require_finite(p, g, "make_state");
    if (sq) {
        const Rep want = eps < 0 ? Rep::R4 : Rep::R22;
        if (sq->rep != want) throw Error("make_state: spinor representation does not match eps");
        if (!sq->grid.same_as(g)) throw Error("make_state: spinor grid differs from state grid");
    }
    DS2State s;
    s.grid = g;
    s.p = std::move(p);
    s.eps = eps;
    s.sq = std::move(sq);
    s.aux = solve_auxiliary(s.p, eps, g);
    return s;
}

double stable_dt(const Grid& g, double safety) {
    const double kx = PI / g.hx(), ky = PI / g.hy();
    // |symbol| of d_zz + d_zbzb and d_zbar^2 are both below (kx^2 + ky^2)/2
    const double lam = 0.5 * (kx * kx + ky * ky);
    return safety * 2.8 / lam;
}

DS2State ds2_step(const DS2State& s, double dt, const Spectral2D& sp, const StepOptions& opt) {
    if (!(dt > 0)) throw Error("ds2_step: dt must be positive");
    const double lim = stable_dt(s.grid, 1.0);
    if (dt > lim) throw Error("ds2_step: dt = " + std::to_string(dt) + " above the stability bound " + std::to_string(lim));
    Fields y;
    y.p = s.p;
    if (s.sq) {
        y.spinors = true;
        y.s = {s.sq->psi1, s.sq->phi1, s.sq->psi2, s.sq->phi2};
    }
    const auto k1 = rhs(y, s.eps, sp);
    const auto k2 = rhs(combine(y, 0.5 * dt, k1), s.eps, sp);
    const auto k3 = rhs(combine(y, 0.5 * dt, k2), s.eps, sp);
    const auto k4 = rhs(combine(y, dt, k3), s.eps, sp);
    DS2State out = s;
    const double w = dt / 6.0;
    axpy(out.p, w, k1.p), axpy(out.p, 2 * w, k2.p), axpy(out.p, 2 * w, k3.p), axpy(out.p, w, k4.p);
    if (s.sq) {
        cfield* dst[4] = {&out.sq->psi1, &out.sq->phi1, &out.sq->psi2, &out.sq->phi2};
        for (int c = 0; c < 4; ++c) {
            axpy(*dst[c], w, k1.s[c]), axpy(*dst[c], 2 * w, k2.s[c]);
            axpy(*dst[c], 2 * w, k3.s[c]), axpy(*dst[c], w, k4.s[c]);
        }
    }
    out.t = s.t + dt;
    const double ref = std::max(1.0, opt.p_scale > 0 ? opt.p_scale : max_modulus(s.p));
    const double m = max_modulus(out.p);
    if (!std::isfinite(m) || m > opt.blowup * ref) {
        std::ostringstream os;
        os << "DS-II blowup at t = " << out.t << ": max|p| = " << m << " (reference " << ref << ")";
        throw BlowupError(os.str(), out.t, m);
    }
    out.aux = solve_auxiliary(out.p, out.eps, sp);
    return out;
}

double ds2_c1(const cfield& p, const Grid& g) {
    rfield d(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) d[k] = std::norm(p[k]);
    return quad_area(d, g).value.real();
}

double ds2_willmore(const cfield& p, int eps, const Grid& g) { return -4.0 * eps * ds2_c1(p, g); }

EvolveResult evolve_and_track(const DS2State& s0, const EvolveOptions& opt) {
    if (!(opt.T >= 0)) throw Error("evolve: T must be non-negative");
    if (opt.sample_every < 1) throw Error("evolve: sample_every must be >= 1");
    const Spectral2D sp(s0.grid);
    EvolveResult r;
    double dt = opt.dt > 0 ? opt.dt : stable_dt(s0.grid);
    const int steps = opt.T == 0 ? 0 : int(std::ceil(opt.T / dt - 1e-9));
    if (steps > 0) dt = opt.T / steps;
    r.dt = dt;
    r.steps = steps;
    StepOptions so = opt.step;
    if (so.p_scale <= 0) so.p_scale = max_modulus(s0.p);
    auto sample = [&](const DS2State& s) {
        SeriesRow row{s.t, ds2_willmore(s.p, s.eps, s.grid), ds2_c1(s.p, s.grid), NaN, NaN};
        if (s.sq && opt.track_spinors) {
            row.dirac_residual = dirac_residual(*s.sq, Potentials{s.p, {}});
            row.conformality_defect = metric_from_form(weierstrass_form(*s.sq)).conformality_defect;
        }
        r.series.push_back(row);
        if (opt.keep_snapshots) r.snapshots.push_back(s);
    };
    DS2State s = s0;
    sample(s);
    for (int n = 1; n <= steps; ++n) {
        s = ds2_step(s, dt, sp, so);
        if (n % opt.sample_every == 0 || n == steps) sample(s);
    }
    r.final_state = std::move(s);
    return r;
}

SpinorQuad spinor_velocity(const SpinorQuad& sq, const cfield& p, const Auxiliary& aux, int eps) {
    if (sq.rep != Rep::R4 && sq.rep != Rep::R22) throw Error("spinor_velocity: R4 / R22 only");
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    cfield pb(n);
    for (std::size_t k = 0; k < n; ++k) pb[k] = std::conj(p[k]);
    const auto pz = dz(p, g), pzb = dzbar(p, g), pbz = dz(pb, g), pbzb = dzbar(pb, g);
    const double e = eps;
    SpinorQuad d = sq;
    auto d2zb = [&](const cfield& f) { return dzbar(dzbar(f, g), g); };
    auto d2z = [&](const cfield& f) { return dz(dz(f, g), g); };
    {
        const auto szbzb = d2zb(sq.psi1), szb = dzbar(sq.psi1, g), fzz = d2z(sq.phi1), fz = dz(sq.phi1, g);
        for (std::size_t k = 0; k < n; ++k) {
            d.psi1[k] = I * (szbzb[k] + aux.w1[k] * sq.psi1[k]) + I * (pz[k] * sq.phi1[k] - p[k] * fz[k]);
            d.phi1[k] = -I * e * (pbzb[k] * sq.psi1[k] - pb[k] * szb[k]) - I * (fzz[k] + aux.w2[k] * sq.phi1[k]);
        }
    }
    {
        const auto szbzb = d2zb(sq.psi2), szb = dzbar(sq.psi2, g), fzz = d2z(sq.phi2), fz = dz(sq.phi2, g);
        for (std::size_t k = 0; k < n; ++k) {
            d.psi2[k] = -I * (szbzb[k] + aux.w1[k] * sq.psi2[k]) - I * (pbz[k] * sq.phi2[k] - pb[k] * fz[k]);
            d.phi2[k] = I * e * (pzb[k] * sq.psi2[k] - p[k] * szb[k]) + I * (fzz[k] + aux.w2[k] * sq.phi2[k]);
        }
    }
    return d;
}

VelocityResult coordinate_velocity(const SpinorQuad& sq, const cfield& p, const Auxiliary& aux,
                                   const ImmerseOptions& opt) {
    if (sq.rep != Rep::R4) throw Error("coordinate_velocity: R4 only");
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    VelocityResult r;
    // flow: the Weierstrass form is bilinear in (pair 1, pair 2)
    const auto d = spinor_velocity(sq, p, aux, -1);
    SpinorQuad a = sq, b = sq;
    a.psi1 = d.psi1, a.phi1 = d.phi1;
    b.psi2 = d.psi2, b.phi2 = d.phi2;
    auto wa = weierstrass_form(a);
    const auto wb = weierstrass_form(b);
    for (int c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < n; ++k) {
            wa.fx[c][k] += wb.fx[c][k], wa.fy[c][k] += wb.fy[c][k];
            wa.zpart[c][k] += wb.zpart[c][k], wa.zbpart[c][k] += wb.zbpart[c][k];
        }
    ImmerseOptions io = opt;
    io.reality_tol = 1e-3;
    r.flow = integrate_form(wa, io).X;

    // formula: local bilinears plus I1, I2
    cfield s1b(n), s2b(n);
    for (std::size_t k = 0; k < n; ++k) s1b[k] = std::conj(sq.psi1[k]), s2b[k] = std::conj(sq.psi2[k]);
    const auto s1bz = dz(s1b, g), s2bz = dz(s2b, g), f1z = dz(sq.phi1, g), f2z = dz(sq.phi2, g);
    OneForm wi;
    wi.grid = g;
    wi.rep = Rep::R4;
    for (int c = 0; c < 4; ++c) wi.fx[c].assign(n, 0.0), wi.fy[c].assign(n, 0.0);
    for (auto& x : r.formula) x.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        auto B = [](cplx f, cplx fz, cplx h, cplx hz) { return f * hz - h * fz; };  // f d h - h d f
        const cplx s2b_s1b = B(s2b[k], s2bz[k], s1b[k], s1bz[k]);
        const cplx f2_f1 = B(sq.phi2[k], f2z[k], sq.phi1[k], f1z[k]);
        const cplx f2_s1b = B(sq.phi2[k], f2z[k], s1b[k], s1bz[k]);
        const cplx s2b_f1 = B(s2b[k], s2bz[k], sq.phi1[k], f1z[k]);
        r.formula[0][k] = (s2b_s1b - f2_f1).imag();
        r.formula[1][k] = (s2b_s1b + f2_f1).real();
        r.formula[2][k] = (f2_s1b + s2b_f1).imag();
        r.formula[3][k] = (f2_s1b - s2b_f1).real();
        const cplx wd = std::conj(aux.w1[k]) - aux.w2[k];
        const cplx j1 = wd * (s1b[k] * sq.phi2[k] - sq.phi1[k] * s2b[k]);
        const cplx j2 = wd * (s1b[k] * sq.phi2[k] + sq.phi1[k] * s2b[k]);
        // Im(j dz) = Im j dx + Re j dy;  Re(j dz) = Re j dx - Im j dy
        wi.fx[2][k] = j1.imag(), wi.fy[2][k] = j1.real();
        wi.fx[3][k] = j2.real(), wi.fy[3][k] = -j2.imag();
    }
    const auto Ipart = integrate_form(wi, io).X;
    const std::size_t b0 = g.idx(opt.i0, opt.j0);
    double fmax = 0, gap = 0;
    for (int c = 0; c < 4; ++c) {
        const double base = r.formula[c][b0];
        for (std::size_t k = 0; k < n; ++k) {
            r.formula[c][k] += Ipart[c][k] - base;
            fmax = std::max(fmax, std::abs(r.flow[c][k]));
        }
    }
    // split into normal and tangential parts
    const auto gm = normals_and_gauss(sq, Potentials{p, {}});
    const auto md = metric_closed(sq);
    r.mask = mask_or(gm.mask, md.mask);
    r.a.assign(n, 0.0), r.b.assign(n, 0.0), r.c.assign(n, 0.0);
    const auto w = weierstrass_form(sq);
    double rgap = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (r.mask[k]) continue;
        cplx vzb = 0;
        for (int c = 0; c < 4; ++c) {
            r.a[k] += r.flow[c][k] * gm.N1[c][k];
            r.b[k] += r.flow[c][k] * gm.N2[c][k];
            vzb += r.flow[c][k] * w.zbpart[c][k];
        }
        r.c[k] = vzb / (0.5 * md.factor[k]);
        for (int c = 0; c < 4; ++c) {
            const double rec = r.a[k] * gm.N1[c][k] + r.b[k] * gm.N2[c][k] +
                               2.0 * (r.c[k] * w.zpart[c][k]).real();
            rgap = std::max(rgap, std::abs(rec - r.flow[c][k]));
            gap = std::max(gap, std::abs(r.formula[c][k] - r.flow[c][k]));
        }
    }
    const double scale = std::max(fmax, 1e-300);
    r.formula_gap = gap / scale;
    r.reconstruction_gap = rgap / scale;
    return r;
}

}  // namespace w4d
