#include "w4d/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace w4d {

namespace {

cfield zeros(std::size_t n) { return cfield(n, 0.0); }

// coordinates from the complex combinations a = Xa + i Xb, b = Xa - i Xb
void split_pm(const cfield& plus, const cfield& minus, cfield& xa, cfield& xb) {
    const std::size_t n = plus.size();
    xa.resize(n), xb.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        xa[k] = 0.5 * (plus[k] + minus[k]);
        xb[k] = (plus[k] - minus[k]) / (2.0 * I);
    }
}

// coordinates from the real combinations s = Xa + Xb, d = Xa - Xb
void split_sd(const cfield& s, const cfield& d, cfield& xa, cfield& xb) {
    const std::size_t n = s.size();
    xa.resize(n), xb.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        xa[k] = 0.5 * (s[k] + d[k]);
        xb[k] = 0.5 * (s[k] - d[k]);
    }
}

template <class F>
cfield pointwise(std::size_t n, F&& f) {
    cfield out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
    return out;
}

}  // namespace

OneForm weierstrass_form(const SpinorQuad& sq) {
    OneForm w;
    w.grid = sq.grid;
    w.rep = sq.rep;
    const std::size_t n = sq.grid.size();
    const auto& s1 = sq.psi1;
    const auto& f1 = sq.phi1;
    const auto& s2 = sq.psi2;
    const auto& f2 = sq.phi2;
    auto cj = [](cplx v) { return std::conj(v); };
    if (!is_timelike(sq.rep)) {
        CVec4& Z = w.zpart;
        CVec4& B = w.zbpart;
        switch (sq.rep) {
            case Rep::R4: {
                auto pz = pointwise(n, [&](auto k) { return -f1[k] * f2[k]; });
                auto pb = pointwise(n, [&](auto k) { return s1[k] * s2[k]; });
                auto mz = pointwise(n, [&](auto k) { return cj(s1[k]) * cj(s2[k]); });
                auto mb = pointwise(n, [&](auto k) { return -cj(f1[k]) * cj(f2[k]); });
                split_pm(pz, mz, Z[0], Z[1]);
                split_pm(pb, mb, B[0], B[1]);
                pz = pointwise(n, [&](auto k) { return f1[k] * cj(s2[k]); });
                pb = pointwise(n, [&](auto k) { return s1[k] * cj(f2[k]); });
                mz = pointwise(n, [&](auto k) { return cj(s1[k]) * f2[k]; });
                mb = pointwise(n, [&](auto k) { return cj(f1[k]) * s2[k]; });
                split_pm(pz, mz, Z[2], Z[3]);
                split_pm(pb, mb, B[2], B[3]);
                break;
            }
            case Rep::R22: {
                auto pz = pointwise(n, [&](auto k) { return f1[k] * f2[k]; });
                auto pb = pointwise(n, [&](auto k) { return s1[k] * s2[k]; });
                auto mz = pointwise(n, [&](auto k) { return cj(s1[k]) * cj(s2[k]); });
                auto mb = pointwise(n, [&](auto k) { return cj(f1[k]) * cj(f2[k]); });
                split_pm(pz, mz, Z[0], Z[1]);
                split_pm(pb, mb, B[0], B[1]);
                pz = pointwise(n, [&](auto k) { return I * cj(s1[k]) * f2[k]; });
                pb = pointwise(n, [&](auto k) { return I * cj(f1[k]) * s2[k]; });
                mz = pointwise(n, [&](auto k) { return -I * f1[k] * cj(s2[k]); });
                mb = pointwise(n, [&](auto k) { return -I * s1[k] * cj(f2[k]); });
                split_pm(pz, mz, Z[2], Z[3]);
                split_pm(pb, mb, B[2], B[3]);
                break;
            }
            case Rep::R31: {
                auto pz = pointwise(n, [&](auto k) { return f1[k] * cj(s2[k]); });
                auto pb = pointwise(n, [&](auto k) { return s1[k] * cj(f2[k]); });
                auto mz = pointwise(n, [&](auto k) { return cj(s1[k]) * f2[k]; });
                auto mb = pointwise(n, [&](auto k) { return cj(f1[k]) * s2[k]; });
                split_pm(pz, mz, Z[0], Z[1]);
                split_pm(pb, mb, B[0], B[1]);
                auto sz = pointwise(n, [&](auto k) { return cj(s1[k]) * f1[k]; });
                auto sb = pointwise(n, [&](auto k) { return s1[k] * cj(f1[k]); });
                auto dz_ = pointwise(n, [&](auto k) { return -cj(s2[k]) * f2[k]; });
                auto db = pointwise(n, [&](auto k) { return -s2[k] * cj(f2[k]); });
                split_sd(sz, dz_, Z[2], Z[3]);
                split_sd(sb, db, B[2], B[3]);
                break;
            }
            case Rep::R3: {
                auto pz = pointwise(n, [&](auto k) { return I * cj(s1[k]) * cj(s1[k]); });
                auto pb = pointwise(n, [&](auto k) { return -I * cj(f1[k]) * cj(f1[k]); });
                auto mz = pointwise(n, [&](auto k) { return I * f1[k] * f1[k]; });
                auto mb = pointwise(n, [&](auto k) { return -I * s1[k] * s1[k]; });
                split_pm(pz, mz, Z[0], Z[1]);
                split_pm(pb, mb, B[0], B[1]);
                Z[2] = pointwise(n, [&](auto k) { return -cj(s1[k]) * f1[k]; });
                B[2] = pointwise(n, [&](auto k) { return -s1[k] * cj(f1[k]); });
                Z[3] = zeros(n), B[3] = zeros(n);
                break;
            }
            case Rep::R21: {
                auto pz = pointwise(n, [&](auto k) { return f1[k] * f1[k]; });
                auto pb = pointwise(n, [&](auto k) { return s1[k] * s1[k]; });
                auto mz = pointwise(n, [&](auto k) { return cj(s1[k]) * cj(s1[k]); });
                auto mb = pointwise(n, [&](auto k) { return cj(f1[k]) * cj(f1[k]); });
                split_pm(pz, mz, Z[0], Z[1]);
                split_pm(pb, mb, B[0], B[1]);
                Z[2] = zeros(n), B[2] = zeros(n);
                Z[3] = pointwise(n, [&](auto k) { return cj(s1[k]) * f1[k]; });
                B[3] = pointwise(n, [&](auto k) { return s1[k] * cj(f1[k]); });
                break;
            }
            default: break;
        }
        for (int c = 0; c < 4; ++c) {
            w.fx[c] = pointwise(n, [&](auto k) { return Z[c][k] + B[c][k]; });
            w.fy[c] = pointwise(n, [&](auto k) { return I * (Z[c][k] - B[c][k]); });
        }
        return w;
    }
    if (sq.rep == Rep::R31T) {
        // (xi) from phi, (eta) from psi
        auto half = [&](const cfield& a1, const cfield& a2, CVec4& out) {
            out[0] = pointwise(n, [&](auto k) { return 0.5 * (cj(a1[k]) * a2[k] + a1[k] * cj(a2[k])); });
            out[1] = pointwise(n, [&](auto k) { return 0.5 * I * (cj(a1[k]) * a2[k] - a1[k] * cj(a2[k])); });
            out[2] = pointwise(n, [&](auto k) { return 0.5 * (a1[k] * cj(a1[k]) - a2[k] * cj(a2[k])); });
            out[3] = pointwise(n, [&](auto k) { return 0.5 * (a1[k] * cj(a1[k]) + a2[k] * cj(a2[k])); });
        };
        half(f1, f2, w.fx);
        half(s1, s2, w.fy);
        return w;
    }
    // R22T
    const auto& t1 = sq.tpsi1;
    const auto& t2 = sq.tpsi2;
    const auto& g1 = sq.tphi1;
    const auto& g2 = sq.tphi2;
    w.fx[0] = pointwise(n, [&](auto k) { return 0.5 * (f1[k] * g2[k] + g1[k] * f2[k]); });
    w.fy[0] = pointwise(n, [&](auto k) { return 0.5 * (s1[k] * t2[k] + t1[k] * s2[k]); });
    w.fx[1] = pointwise(n, [&](auto k) { return 0.5 * (f1[k] * g1[k] - g2[k] * f2[k]); });
    w.fy[1] = pointwise(n, [&](auto k) { return 0.5 * (s1[k] * t1[k] - s2[k] * t2[k]); });
    w.fx[2] = pointwise(n, [&](auto k) { return 0.5 * (g1[k] * f2[k] - f1[k] * g2[k]); });
    w.fy[2] = pointwise(n, [&](auto k) { return 0.5 * (t1[k] * s2[k] - s1[k] * t2[k]); });
    w.fx[3] = pointwise(n, [&](auto k) { return 0.5 * (f1[k] * g1[k] + f2[k] * g2[k]); });
    w.fy[3] = pointwise(n, [&](auto k) { return 0.5 * (s1[k] * t1[k] + t2[k] * s2[k]); });
    return w;
}

namespace {

inline cplx segment(const cplx* f, const cplx* df, std::ptrdiff_t a, std::ptrdiff_t b, double h, Quadrature r) {
    cplx s = 0.5 * h * (f[a] + f[b]);
    if (r == Quadrature::corrected) s += (h * h / 12.0) * (df[a] - df[b]);
    return s;
}

// out[k0] given; fill the line in both directions
void cum_line(const cplx* f, const cplx* df, cplx* out, int n, std::ptrdiff_t st, int k0, double h, Quadrature r) {
    for (int k = k0; k + 1 < n; ++k) out[(k + 1) * st] = out[k * st] + segment(f, df, k * st, (k + 1) * st, h, r);
    for (int k = k0; k > 0; --k) out[(k - 1) * st] = out[k * st] - segment(f, df, (k - 1) * st, k * st, h, r);
}

double residual_scale(const SpinorQuad& sq, const Potentials& pot) {
    double s = 0;
    for (auto* f : {&sq.psi1, &sq.phi1, &sq.psi2, &sq.phi2, &sq.tpsi1, &sq.tphi1, &sq.tpsi2, &sq.tphi2})
        if (!f->empty()) s = std::max(s, max_abs(*f, sq.mask.empty() ? nullptr : &sq.mask));
    double pq = 1;
    if (!pot.p.empty()) pq = std::max(pq, max_abs(pot.p));
    if (!pot.q.empty()) pq = std::max(pq, max_abs(pot.q));
    return std::max(s, 1e-300) * pq;
}

}  // namespace

SurfacePatch integrate_form(const OneForm& w, const ImmerseOptions& opt) {
    const Grid& g = w.grid;
    if (opt.i0 < 0 || opt.i0 >= g.nx || opt.j0 < 0 || opt.j0 >= g.ny) throw Error("immerse: basepoint outside grid");
    const std::size_t n = g.size();
    const double hx = g.hx(), hy = g.hy();
    SurfacePatch sp;
    sp.grid = g;
    sp.rep = w.rep;
    sp.sig = signature_of(w.rep);
    sp.i0 = opt.i0, sp.j0 = opt.j0;
    double max_im = 0;
    for (int c = 0; c < 4; ++c) {
        require_finite(w.fx[c], g, "immerse");
        require_finite(w.fy[c], g, "immerse");
        const auto dfx = dx(w.fx[c], g, opt.exec);
        const auto dfy = dy(w.fy[c], g, opt.exec);
        cfield Xc(n, 0.0);
        const std::ptrdiff_t sy = g.nx;
        if (opt.order == PathOrder::row_first) {
            const std::size_t r0 = g.idx(0, opt.j0);
            cum_line(&w.fx[c][r0], &dfx[r0], &Xc[r0], g.nx, 1, opt.i0, hx, opt.rule);
            auto col = [&](int i) { cum_line(&w.fy[c][i], &dfy[i], &Xc[i], g.ny, sy, opt.j0, hy, opt.rule); };
            if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
                for (int i = 0; i < g.nx; ++i) col(i);
            } else {
                for (int i = 0; i < g.nx; ++i) col(i);
            }
        } else {
            const int i0 = opt.i0;
            cum_line(&w.fy[c][i0], &dfy[i0], &Xc[i0], g.ny, sy, opt.j0, hy, opt.rule);
            auto row = [&](int j) {
                const std::size_t r = g.idx(0, j);
                cum_line(&w.fx[c][r], &dfx[r], &Xc[r], g.nx, 1, i0, hx, opt.rule);
            };
            if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
                for (int j = 0; j < g.ny; ++j) row(j);
            } else {
                for (int j = 0; j < g.ny; ++j) row(j);
            }
        }
        sp.X[c] = real_part(Xc);
        max_im = std::max(max_im, max_abs(imag_part(Xc)));
    }
    sp.max_imag = max_im;
    const double diam = std::max(1.0, diameter(sp));
    if (max_im > opt.reality_tol * diam) {
        std::ostringstream os;
        os << "immerse: declared-real coordinates have imaginary part " << max_im;
        throw Error(os.str());
    }
    return sp;
}

SurfacePatch immerse(const SpinorQuad& sq, const Potentials& pot, const ImmerseOptions& opt) {
    sq.grid.validate();
    double res = 0;
    if (opt.residual_tol >= 0) {
        res = dirac_residual(sq, pot, opt.exec);
        const double rel = res / residual_scale(sq, pot);
        if (rel > opt.residual_tol) {
            std::ostringstream os;
            os << "immerse: Dirac residual " << res << " (relative " << rel << ") exceeds tolerance "
               << opt.residual_tol << "; integration refused";
            throw Error(os.str());
        }
    }
    auto sp = integrate_form(weierstrass_form(sq), opt);
    sp.mask = sq.mask;
    sp.residual = res;
    return sp;
}

Contour straight_contour(std::pair<int, int> a, std::pair<int, int> b, bool x_first) {
    Contour c{a};
    auto step = [&](bool along_x) {
        auto cur = c.back();
        if (along_x)
            while (cur.first != b.first) cur.first += (b.first > cur.first) ? 1 : -1, c.push_back(cur);
        else
            while (cur.second != b.second) cur.second += (b.second > cur.second) ? 1 : -1, c.push_back(cur);
    };
    step(x_first);
    step(!x_first);
    return c;
}

std::array<cplx, 4> integrate_contour(const OneForm& w, const Contour& path, Quadrature rule) {
    const Grid& g = w.grid;
    std::array<cplx, 4> acc{0, 0, 0, 0};
    for (int c = 0; c < 4; ++c) {
        const auto dfx = dx(w.fx[c], g);
        const auto dfy = dy(w.fy[c], g);
        for (std::size_t s = 1; s < path.size(); ++s) {
            const auto [ia, ja] = path[s - 1];
            const auto [ib, jb] = path[s];
            const int di = ib - ia, dj = jb - ja;
            if (std::abs(di) + std::abs(dj) != 1) throw Error("contour: waypoints must be grid-adjacent along an axis");
            const std::ptrdiff_t a = std::ptrdiff_t(g.idx(ia, ja)), b = std::ptrdiff_t(g.idx(ib, jb));
            if (di != 0) {
                const std::ptrdiff_t lo = di > 0 ? a : b, hi = di > 0 ? b : a;
                const cplx seg = segment(w.fx[c].data(), dfx.data(), lo, hi, g.hx(), rule);
                acc[c] += di > 0 ? seg : -seg;
            } else {
                const std::ptrdiff_t lo = dj > 0 ? a : b, hi = dj > 0 ? b : a;
                const cplx seg = segment(w.fy[c].data(), dfy.data(), lo, hi, g.hy(), rule);
                acc[c] += dj > 0 ? seg : -seg;
            }
        }
    }
    return acc;
}

double closedness_residual(const OneForm& w, Exec ex) {
    double r = 0;
    for (int c = 0; c < 4; ++c) {
        cfield a, b;
        if (is_timelike(w.rep)) {
            a = dy(w.fx[c], w.grid, ex);
            b = dx(w.fy[c], w.grid, ex);
        } else {
            a = dzbar(w.zpart[c], w.grid, ex);
            b = dz(w.zbpart[c], w.grid, ex);
        }
        for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
    }
    return r;
}

double closedness_residual(const SpinorQuad& sq, Exec ex) { return closedness_residual(weierstrass_form(sq), ex); }

double diameter(const SurfacePatch& sp) {
    double d2 = 0;
    for (int c = 0; c < 4; ++c) {
        if (sp.X[c].empty()) continue;
        const auto [lo, hi] = std::minmax_element(sp.X[c].begin(), sp.X[c].end());
        d2 += (*hi - *lo) * (*hi - *lo);
    }
    return std::sqrt(d2);
}

ConformalFactor conformal_scale(const SurfacePatch& sp, double K0, double tol) {
    ConformalFactor cf;
    cf.K0 = K0;
    const std::size_t n = sp.grid.size();
    cf.e2s.assign(n, 1.0);
    cf.mask.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        double x2 = 0;
        for (int c = 0; c < 4; ++c) x2 += sp.sig.diag[c] * sp.X[c][k] * sp.X[c][k];
        const double d = 1.0 + 0.25 * K0 * x2;
        if (std::abs(d) < tol) {
            cf.mask[k] = 1;
            cf.e2s[k] = 0;
            continue;
        }
        cf.e2s[k] = 1.0 / (d * d);
    }
    if (count_masked(cf.mask) == 0) cf.mask.clear();
    return cf;
}

double moutard_residual(const MoutardInput& in, Exec ex) {
    const Grid& g = in.grid;
    if (in.q.size() != g.size()) throw Error("moutard: q has wrong size");
    const int m = in.rep == Rep::R31 ? 2 : 4;
    double r = 0;
    for (int a = 0; a < m; ++a) {
        if (in.psi[a].size() != g.size()) throw Error("moutard: psi has wrong size");
        const cfield L = in.rep == Rep::R31 ? dzdzbar(in.psi[a], g, 4, ex) : dxy(in.psi[a], g, ex);
        for (std::size_t k = 0; k < L.size(); ++k) r = std::max(r, std::abs(L[k] - in.q[k] * in.psi[a][k]));
    }
    return r;
}

MoutardResult immerse_moutard(const MoutardInput& in, double tol, const ImmerseOptions& opt) {
    if (in.rep != Rep::R31 && in.rep != Rep::R22T) throw Error("immerse_moutard: rep must be R31 or R22T");
    in.grid.validate();
    MoutardResult out;
    out.moutard_residual = moutard_residual(in, opt.exec);
    double scale = 1;
    for (int a = 0; a < (in.rep == Rep::R31 ? 2 : 4); ++a) scale = std::max(scale, max_abs(in.psi[a]));
    if (out.moutard_residual > tol * scale * std::max(1.0, max_abs(in.q)))
        throw Error("immerse_moutard: Moutard residual " + std::to_string(out.moutard_residual) + " too large");
    const Grid& g = in.grid;
    const std::size_t n = g.size();
    SpinorQuad& sq = out.sq;
    sq.rep = in.rep;
    sq.grid = g;
    out.pot.p.assign(n, 1.0);
    out.pot.q = in.q;
    out.metric_wronskian.assign(n, 0.0);
    if (in.rep == Rep::R31) {
        sq.psi1 = in.psi[0], sq.psi2 = in.psi[1];
        sq.phi1 = dz(in.psi[0], g, opt.exec);
        sq.phi2 = dz(in.psi[1], g, opt.exec);
        for (std::size_t k = 0; k < n; ++k)
            out.metric_wronskian[k] = std::norm(sq.psi1[k] * sq.phi2[k] - sq.psi2[k] * sq.phi1[k]);
    } else {
        const cfield& a = in.swap_pairing ? in.psi[3] : in.psi[2];
        const cfield& b = in.swap_pairing ? in.psi[2] : in.psi[3];
        sq.psi1 = in.psi[0], sq.psi2 = in.psi[1];
        sq.phi1 = dx(in.psi[0], g, opt.exec);
        sq.phi2 = dx(in.psi[1], g, opt.exec);
        sq.tphi1 = a, sq.tphi2 = b;
        sq.tpsi1 = dy(a, g, opt.exec);
        sq.tpsi2 = dy(b, g, opt.exec);
        // Wronskian product of the simplified form, always with psi3, psi4 in printed order
        const auto p3e = dy(in.psi[2], g, opt.exec), p4e = dy(in.psi[3], g, opt.exec);
        for (std::size_t k = 0; k < n; ++k)
            out.metric_wronskian[k] = ((sq.phi1[k] * sq.psi2[k] - sq.psi1[k] * sq.phi2[k]) *
                                       (p3e[k] * in.psi[3][k] - in.psi[2][k] * p4e[k]))
                                          .real();
    }
    ImmerseOptions o = opt;
    o.residual_tol = -1;  // already checked via the Moutard residual
    out.patch = immerse(sq, out.pot, o);
    return out;
}

}  // namespace w4d
