#include "w4d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace w4d {

namespace {

rfield closed_factor(const SpinorQuad& sq) {
    const std::size_t n = sq.grid.size();
    rfield F(n);
    const auto& s1 = sq.psi1;
    const auto& f1 = sq.phi1;
    const auto& s2 = sq.psi2;
    const auto& f2 = sq.phi2;
    for (std::size_t k = 0; k < n; ++k) {
        switch (sq.rep) {
            case Rep::R4:
                F[k] = (std::norm(s1[k]) + std::norm(f1[k])) * (std::norm(s2[k]) + std::norm(f2[k]));
                break;
            case Rep::R22:
                F[k] = (std::norm(s1[k]) - std::norm(f1[k])) * (std::norm(s2[k]) - std::norm(f2[k]));
                break;
            case Rep::R31: F[k] = std::norm(s1[k] * f2[k] - f1[k] * s2[k]); break;
            case Rep::R3: F[k] = std::pow(std::norm(s1[k]) + std::norm(f1[k]), 2); break;
            case Rep::R21: F[k] = std::pow(std::norm(s1[k]) - std::norm(f1[k]), 2); break;
            case Rep::R31T: F[k] = -std::norm(f1[k] * s2[k] - s1[k] * f2[k]); break;
            case Rep::R22T:
                F[k] = ((s1[k] * f2[k] - s2[k] * f1[k]) *
                        (sq.tphi1[k] * sq.tpsi2[k] - sq.tpsi1[k] * sq.tphi2[k]))
                           .real();
                break;
        }
    }
    return F;
}

Mask factor_mask(const rfield& F, Rep rep, double tol, const Mask& base) {
    double mx = 0;
    for (double v : F) mx = std::max(mx, std::abs(v));
    Mask m(F.size(), 0);
    const bool spacelike = !is_timelike(rep);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const bool bad = spacelike ? (F[k] <= tol * mx) : (std::abs(F[k]) <= tol * mx);
        m[k] = bad || (!base.empty() && base[k]);
    }
    return m;
}

Mask dilate(const Mask& m, const Grid& g, int w) {
    if (m.empty()) return m;
    Mask out(m.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (m[g.idx(i, j)])
                for (int dj = -w; dj <= w; ++dj)
                    for (int di = -w; di <= w; ++di) {
                        const int a = i + di, b = j + dj;
                        if (a >= 0 && b >= 0 && a < g.nx && b < g.ny) out[g.idx(a, b)] = 1;
                    }
    return out;
}

double conf_defect(const cfield& gzz, const rfield& gzzb, const Mask& m) {
    double d = 0;
    for (std::size_t k = 0; k < gzz.size(); ++k)
        if (m.empty() || !m[k]) d = std::max(d, std::abs(gzz[k]) / std::abs(gzzb[k]));
    return d;
}

double conf_defect_tl(const rfield& a, const rfield& b, const rfield& c, const Mask& m) {
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (m.empty() || !m[k]) d = std::max(d, std::max(std::abs(a[k]), std::abs(c[k])) / std::abs(b[k]));
    return d;
}

}  // namespace

Mask interior_mask(const Grid& g, int border) {
    Mask m(g.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool ex = (!g.periodic_x && (i < border || i >= g.nx - border)) ||
                            (!g.periodic_y && (j < border || j >= g.ny - border));
            m[g.idx(i, j)] = ex;
        }
    return m;
}

MetricData metric_closed(const SpinorQuad& sq, double mask_tol) {
    MetricData md;
    md.timelike = is_timelike(sq.rep);
    md.factor = closed_factor(sq);
    md.mask = factor_mask(md.factor, sq.rep, mask_tol, sq.mask);
    const std::size_t n = md.factor.size();
    if (!md.timelike) {
        md.g_zz.assign(n, 0.0);
        md.g_zzb.resize(n);
        for (std::size_t k = 0; k < n; ++k) md.g_zzb[k] = 0.5 * md.factor[k];
    } else {
        md.g_xixi.assign(n, 0.0), md.g_etaeta.assign(n, 0.0);
        md.g_xieta.resize(n);
        for (std::size_t k = 0; k < n; ++k) md.g_xieta[k] = 0.5 * md.factor[k];
    }
    return md;
}

MetricData metric_from_form(const OneForm& w) {
    MetricData md;
    md.timelike = is_timelike(w.rep);
    const auto sig = signature_of(w.rep);
    const std::size_t n = w.grid.size();
    md.factor.resize(n);
    if (!md.timelike) {
        md.g_zz = ambient_dot(w.zpart, w.zpart, sig);
        md.g_zzb = real_part(ambient_dot(w.zpart, w.zbpart, sig));
        for (std::size_t k = 0; k < n; ++k) md.factor[k] = 2 * md.g_zzb[k];
        md.mask = factor_mask(md.factor, w.rep, 1e-12, {});
        md.conformality_defect = conf_defect(md.g_zz, md.g_zzb, md.mask);
    } else {
        md.g_xixi = real_part(ambient_dot(w.fx, w.fx, sig));
        md.g_xieta = real_part(ambient_dot(w.fx, w.fy, sig));
        md.g_etaeta = real_part(ambient_dot(w.fy, w.fy, sig));
        for (std::size_t k = 0; k < n; ++k) md.factor[k] = 2 * md.g_xieta[k];
        md.mask = factor_mask(md.factor, w.rep, 1e-12, {});
        md.conformality_defect = conf_defect_tl(md.g_xixi, md.g_xieta, md.g_etaeta, md.mask);
    }
    return md;
}

MetricData metric_numeric(const SurfacePatch& sp, Exec ex) {
    MetricData md;
    md.timelike = is_timelike(sp.rep);
    const Grid& g = sp.grid;
    const std::size_t n = g.size();
    md.factor.resize(n);
    if (!md.timelike) {
        CVec4 Xz;
        for (int c = 0; c < 4; ++c) Xz[c] = dz(to_complex(sp.X[c]), g, ex);
        md.g_zz.assign(n, 0.0);
        md.g_zzb.assign(n, 0.0);
        for (int c = 0; c < 4; ++c)
            for (std::size_t k = 0; k < n; ++k) {
                md.g_zz[k] += sp.sig.diag[c] * Xz[c][k] * Xz[c][k];
                md.g_zzb[k] += sp.sig.diag[c] * std::norm(Xz[c][k]);
            }
        for (std::size_t k = 0; k < n; ++k) md.factor[k] = 2 * md.g_zzb[k];
        md.mask = factor_mask(md.factor, sp.rep, 1e-12, sp.mask);
        md.conformality_defect = conf_defect(md.g_zz, md.g_zzb, md.mask);
    } else {
        Vec4 Xa, Xb;
        for (int c = 0; c < 4; ++c) Xa[c] = dx(sp.X[c], g, ex), Xb[c] = dy(sp.X[c], g, ex);
        md.g_xixi = ambient_dot(Xa, Xa, sp.sig);
        md.g_xieta = ambient_dot(Xa, Xb, sp.sig);
        md.g_etaeta = ambient_dot(Xb, Xb, sp.sig);
        for (std::size_t k = 0; k < n; ++k) md.factor[k] = 2 * md.g_xieta[k];
        md.mask = factor_mask(md.factor, sp.rep, 1e-12, sp.mask);
        md.conformality_defect = conf_defect_tl(md.g_xixi, md.g_xieta, md.g_etaeta, md.mask);
    }
    return md;
}

rfield brioschi(const rfield& E, const rfield& F, const rfield& G, const Grid& g, Exec ex) {
    const auto Eu = dx(E, g, ex), Ev = dy(E, g, ex);
    const auto Fu = dx(F, g, ex), Fv = dy(F, g, ex);
    const auto Gu = dx(G, g, ex), Gv = dy(G, g, ex);
    const auto Evv = dyy(E, g, 4, ex), Guu = dxx(G, g, 4, ex), Fuv = dxy(F, g, ex);
    auto det3 = [](double a, double b, double c, double d, double e, double f, double gg, double h, double i) {
        return a * (e * i - f * h) - b * (d * i - f * gg) + c * (d * h - e * gg);
    };
    rfield K(E.size());
    for (std::size_t k = 0; k < E.size(); ++k) {
        const double d1 = det3(-0.5 * Evv[k] + Fuv[k] - 0.5 * Guu[k], 0.5 * Eu[k], Fu[k] - 0.5 * Ev[k],
                               Fv[k] - 0.5 * Gu[k], E[k], F[k], 0.5 * Gv[k], F[k], G[k]);
        const double d2 = det3(0, 0.5 * Ev[k], 0.5 * Gu[k], 0.5 * Ev[k], E[k], F[k], 0.5 * Gu[k], F[k], G[k]);
        const double det = E[k] * G[k] - F[k] * F[k];
        K[k] = (d1 - d2) / (det * det);
    }
    return K;
}

namespace {

Vec4 closed_H(const SpinorQuad& sq, const Potentials& pot, const rfield& F) {
    const std::size_t n = sq.grid.size();
    Vec4 H;
    for (auto& h : H) h.assign(n, 0.0);
    const auto& s1 = sq.psi1;
    const auto& f1 = sq.phi1;
    const auto& s2 = sq.psi2;
    const auto& f2 = sq.phi2;
    auto cj = [](cplx v) { return std::conj(v); };
    for (std::size_t k = 0; k < n; ++k) {
        if (F[k] == 0.0) continue;
        const cplx p = pot.p[k], pb = cj(p);
        const double c = 2.0 / F[k];
        switch (sq.rep) {
            case Rep::R4: {
                const cplx a = p * f1[k] * s2[k] + pb * s1[k] * f2[k];
                H[0][k] = c * a.real();
                H[1][k] = c * a.imag();
                H[2][k] = c * (p * f1[k] * cj(f2[k]) - pb * s1[k] * cj(s2[k])).real();
                H[3][k] = c * (p * cj(s1[k]) * s2[k] - pb * cj(f1[k]) * f2[k]).imag();
                break;
            }
            case Rep::R22: {
                const cplx a = p * f1[k] * s2[k] + pb * s1[k] * f2[k];
                H[0][k] = c * a.real();
                H[1][k] = c * a.imag();
                H[2][k] = c * (p * f1[k] * cj(f2[k]) + pb * s1[k] * cj(s2[k])).imag();
                H[3][k] = c * (p * cj(s1[k]) * s2[k] + pb * cj(f1[k]) * f2[k]).real();
                break;
            }
            case Rep::R31: {
                const double pr = p.real(), qr = pot.q[k].real();
                H[0][k] = c * (pr * f1[k] * cj(f2[k]) + qr * s1[k] * cj(s2[k])).real();
                H[1][k] = c * (I * pr * cj(f1[k]) * f2[k] + I * qr * cj(s1[k]) * s2[k]).real();
                H[2][k] = c * (0.5 * pr * (std::norm(f1[k]) - std::norm(f2[k])) +
                               0.5 * qr * (std::norm(s1[k]) - std::norm(s2[k])));
                H[3][k] = c * (0.5 * pr * (std::norm(f1[k]) + std::norm(f2[k])) +
                               0.5 * qr * (std::norm(s1[k]) + std::norm(s2[k])));
                break;
            }
            case Rep::R3: {
                const double pr = p.real();
                const cplx a = 2.0 * I * pr * cj(s1[k]) * cj(f1[k]);
                H[0][k] = c * a.real();
                H[1][k] = c * a.imag();
                H[2][k] = c * pr * (std::norm(s1[k]) - std::norm(f1[k]));
                break;
            }
            case Rep::R21: {
                const double pr = p.real();
                const cplx a = 2.0 * pr * f1[k] * s1[k];
                H[0][k] = c * a.real();
                H[1][k] = c * a.imag();
                H[3][k] = c * pr * (std::norm(s1[k]) + std::norm(f1[k]));
                break;
            }
            case Rep::R31T: {
                const cplx ap = cj(s1[k]) * f2[k] + cj(s2[k]) * f1[k];
                const cplx am = cj(s1[k]) * f2[k] - cj(s2[k]) * f1[k];
                const cplx b1 = cj(s1[k]) * f1[k], b2 = cj(s2[k]) * f2[k];
                H[0][k] = c * (p * ap).real();
                H[1][k] = -c * (p * am).imag();
                H[2][k] = c * (p * (b1 - b2)).real();
                H[3][k] = c * (p * (b1 + b2)).real();
                break;
            }
            case Rep::R22T: {
                const double pr = p.real(), qr = pot.q[k].real();
                const double S1 = s1[k].real(), S2 = s2[k].real(), P1 = f1[k].real(), P2 = f2[k].real();
                const double T1 = sq.tpsi1[k].real(), T2 = sq.tpsi2[k].real();
                const double G1 = sq.tphi1[k].real(), G2 = sq.tphi2[k].real();
                H[0][k] = c * 0.5 * (qr * S1 * G2 + pr * P1 * T2 + pr * T1 * P2 + qr * G1 * S2);
                H[1][k] = c * 0.5 * (qr * S1 * G1 + pr * P1 * T1 - pr * T2 * P2 - qr * G2 * S2);
                H[2][k] = c * 0.5 * (pr * T1 * P2 + qr * G1 * S2 - qr * S1 * G2 - pr * P1 * T2);
                H[3][k] = c * 0.5 * (qr * S1 * G1 + pr * P1 * T1 + qr * S2 * G2 + pr * P2 * T2);
                break;
            }
        }
    }
    return H;
}

rfield closed_H2(const SpinorQuad& sq, const Potentials& pot, const rfield& F) {
    const std::size_t n = F.size();
    rfield h(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (F[k] == 0.0) continue;
        const cplx p = pot.p[k];
        switch (sq.rep) {
            case Rep::R4: h[k] = 4 * std::norm(p) / F[k]; break;
            case Rep::R22: h[k] = -4 * std::norm(p) / F[k]; break;
            case Rep::R31: h[k] = -4 * pot.q[k].real() * p.real() / F[k]; break;
            case Rep::R3: h[k] = 4 * p.real() * p.real() / F[k]; break;
            case Rep::R21: h[k] = -4 * p.real() * p.real() / F[k]; break;
            case Rep::R31T: h[k] = -4 * std::norm(p) / F[k]; break;  // F = -|..|^2
            case Rep::R22T: h[k] = -4 * pot.q[k].real() * p.real() / F[k]; break;
        }
    }
    return h;
}

}  // namespace

GeometryReport curvatures(const SpinorQuad& sq, const Potentials& pot, const ConformalFactor* cf, int order,
                          Exec ex) {
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    if (pot.p.size() != n) throw Error("curvatures: p has wrong size");
    if ((sq.rep == Rep::R31 || sq.rep == Rep::R22T) && pot.q.size() != n) throw Error("curvatures: rep needs q");
    GeometryReport r;
    const auto md = metric_closed(sq);
    r.mask = md.mask;
    rfield F = md.factor;
    for (std::size_t k = 0; k < n; ++k)
        if (r.mask[k]) F[k] = 0.0;
    r.H = closed_H(sq, pot, F);
    r.H2 = closed_H2(sq, pot, F);
    rfield Ft = F;
    if (cf) {
        if (cf->e2s.size() != n) throw Error("curvatures: conformal factor has wrong size");
        r.mask = mask_or(r.mask, cf->mask);
        for (std::size_t k = 0; k < n; ++k) {
            if (r.mask[k]) {
                Ft[k] = 0;
                continue;
            }
            Ft[k] = F[k] * cf->e2s[k];
            r.H2[k] /= cf->e2s[k];
            for (int c = 0; c < 4; ++c) r.H[c][k] /= cf->e2s[k];
        }
    }
    r.H2_vec = ambient_dot(r.H, r.H, signature_of(sq.rep));
    if (cf)
        for (std::size_t k = 0; k < n; ++k) r.H2_vec[k] *= cf->e2s[k];
    // K = -(2/F) [log|F|]_{z zbar}   (xi-eta mixed derivative for timelike)
    rfield lf(n, 0.0);
    double lmin = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (!r.mask[k]) lmin = std::min(lmin, std::log(std::abs(Ft[k])));
    for (std::size_t k = 0; k < n; ++k) lf[k] = r.mask[k] ? lmin : std::log(std::abs(Ft[k]));
    const rfield L = is_timelike(sq.rep) ? dxy(lf, g, ex) : dzdzbar(lf, g, order, ex);
    r.K.assign(n, 0.0);
    const Mask kmask = dilate(r.mask, g, order / 2);
    for (std::size_t k = 0; k < n; ++k)
        if (!kmask[k]) r.K[k] = -2.0 * L[k] / Ft[k];
    r.mask = kmask;
    r.coverage = 1.0 - double(count_masked(r.mask)) / double(n);
    rfield sign(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) sign[k] = F[k] < 0 ? -1.0 : 1.0;
    r.W = willmore(pot, sq.rep, g, &sign, &md.mask);
    rfield dens(n, 0.0);
    const double area_w = is_timelike(sq.rep) ? 0.5 : 1.0;
    for (std::size_t k = 0; k < n; ++k) dens[k] = r.H2[k] * std::abs(Ft[k]) * area_w;
    r.W_area = quad_area(dens, g, &md.mask).value.real();
    r.conformality_defect = metric_from_form(weierstrass_form(sq)).conformality_defect;
    return r;
}

NumericGeometry geometry_numeric(const SurfacePatch& sp, Exec ex) {
    NumericGeometry ng;
    const Grid& g = sp.grid;
    const std::size_t n = g.size();
    ng.metric = metric_numeric(sp, ex);
    for (auto& h : ng.H) h.assign(n, 0.0);
    Vec4 Xu, Xv;
    for (int c = 0; c < 4; ++c) {
        Xu[c] = dx(sp.X[c], g, ex);
        Xv[c] = dy(sp.X[c], g, ex);
        const rfield second = is_timelike(sp.rep) ? dxy(sp.X[c], g, ex) : dzdzbar(sp.X[c], g, 4, ex);
        const rfield& den = is_timelike(sp.rep) ? ng.metric.g_xieta : ng.metric.g_zzb;
        for (std::size_t k = 0; k < n; ++k)
            if (!ng.metric.mask[k]) ng.H[c][k] = second[k] / den[k];
    }
    ng.H2 = ambient_dot(ng.H, ng.H, sp.sig);
    const auto E = ambient_dot(Xu, Xu, sp.sig), F = ambient_dot(Xu, Xv, sp.sig), G = ambient_dot(Xv, Xv, sp.sig);
    ng.K = brioschi(E, F, G, g, ex);
    return ng;
}

double willmore(const Potentials& pot, Rep rep, const Grid& g, const rfield* sign_field, const Mask* mask) {
    const std::size_t n = g.size();
    if (pot.p.size() != n) throw Error("willmore: p has wrong size");
    rfield d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx p = pot.p[k];
        const double q = pot.q.empty() ? 0.0 : pot.q[k].real();
        switch (rep) {
            case Rep::R4: d[k] = 4 * std::norm(p); break;
            case Rep::R22: d[k] = -4 * std::norm(p); break;
            case Rep::R31: d[k] = -4 * q * p.real(); break;
            case Rep::R3: d[k] = 4 * p.real() * p.real(); break;
            case Rep::R21: d[k] = -4 * p.real() * p.real(); break;
            case Rep::R31T: d[k] = 2 * std::norm(p); break;
            case Rep::R22T: d[k] = -2 * (sign_field ? (*sign_field)[k] : 1.0) * q * p.real(); break;
        }
    }
    return quad_area(d, g, mask).value.real();
}

GaussMapData normals_and_gauss(const SpinorQuad& sq, const Potentials& pot, double mask_tol) {
    if (sq.rep != Rep::R4) throw Error("normals_and_gauss: R4 only");
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    GaussMapData gm;
    gm.mask.assign(n, 0);
    double mx = 0;
    for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, std::abs(sq.phi1[k] * sq.phi2[k]));
    for (std::size_t k = 0; k < n; ++k)
        gm.mask[k] = (std::abs(sq.phi1[k] * sq.phi2[k]) < mask_tol * mx) || (!sq.mask.empty() && sq.mask[k]);
    if (count_masked(gm.mask) == n) throw Error("normals_and_gauss: fully masked patch");
    for (int c = 0; c < 4; ++c) gm.N1[c].assign(n, 0.0), gm.N2[c].assign(n, 0.0), gm.G[c].assign(n, 0.0);
    gm.h1.assign(n, 0.0), gm.h2.assign(n, 0.0);
    const auto w = weierstrass_form(sq);
    const auto md = metric_closed(sq);
    const auto H = closed_H(sq, pot, md.factor);
    const auto H2 = closed_H2(sq, pot, md.factor);
    const auto sig = Signature::of(Sig::R4);
    double gmax = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (gm.mask[k]) continue;
        const cplx s1 = sq.psi1[k], f1 = sq.phi1[k], s2 = sq.psi2[k], f2 = sq.phi2[k];
        const double u1 = std::norm(s1) + std::norm(f1), u2 = std::norm(s2) + std::norm(f2);
        const double sc = std::sqrt(std::norm(f1) * std::norm(f2) / (u1 * u2));
        const cplx a = s1 / std::conj(f1), b = std::conj(s2) / f2;
        const cplx A[4] = {-a - b, I * (a - b), a * b - 1.0, -I * (1.0 + a * b)};
        for (int c = 0; c < 4; ++c) gm.N1[c][k] = sc * A[c].real(), gm.N2[c][k] = sc * A[c].imag();
        const cplx r1 = std::conj(s1) / f1, r2 = std::conj(s2) / f2;
        const cplx G[4] = {1.0 + r1 * r2, I * (1.0 - r1 * r2), I * (r1 + r2), r1 - r2};
        cplx qsum = 0;
        double gn = 0;
        for (int c = 0; c < 4; ++c) gm.G[c][k] = G[c], qsum += G[c] * G[c], gn += std::norm(G[c]);
        gmax = std::max(gmax, gn);
        gm.quadric_defect = std::max(gm.quadric_defect, std::abs(qsum) / gn);
        // conj(p), not p: the frame (N1, N2) above rotates H by arg(p^2) otherwise
        const cplx pf = std::conj(pot.p[k]) * std::conj(f1) * f2;
        const double den = std::sqrt(std::norm(f1) * std::norm(f2) * u1 * u2);
        gm.h1[k] = -2 * pf.real() / den;
        gm.h2[k] = 2 * pf.imag() / den;
        // tangency and orthonormality
        std::array<double, 4> n1, n2;
        for (int c = 0; c < 4; ++c) n1[c] = gm.N1[c][k], n2[c] = gm.N2[c][k];
        cplx t1 = 0, t2 = 0;
        double xz = 0;
        for (int c = 0; c < 4; ++c)
            t1 += n1[c] * w.zpart[c][k], t2 += n2[c] * w.zpart[c][k], xz += std::norm(w.zpart[c][k]);
        xz = std::sqrt(xz);
        gm.tangency_defect = std::max({gm.tangency_defect, std::abs(t1) / xz, std::abs(t2) / xz});
        gm.orthonormality_defect = std::max({gm.orthonormality_defect, std::abs(sig.dot(n1, n1) - 1),
                                             std::abs(sig.dot(n2, n2) - 1), std::abs(sig.dot(n1, n2))});
        double dh = 0;
        for (int c = 0; c < 4; ++c) dh = std::max(dh, std::abs(H[c][k] - gm.h1[k] * n1[c] - gm.h2[k] * n2[c]));
        gm.h_decomposition_gap = std::max(gm.h_decomposition_gap, dh);
        gm.h2_gap = std::max(gm.h2_gap, std::abs(gm.h1[k] * gm.h1[k] + gm.h2[k] * gm.h2[k] - H2[k]));
    }
    (void)gmax;
    return gm;
}

KenmotsuData kenmotsu_convert(const SpinorQuad& sq, const Potentials& pot, int interior) {
    if (sq.rep != Rep::R4) throw Error("kenmotsu_convert: R4 only");
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    KenmotsuData kd;
    kd.f1.resize(n), kd.f2.resize(n), kd.eta.resize(n);
    double mx = 0;
    for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, std::abs(sq.phi1[k] * sq.phi2[k]));
    kd.mask = interior_mask(g, interior);
    Mask raw(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const bool bad = std::abs(sq.phi1[k] * sq.phi2[k]) < 1e-10 * mx || (!sq.mask.empty() && sq.mask[k]);
        raw[k] = bad;
        kd.f1[k] = bad ? 0.0 : I * std::conj(sq.psi1[k]) / sq.phi1[k];
        kd.f2[k] = bad ? 0.0 : -I * std::conj(sq.psi2[k]) / sq.phi2[k];
        kd.eta[k] = I * sq.phi1[k] * sq.phi2[k];
    }
    kd.mask = mask_or(kd.mask, dilate(raw, g, 4));
    const auto f1zb = dzbar(kd.f1, g), f2zb = dzbar(kd.f2, g);
    const auto f1z = dz(kd.f1, g), f2z = dz(kd.f2, g);
    kd.F1.resize(n), kd.F2.resize(n), kd.p_from_F1.resize(n), kd.p_from_F2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        kd.F1[k] = f1zb[k] / (1.0 + std::norm(kd.f1[k]));
        kd.F2[k] = f2zb[k] / (1.0 + std::norm(kd.f2[k]));
        if (raw[k]) continue;
        // p = i F2 phi2 / conj(phi2);  conj(p) = -i F1 phi1 / conj(phi1)
        kd.p_from_F1[k] = std::conj(-I * kd.F1[k] * sq.phi1[k] / std::conj(sq.phi1[k]));
        kd.p_from_F2[k] = I * kd.F2[k] * sq.phi2[k] / std::conj(sq.phi2[k]);
    }
    const auto md = metric_closed(sq);
    const auto H2 = closed_H2(sq, pot, md.factor);
    // bracket = sum_i f_i,z zb / f_i,zb - 2 conj(f_i) f_i,z / (1 + |f_i|^2)
    const auto f1zzb = dz(f1zb, g), f2zzb = dz(f2zb, g);
    double pmax = 0, fmin = 1e300;
    for (std::size_t k = 0; k < n; ++k)
        if (!kd.mask[k]) pmax = std::max(pmax, std::abs(pot.p[k])), fmin = std::min(fmin, std::abs(f1zb[k]));
    cfield bracket(n, 0.0), logH2(n, 0.0);
    const bool have_p = pmax > 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (kd.mask[k]) continue;
        kd.p_gap = std::max({kd.p_gap, std::abs(kd.p_from_F1[k] - pot.p[k]), std::abs(kd.p_from_F2[k] - pot.p[k])});
        kd.modulus_gap = std::max(kd.modulus_gap, std::abs(std::abs(kd.F1[k]) - std::abs(kd.F2[k])));
        if (!have_p || H2[k] <= 0) continue;
        const cplx rhs =
            -4.0 * kd.F1[k] * kd.F2[k] / (H2[k] * (1 + std::norm(kd.f1[k])) * (1 + std::norm(kd.f2[k])));
        const cplx lhs = std::conj(kd.eta[k]) * std::conj(kd.eta[k]);
        kd.eta_gap = std::max(kd.eta_gap, std::abs(lhs - rhs) / std::abs(lhs));
    }
    if (have_p) {
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(f1zb[k]) == 0.0 || std::abs(f2zb[k]) == 0.0 || H2[k] <= 0) {
                ok = false;
                break;
            }
            bracket[k] = f1zzb[k] / f1zb[k] - 2.0 * std::conj(kd.f1[k]) * f1z[k] / (1 + std::norm(kd.f1[k])) +
                         f2zzb[k] / f2zb[k] - 2.0 * std::conj(kd.f2[k]) * f2z[k] / (1 + std::norm(kd.f2[k]));
            logH2[k] = std::log(H2[k]);
        }
        if (ok) {
            const auto bzb = dzbar(bracket, g);
            const auto lz = dz(logH2, g);
            const Mask inner = mask_or(kd.mask, interior_mask(g, interior + 4));
            double bmax = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (!inner[k]) bmax = std::max(bmax, std::abs(bzb[k]));
            for (std::size_t k = 0; k < n; ++k) {
                if (inner[k]) continue;
                kd.imag_constraint = std::max(kd.imag_constraint, std::abs(bzb[k].imag()) / std::max(bmax, 1e-300));
                kd.logH_gap = std::max(kd.logH_gap, std::abs(bracket[k] - lz[k]));
            }
        }
    }
    (void)fmin;
    return kd;
}

SpinorQuad kenmotsu_inverse(const Grid& g, const cfield& f1, const cfield& f2, const cfield& eta, const cfield& phi1) {
    const std::size_t n = g.size();
    SpinorQuad sq;
    sq.rep = Rep::R4;
    sq.grid = g;
    sq.psi1.resize(n), sq.phi1 = phi1, sq.psi2.resize(n), sq.phi2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (phi1[k] == 0.0) throw Error("kenmotsu_inverse: phi1 vanishes");
        sq.phi2[k] = -I * eta[k] / phi1[k];
        sq.psi1[k] = std::conj(-I * f1[k] * phi1[k]);
        sq.psi2[k] = std::conj(I * f2[k] * sq.phi2[k]);
    }
    return sq;
}

double superminimal_sign(Rep rep) {
    if (rep == Rep::R4) return 1.0;
    if (rep == Rep::R22) return -1.0;
    throw Error("superminimal identity is stated for R4 and R22 only");
}

ClassResiduals class_predicates(const SpinorQuad& sq, const Potentials& pot, int interior) {
    const Grid& g = sq.grid;
    const std::size_t n = g.size();
    ClassResiduals cr;
    const auto md = metric_closed(sq);
    Mask m = mask_or(md.mask, interior_mask(g, interior));
    const auto H = closed_H(sq, pot, md.factor);
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k]) continue;
        double h = 0;
        for (int c = 0; c < 4; ++c) h += H[c][k] * H[c][k];
        cr.minimal = std::max(cr.minimal, std::sqrt(h));
    }
    if (sq.rep == Rep::R4 || sq.rep == Rep::R22) {
        const auto w = weierstrass_form(sq);
        CVec4 Xzz;
        for (int c = 0; c < 4; ++c) Xzz[c] = dz(w.zpart[c], g);
        const auto lhs = ambient_dot(Xzz, Xzz, signature_of(sq.rep));
        cfield cs1(n), cs2(n);
        for (std::size_t k = 0; k < n; ++k) cs1[k] = std::conj(sq.psi1[k]), cs2[k] = std::conj(sq.psi2[k]);
        const auto cs1z = dz(cs1, g), cs2z = dz(cs2, g), f1z = dz(sq.phi1, g), f2z = dz(sq.phi2, g);
        const double s = superminimal_sign(sq.rep);
        for (std::size_t k = 0; k < n; ++k) {
            if (m[k]) continue;
            const cplx rhs = s * (cs1z[k] * sq.phi1[k] - cs1[k] * f1z[k]) * (cs2z[k] * sq.phi2[k] - cs2[k] * f2z[k]);
            cr.superminimal_direct = std::max(cr.superminimal_direct, std::abs(lhs[k]));
            cr.superminimal_rhs_gap = std::max(cr.superminimal_rhs_gap, std::abs(lhs[k] - rhs));
        }
        // sufficient condition: p = 0 and phi_a = a conj(psi_a), a fitted by least squares
        auto fit = [&](const cfield& psi, const cfield& phi) {
            cplx num = 0;
            double den = 0;
            for (std::size_t k = 0; k < n; ++k) num += psi[k] * phi[k], den += std::norm(psi[k]);
            const cplx a = den > 0 ? num / den : 0.0;
            double r = 0;
            for (std::size_t k = 0; k < n; ++k) r = std::max(r, std::abs(phi[k] - a * std::conj(psi[k])));
            return r;
        };
        cr.superminimal_sufficient = max_abs(pot.p) + std::min(fit(sq.psi1, sq.phi1), fit(sq.psi2, sq.phi2));
    }
    const auto H2 = closed_H2(sq, pot, md.factor);
    double s = 0, s2 = 0, cnt = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (!m[k]) s += H2[k], s2 += H2[k] * H2[k], cnt += 1;
    if (cnt > 0) {
        const double mean = s / cnt;
        const double var = std::max(0.0, s2 / cnt - mean * mean);
        cr.constant_h2 = mean != 0 ? std::sqrt(var) / std::abs(mean) : 0.0;
        if (sq.rep == Rep::R4 && mean > 0) {
            // psi_a,z = (1/2) e^{i theta_a} sqrt(H2 u1 u2) phi_a, theta_1 = -theta_2 = arg p
            const auto p1 = dz(sq.psi1, g), p2 = dz(sq.psi2, g);
            for (std::size_t k = 0; k < n; ++k) {
                if (m[k]) continue;
                const double th = std::arg(pot.p[k]);
                const double amp = 0.5 * std::sqrt(mean * md.factor[k]);
                cr.constant_h2_system =
                    std::max({cr.constant_h2_system, std::abs(p1[k] - amp * std::exp(I * th) * sq.phi1[k]),
                              std::abs(p2[k] - amp * std::exp(-I * th) * sq.phi2[k])});
            }
        }
    }
    return cr;
}

}  // namespace w4d
