#include "w4d/reduction1d.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "w4d/geometry.hpp"
#include "w4d/spectral.hpp"

namespace w4d {

void Grid1D::validate() const {
    if (n < 8) throw Error("Grid1D: need at least 8 points");
    if (!(length > 0) || !std::isfinite(length) || !std::isfinite(x0)) throw Error("Grid1D: bad extent");
}

namespace {

// cubic midpoint value between samples i and i+1
cplx midpoint(const cfield& f, int i, bool periodic) {
    const int n = int(f.size());
    auto at = [&](int k) { return f[std::size_t(periodic ? (k % n + n) % n : k)]; };
    if (periodic || (i >= 1 && i + 2 < n)) return (-at(i - 1) + 9.0 * at(i) + 9.0 * at(i + 1) - at(i + 2)) / 16.0;
    if (i == 0) return (5.0 * at(0) + 15.0 * at(1) - 5.0 * at(2) + at(3)) / 16.0;
    return (at(n - 4) - 5.0 * at(n - 3) + 15.0 * at(n - 2) + 5.0 * at(n - 1)) / 16.0;
}

using M2 = std::array<cplx, 4>;

M2 mul(const M2& a, const M2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}
M2 add(const M2& a, const M2& b, cplx s) { return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]}; }
cplx det(const M2& a) { return a[0] * a[3] - a[1] * a[2]; }

double integral(const rfield& f, const Grid1D& g) {
    double s = 0;
    if (g.periodic) {
        for (double v : f) s += v;
    } else {
        for (std::size_t k = 0; k < f.size(); ++k) s += (k == 0 || k + 1 == f.size()) ? 0.5 * f[k] : f[k];
    }
    return s * g.h();
}

struct Pair {
    cfield chi, chit;
};

Pair column(const Fundamental& F, int c) {
    Pair r;
    r.chi.resize(F.phi.size()), r.chit.resize(F.phi.size());
    for (std::size_t k = 0; k < F.phi.size(); ++k) r.chi[k] = F.phi[k][c], r.chit[k] = F.phi[k][2 + c];
    return r;
}

// For the conjugation-symmetric reductions the fundamental matrix is
// [[chi, -+conj(chit)], [chit, conj(chi)]], so det = |chi|^2 +- |chit|^2.
// Normalizing that column invariant is the unit-determinant condition in a
// form that does not let the two columns drift apart.
void normalize_column(Pair& c, double sign) {
    for (std::size_t k = 0; k < c.chi.size(); ++k) {
        const double d = std::norm(c.chi[k]) + sign * std::norm(c.chit[k]);
        if (!(d > 0)) throw Error("reduction: column invariant lost positivity");
        const double s = 1.0 / std::sqrt(d);
        c.chi[k] *= s, c.chit[k] *= s;
    }
}

struct Separable {
    Pair a, b;
    cplx la, lb;
    double drift = 0;
};

Separable separable_pairs(const cfield& p, const Grid1D& g, cplx lambda, cplx mu, Rep rep, const cfield* q) {
    const std::size_t n = std::size_t(g.n);
    if (p.size() != n) throw Error("reduction: p has wrong size");
    Separable s;
    s.la = lambda, s.lb = mu;
    cfield pb(n), mp(n), mpb(n);
    for (std::size_t k = 0; k < n; ++k) pb[k] = std::conj(p[k]), mp[k] = -p[k], mpb[k] = -std::conj(p[k]);
    switch (rep) {
        case Rep::R4: {
            const auto f1 = akns_solve({g, p, mpb, lambda});
            const auto f2 = akns_solve({g, pb, mp, mu});
            s.a = column(f1, 0), s.b = column(f2, 0);
            if (lambda.imag() == 0.0 && mu.imag() == 0.0) normalize_column(s.a, 1), normalize_column(s.b, 1);
            s.drift = std::max(f1.det_drift, f2.det_drift);
            break;
        }
        case Rep::R22: {
            const auto f1 = akns_solve({g, p, pb, lambda});
            const auto f2 = akns_solve({g, pb, p, mu});
            s.a = column(f1, 0), s.b = column(f2, 0);
            if (lambda.imag() == 0.0 && mu.imag() == 0.0) normalize_column(s.a, -1), normalize_column(s.b, -1);
            s.drift = std::max(f1.det_drift, f2.det_drift);
            break;
        }
        case Rep::R31: {
            if (!q || q->size() != n) throw Error("reduction: R31 needs q");
            for (std::size_t k = 0; k < n; ++k)
                if (p[k].imag() != 0.0 || (*q)[k].imag() != 0.0) throw Error("reduction: R31 needs real p and q");
            if (lambda != mu) throw Error("reduction: R31 uses both columns of one solution, so mu must equal lambda");
            const auto f = akns_solve({g, p, *q, lambda});
            s.a = column(f, 0), s.b = column(f, 1);
            s.drift = f.det_drift;
            break;
        }
        default: throw Error("reduction: representation must be R4, R22 or R31");
    }
    return s;
}

SpinorQuad separable_quad(const Separable& s, Rep rep, const Grid& g2) {
    SpinorQuad sq;
    sq.rep = rep;
    sq.grid = g2;
    const std::size_t n = g2.size();
    sq.psi1.resize(n), sq.phi1.resize(n), sq.psi2.resize(n), sq.phi2.resize(n);
    for (int j = 0; j < g2.ny; ++j) {
        const double y = g2.y(j);
        const cplx ea = std::exp(s.la * y), eb = std::exp(s.lb * y);
        for (int i = 0; i < g2.nx; ++i) {
            const auto k = g2.idx(i, j);
            sq.psi1[k] = s.a.chi[i] * ea, sq.phi1[k] = s.a.chit[i] * ea;
            sq.psi2[k] = s.b.chi[i] * eb, sq.phi2[k] = s.b.chit[i] * eb;
        }
    }
    return sq;
}

Grid strip(const Grid1D& g, double y_min, double y_max, int ny) {
    Grid g2{g.x0, g.x0 + (g.n - 1) * g.h(), y_min, y_max, g.n, ny, false, false};
    g2.validate();
    return g2;
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

using Rhs = std::function<cfield(const cfield&)>;

Evolve1DResult run_rk4(cfield y, const Evolve1DOptions& opt, double dt_auto, double dt_limit,
                       const Rhs& f, const std::function<Series1DRow(double, const cfield&)>& row) {
    if (!(opt.T >= 0)) throw Error("evolve: T must be non-negative");
    if (opt.sample_every < 1) throw Error("evolve: sample_every must be >= 1");
    Evolve1DResult r;
    double dt = opt.dt > 0 ? opt.dt : dt_auto;
    if (dt > dt_limit) {
        std::ostringstream os;
        os << "evolve: dt = " << dt << " exceeds the RK4 stability bound " << dt_limit;
        throw Error(os.str());
    }
    const int steps = opt.T == 0 ? 0 : int(std::ceil(opt.T / dt - 1e-9));
    if (steps > 0) dt = opt.T / steps;
    r.dt = dt, r.steps = steps;
    const double ref = std::max(1.0, max_modulus(y));
    const std::size_t n = y.size();
    auto sample = [&](double t) {
        r.series.push_back(row(t, y));
        if (opt.keep_snapshots) r.snapshots.push_back(y);
    };
    sample(0.0);
    cfield tmp(n);
    for (int s = 1; s <= steps; ++s) {
        const auto k1 = f(y);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = y[k] + 0.5 * dt * k1[k];
        const auto k2 = f(tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = y[k] + 0.5 * dt * k2[k];
        const auto k3 = f(tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = y[k] + dt * k3[k];
        const auto k4 = f(tmp);
        for (std::size_t k = 0; k < n; ++k) y[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        const double m = max_modulus(y);
        if (!std::isfinite(m) || m > opt.blowup * ref) {
            std::ostringstream os;
            os << "1D evolution blowup at t = " << s * dt << ": max amplitude " << m;
            throw BlowupError(os.str(), s * dt, m);
        }
        if (s % opt.sample_every == 0 || s == steps) sample(s * dt);
    }
    r.field = std::move(y);
    return r;
}

}  // namespace

Fundamental akns_solve(const AknsProblem& prob, bool renormalize) {
    const Grid1D& g = prob.grid;
    g.validate();
    const std::size_t n = std::size_t(g.n);
    if (prob.p.size() != n || prob.q.size() != n) throw Error("akns_solve: p/q have wrong size");
    for (std::size_t k = 0; k < n; ++k)
        if (!std::isfinite(std::abs(prob.p[k])) || !std::isfinite(std::abs(prob.q[k])))
            throw Error("akns_solve: non-finite coefficient");
    const double h = g.h();
    const double rate = std::abs(prob.lambda) + 2 * std::max(max_modulus(prob.p), max_modulus(prob.q));
    if (h * rate > 1.0) {
        std::ostringstream os;
        os << "akns_solve: step " << h << " too coarse for coefficient scale " << rate << "; use h <= " << 1.0 / rate;
        throw Error(os.str());
    }
    const cplx il = I * prob.lambda;
    auto gen = [&](cplx p, cplx q) { return M2{il, 2.0 * p, 2.0 * q, -il}; };
    Fundamental F;
    F.renormalized = renormalize;
    F.phi.resize(n);
    M2 Y{1.0, 0.0, 0.0, 1.0};
    F.phi[0] = Y;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const int i = int(k);
        const M2 A0 = gen(prob.p[k], prob.q[k]);
        const M2 Am = gen(midpoint(prob.p, i, g.periodic), midpoint(prob.q, i, g.periodic));
        const M2 A1 = gen(prob.p[k + 1], prob.q[k + 1]);
        const M2 k1 = mul(A0, Y);
        const M2 k2 = mul(Am, add(Y, k1, 0.5 * h));
        const M2 k3 = mul(Am, add(Y, k2, 0.5 * h));
        const M2 k4 = mul(A1, add(Y, k3, h));
        for (int c = 0; c < 4; ++c) Y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        const cplx d = det(Y);
        F.det_drift = std::max(F.det_drift, std::abs(d - 1.0));
        if (renormalize) {
            const cplx s = 1.0 / std::sqrt(d);
            for (auto& v : Y) v *= s;
        }
        F.phi[k + 1] = Y;
    }
    return F;
}

std::array<cplx, 4> akns_constant(cplx p, cplx q, cplx lambda, double x) {
    const cplx il = I * lambda;
    const M2 M{il, 2.0 * p, 2.0 * q, -il};
    const cplx kappa = std::sqrt(4.0 * p * q - lambda * lambda);
    const cplx c = std::cosh(kappa * x);
    const cplx s = std::abs(kappa) < 1e-300 ? cplx(x) : std::sinh(kappa * x) / kappa;
    return {c + s * M[0], s * M[1], s * M[2], c + s * M[3]};
}

cfield reduced_q(const cfield& p, ReductionKind kind, int eps) {
    cfield q(p.size());
    switch (kind) {
        case ReductionKind::nls:
            if (eps != 1 && eps != -1) throw Error("reduced_q: eps must be +-1");
            for (std::size_t k = 0; k < p.size(); ++k) q[k] = double(eps) * std::conj(p[k]);
            break;
        case ReductionKind::mkdv: q = p; break;
        case ReductionKind::kdv: throw Error("reduced_q: the KdV reduction fixes p = -1; the field is q");
    }
    return q;
}

CurveOnS3 curve_from_reduction(const cfield& p, const Grid1D& g, double lambda, double mu, Rep rep, const cfield* q) {
    g.validate();
    const double s = lambda + mu;
    if (s == 0.0) throw Error("curve_from_reduction: lambda + mu = 0 is the planar-curve case (not handled)");
    const auto sep = separable_pairs(p, g, lambda, mu, rep, q);
    const Grid g2 = strip(g, 0.0, 7 * g.h(), 8);
    const auto w = weierstrass_form(separable_quad(sep, rep, g2));
    const auto md = metric_from_form(w);
    CurveOnS3 c;
    c.grid = g;
    c.sig = signature_of(rep);
    c.radius2 = 1.0 / (s * s);
    c.det_drift = sep.drift;
    const std::size_t n = std::size_t(g.n);
    std::array<rfield, 4> dY;
    for (int a = 0; a < 4; ++a) c.Y[a].resize(n), dY[a].resize(n);
    for (std::size_t k = 0; k < n; ++k)
        for (int a = 0; a < 4; ++a) {
            // X_z = (Y' - i s Y) e^{sy}/2, X_zb = (Y' + i s Y) e^{sy}/2 at y = 0
            const cplx Z = w.zpart[a][k], Zb = w.zbpart[a][k];
            const cplx Y = (Zb - Z) / (I * s), D = Z + Zb;
            c.Y[a][k] = Y.real();
            dY[a][k] = D.real();
            c.imag_defect = std::max({c.imag_defect, std::abs(Y.imag()), std::abs(D.imag())});
        }
    c.speed2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double yy = 0, dd = 0, ye = 0, de = 0;
        for (int a = 0; a < 4; ++a) {
            yy += c.sig.diag[a] * c.Y[a][k] * c.Y[a][k], ye += c.Y[a][k] * c.Y[a][k];
            dd += c.sig.diag[a] * dY[a][k] * dY[a][k], de += dY[a][k] * dY[a][k];
        }
        c.speed2[k] = dd;
        c.constraint_defect = std::max(c.constraint_defect, std::abs(yy - c.radius2) / std::max(c.radius2, ye));
        c.speed_defect = std::max(c.speed_defect, std::abs(dd - md.factor[k]) / std::max(1.0, de));
    }
    return c;
}

double cone_immersion_gap(const cfield& p, const Grid1D& g, double lambda, double mu, Rep rep, double y_max, int ny) {
    const auto curve = curve_from_reduction(p, g, lambda, mu, rep);
    const auto sep = separable_pairs(p, g, lambda, mu, rep, nullptr);
    const Grid g2 = strip(g, 0.0, y_max, ny);
    ImmerseOptions io;
    io.residual_tol = -1;
    const auto sp = integrate_form(weierstrass_form(separable_quad(sep, rep, g2)), io);
    const double s = lambda + mu;
    double gap = 0, scale = 0;
    for (int j = 0; j < g2.ny; ++j)
        for (int i = 0; i < g2.nx; ++i)
            for (int a = 0; a < 4; ++a) {
                const double ref = curve.Y[a][i] * std::exp(s * g2.y(j)) - curve.Y[a][0];
                gap = std::max(gap, std::abs(sp.X[a][g2.idx(i, j)] - ref));
                scale = std::max(scale, std::abs(curve.Y[a][i] * std::exp(s * g2.y(j))));
            }
    return gap / scale;
}

RevolutionData surface_of_revolution(const cfield& p, const Grid1D& g, double omega1, double omega2, double y_max,
                                     int ny) {
    g.validate();
    const auto sep = separable_pairs(p, g, I * omega1, I * omega2, Rep::R4, nullptr);
    const Grid g2 = strip(g, 0.0, y_max, ny);
    const auto sq = separable_quad(sep, Rep::R4, g2);
    const auto w = weierstrass_form(sq);
    RevolutionData r;
    ImmerseOptions io;
    io.residual_tol = -1;
    r.patch = integrate_form(w, io);
    const auto md = metric_from_form(w);
    const std::size_t n = std::size_t(g.n);
    r.A.resize(n);
    double amax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r.A[i] = (std::norm(sep.a.chi[i]) + std::norm(sep.a.chit[i])) * (std::norm(sep.b.chi[i]) + std::norm(sep.b.chit[i]));
        amax = std::max(amax, r.A[i]);
    }
    for (int i = 0; i < g2.nx; ++i) {
        double lo = 1e300, hi = -1e300;
        for (int j = 0; j < g2.ny; ++j) {
            const double F = md.factor[g2.idx(i, j)];
            lo = std::min(lo, F), hi = std::max(hi, F);
            r.metric_A_gap = std::max(r.metric_A_gap, std::abs(F - r.A[i]));
        }
        r.metric_y_variation = std::max(r.metric_y_variation, hi - lo);
    }
    r.metric_y_variation /= amax;
    r.metric_A_gap /= amax;
    return r;
}

double stable_dt_1d(const Grid1D& g, int order, double amplitude, double safety) {
    const double k = PI / g.h();
    double lam = 0;
    if (order == 2) lam = k * k + 6 * amplitude * amplitude;
    else if (order == 3) lam = k * k * k + 6 * (amplitude + amplitude * amplitude) * k;
    else throw Error("stable_dt_1d: order must be 2 or 3");
    return safety * 2.8 / lam;
}

Evolve1DResult nls_evolve(const cfield& p, int eps, const Grid1D& g, const Evolve1DOptions& opt) {
    g.validate();
    if (!g.periodic) throw Error("nls_evolve: periodic grid required");
    if (eps != 1 && eps != -1) throw Error("nls_evolve: eps must be +-1");
    if (int(p.size()) != g.n) throw Error("nls_evolve: field size mismatch");
    const Spectral1D sp(g.n, g.length);
    const double e = eps;
    auto f = [&](const cfield& y) {
        auto d = sp.deriv(y, 2);
        for (std::size_t k = 0; k < y.size(); ++k) d[k] = -I * (d[k] - 2.0 * e * std::norm(y[k]) * y[k]);
        return d;
    };
    auto row = [&](double t, const cfield& y) {
        const auto yx = sp.deriv(y, 1);
        rfield m(y.size()), h(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            m[k] = std::norm(y[k]);
            h[k] = std::norm(yx[k]) + e * m[k] * m[k];
        }
        const double mass = integral(m, g);
        return Series1DRow{t, e * mass, mass, integral(h, g)};
    };
    const double amp = max_modulus(p);
    return run_rk4(p, opt, stable_dt_1d(g, 2, amp), stable_dt_1d(g, 2, amp, 1.0), f, row);
}

namespace {
cfield real_field(const rfield& r) {
    cfield c(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) c[k] = r[k];
    return c;
}
}  // namespace

Evolve1DResult kdv_evolve(const rfield& q, const Grid1D& g, const Evolve1DOptions& opt) {
    g.validate();
    if (!g.periodic) throw Error("kdv_evolve: periodic grid required");
    if (int(q.size()) != g.n) throw Error("kdv_evolve: field size mismatch");
    const Spectral1D sp(g.n, g.length);
    auto f = [&](const cfield& y) {
        auto d3 = sp.deriv(y, 3);
        const auto d1 = sp.deriv(y, 1);
        for (std::size_t k = 0; k < y.size(); ++k) d3[k] = -(d3[k].real() + 6.0 * y[k].real() * d1[k].real());
        return d3;
    };
    auto row = [&](double t, const cfield& y) {
        rfield a(y.size()), b(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) a[k] = y[k].real(), b[k] = a[k] * a[k];
        const double mass = integral(a, g);
        return Series1DRow{t, -mass, mass, integral(b, g)};
    };
    double amp = 0;
    for (double v : q) amp = std::max(amp, std::abs(v));
    return run_rk4(real_field(q), opt, stable_dt_1d(g, 3, amp), stable_dt_1d(g, 3, amp, 1.0), f, row);
}

Evolve1DResult mkdv_evolve(const rfield& p, const Grid1D& g, const Evolve1DOptions& opt) {
    g.validate();
    if (!g.periodic) throw Error("mkdv_evolve: periodic grid required");
    if (int(p.size()) != g.n) throw Error("mkdv_evolve: field size mismatch");
    const Spectral1D sp(g.n, g.length);
    auto f = [&](const cfield& y) {
        auto d3 = sp.deriv(y, 3);
        const auto d1 = sp.deriv(y, 1);
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double v = y[k].real();
            d3[k] = d3[k].real() - 6.0 * v * v * d1[k].real();
        }
        return d3;
    };
    auto row = [&](double t, const cfield& y) {
        const auto yx = sp.deriv(y, 1);
        rfield a(y.size()), b(y.size()), h(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double v = y[k].real(), vx = yx[k].real();
            a[k] = v, b[k] = v * v, h[k] = vx * vx + v * v * v * v;
        }
        return Series1DRow{t, integral(b, g), integral(a, g), integral(h, g)};
    };
    double amp = 0;
    for (double v : p) amp = std::max(amp, std::abs(v));
    return run_rk4(real_field(p), opt, stable_dt_1d(g, 3, amp), stable_dt_1d(g, 3, amp, 1.0), f, row);
}

// ---- KdV traveling wave: q'' = c q - 3 q^2, q(0) = A, q'(0) = 0 ----
namespace {

struct TwState {
    double q, v;
};

TwState tw_step(TwState s, double c, double h) {
    auto f = [&](TwState a) { return TwState{a.v, c * a.q - 3 * a.q * a.q}; };
    const auto k1 = f(s);
    const auto k2 = f({s.q + 0.5 * h * k1.q, s.v + 0.5 * h * k1.v});
    const auto k3 = f({s.q + 0.5 * h * k2.q, s.v + 0.5 * h * k2.v});
    const auto k4 = f({s.q + h * k3.q, s.v + h * k3.v});
    return {s.q + h / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q), s.v + h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

// +1: overshoot (crosses zero), -1: undershoot (turns back up), 0: undecided
int shoot(double A, double c, double h, double xmax) {
    TwState s{A, 0};
    for (double x = 0; x < xmax; x += h) {
        s = tw_step(s, c, h);
        if (s.q < 0) return 1;
        if (s.v > 0) return -1;
    }
    return 0;
}

}  // namespace

double kdv_shooting_amplitude(double c) {
    if (!(c > 0)) throw Error("kdv traveling wave: speed must be positive");
    const double h = 2e-3 / std::sqrt(c), xmax = 60 / std::sqrt(c);
    double lo = 1e-6 * c, hi = c;
    if (shoot(lo, c, h, xmax) != -1 || shoot(hi, c, h, xmax) != 1) throw Error("kdv traveling wave: bracket failed");
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const int r = shoot(mid, c, h, xmax);
        if (r == 0) return mid;
        (r > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

rfield kdv_soliton_profile(const Grid1D& g, double c, double center) {
    g.validate();
    const double A = kdv_shooting_amplitude(c);
    const double h = 2e-3 / std::sqrt(c);
    const double rc = std::sqrt(c);
    // tabulate from the peak until the tail is exponential to working precision
    std::vector<TwState> tab{{A, 0}};
    while (tab.back().q > 1e-7 * A && tab.size() < 10000000) {
        auto s = tw_step(tab.back(), c, h);
        if (s.v > 0) break;  // numerical turnaround: switch to the tail
        tab.push_back(s);
    }
    const double x_tail = (tab.size() - 1) * h, q_tail = tab.back().q;
    auto value = [&](double r) {
        r = std::abs(r);
        if (r >= x_tail) return q_tail * std::exp(-rc * (r - x_tail));
        const std::size_t k = std::size_t(r / h);
        const double t = r / h - double(k);
        const auto& a = tab[k];
        const auto& b = tab[k + 1];
        // cubic Hermite with slopes from the ODE state
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * a.q + h10 * h * a.v + h01 * b.q + h11 * h * b.v;
    };
    rfield out(std::size_t(g.n), 0.0);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i) - center;
        if (g.periodic) {
            for (int m = -2; m <= 2; ++m) out[i] += value(x + m * g.length);
        } else {
            out[i] = value(x);
        }
    }
    return out;
}

CurveMotion curve_motion(const cfield& p0, int eps, const Grid1D& g, double lambda, double mu,
                         const Evolve1DOptions& opt) {
    const Rep rep = eps < 0 ? Rep::R4 : Rep::R22;
    Evolve1DOptions o = opt;
    o.keep_snapshots = true;
    const auto run = nls_evolve(p0, eps, g, o);
    CurveMotion cm;
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        cm.t.push_back(run.series[k].t);
        cm.frames.push_back(curve_from_reduction(run.snapshots[k], g, lambda, mu, rep));
        cm.max_constraint_defect = std::max(cm.max_constraint_defect, cm.frames.back().constraint_defect);
    }
    return cm;
}

}  // namespace w4d
