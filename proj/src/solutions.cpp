#include "w4d/solutions.hpp"

#include <algorithm>
#include <cmath>

#include "w4d/linalg.hpp"

namespace w4d {

std::string to_string(Rep r) {
    switch (r) {
        case Rep::R4: return "R4";
        case Rep::R22: return "R22";
        case Rep::R31: return "R31";
        case Rep::R3: return "R3";
        case Rep::R21: return "R21";
        case Rep::R31T: return "R31T";
        case Rep::R22T: return "R22T";
    }
    return "?";
}

Rep rep_from_string(const std::string& s) {
    for (Rep r : {Rep::R4, Rep::R22, Rep::R31, Rep::R3, Rep::R21, Rep::R31T, Rep::R22T})
        if (to_string(r) == s) return r;
    throw Error("unknown representation '" + s + "'");
}

Signature signature_of(Rep r) {
    switch (r) {
        case Rep::R4: return Signature::of(Sig::R4);
        case Rep::R22: case Rep::R22T: return Signature::of(Sig::R22);
        case Rep::R31: case Rep::R31T: return Signature::of(Sig::R31);
        case Rep::R3: return Signature::of(Sig::R3);
        case Rep::R21: return Signature::of(Sig::R21);
    }
    throw Error("bad rep");
}

bool is_timelike(Rep r) { return r == Rep::R31T || r == Rep::R22T; }

namespace {

// d/d(first variable) and d/d(second variable): (z, zbar) or (xi, eta)
cfield d_first(const cfield& f, const Grid& g, bool timelike, Exec ex) { return timelike ? dx(f, g, ex) : dz(f, g, ex); }
cfield d_second(const cfield& f, const Grid& g, bool timelike, Exec ex) {
    return timelike ? dy(f, g, ex) : dzbar(f, g, ex);
}

// max_k |a_k - c_k b_k|
template <class C>
double defect(const cfield& a, const cfield& b, C&& coef, const Mask& m) {
    double r = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!m.empty() && m[k]) continue;
        r = std::max(r, std::abs(a[k] - coef(k) * b[k]));
    }
    return r;
}

}  // namespace

double dirac_residual(const SpinorQuad& sq, const Potentials& pot, Exec ex) {
    const Grid& g = sq.grid;
    const bool tl = is_timelike(sq.rep);
    const auto& p = pot.p;
    const auto& q = pot.q;
    if (p.size() != g.size()) throw Error("dirac_residual: p has wrong size");
    auto P = [&](std::size_t k) { return p[k]; };
    auto Pb = [&](std::size_t k) { return std::conj(p[k]); };
    auto Q = [&](std::size_t k) { return q[k]; };
    auto nP = [&](std::size_t k) { return -p[k]; };
    auto nPb = [&](std::size_t k) { return -std::conj(p[k]); };
    const Mask& m = sq.mask;
    double r = 0;
    auto pair = [&](const cfield& psi, const cfield& phi, auto c1, auto c2) {
        r = std::max(r, defect(d_first(psi, g, tl, ex), phi, c1, m));
        r = std::max(r, defect(d_second(phi, g, tl, ex), psi, c2, m));
    };
    switch (sq.rep) {
        case Rep::R4:
            pair(sq.psi1, sq.phi1, P, nPb);
            pair(sq.psi2, sq.phi2, Pb, nP);
            break;
        case Rep::R22:
            pair(sq.psi1, sq.phi1, P, Pb);
            pair(sq.psi2, sq.phi2, Pb, P);
            break;
        case Rep::R31:
            if (q.size() != g.size()) throw Error("dirac_residual: R31 needs q");
            pair(sq.psi1, sq.phi1, P, Q);
            pair(sq.psi2, sq.phi2, P, Q);
            break;
        case Rep::R3: pair(sq.psi1, sq.phi1, P, nP); break;
        case Rep::R21: pair(sq.psi1, sq.phi1, P, P); break;
        case Rep::R31T:
            pair(sq.psi1, sq.phi1, P, Pb);
            pair(sq.psi2, sq.phi2, P, Pb);
            break;
        case Rep::R22T:
            if (q.size() != g.size()) throw Error("dirac_residual: R22T needs q");
            pair(sq.psi1, sq.phi1, P, Q);
            pair(sq.psi2, sq.phi2, P, Q);
            pair(sq.tpsi1, sq.tphi1, Q, P);
            pair(sq.tpsi2, sq.tphi2, Q, P);
            break;
    }
    return r;
}

SpinorQuad minimal_spinors(const Grid& g, const cfield& h1, const cfield& h2, const cfield& a1, const cfield& a2,
                           Rep rep, double tol) {
    if (rep == Rep::R22T) throw Error("minimal_spinors: R22T minimal data needs the tilde pair; build it directly");
    SpinorQuad sq{rep, g, a1, h1, a2, h2, {}, {}, {}, {}, {}};
    for (auto* f : {&sq.psi1, &sq.phi1, &sq.psi2, &sq.phi2}) require_finite(*f, g, "minimal_spinors");
    Potentials zero{cfield(g.size(), 0.0), cfield(g.size(), 0.0)};
    const double res = dirac_residual(sq, zero);
    if (res > tol)
        throw Error("minimal_spinors: input not (anti)holomorphic, residual " + std::to_string(res));
    return sq;
}

// ---------------------------------------------------------------- solitons

void SolitonParams::validate() const {
    const std::size_t n = lambda.size();
    if (n == 0) throw Error("soliton: N must be >= 1");
    if (mu.size() != n || nu.size() != n) throw Error("soliton: lambda/mu/nu length mismatch");
    if (eps != 1 && eps != -1) throw Error("soliton: eps must be +-1");
    if (spectral != 0.0) throw Error("soliton: only the k = 0 eigenfunction is bounded; spectral must be 0");
    for (std::size_t a = 0; a < n; ++a) {
        if (lambda[a] == 0.0) throw Error("soliton: lambda must be nonzero");
        for (std::size_t b = a + 1; b < n; ++b)
            if (std::abs(lambda[a] - lambda[b]) < 1e-12) throw Error("soliton: lambda values must be distinct");
    }
}

SolitonParams SolitonParams::at_time() const {
    SolitonParams s = *this;
    for (std::size_t n = 0; n < N(); ++n) {
        const cplx l = lambda[n];
        s.mu[n] = mu[n] + 2.0 * I * l * t2;
        s.nu[n] = nu[n] * std::exp(-I * t2 * (l * l + std::conj(l) * std::conj(l)));
    }
    s.t2 = 0;
    return s;
}

SolitonParams SolitonParams::tilde() const {
    SolitonParams s = *this;
    for (std::size_t n = 0; n < N(); ++n) {
        s.lambda[n] = -lambda[n];
        s.nu[n] = std::conj(nu[n]);
    }
    return s;
}

namespace {

// Cauchy-scaled 2N x 2N matrix; time shift already applied to sp.
std::vector<cplx> soliton_matrix(const SolitonParams& sp, cplx z) {
    const int N = int(sp.N());
    const int M = 2 * N;
    std::vector<cplx> D(std::size_t(M) * M, 0.0);
    const cplx zb = std::conj(z);
    for (int n = 0; n < N; ++n) {
        const cplx l = sp.lambda[n], lb = std::conj(l);
        for (int j = 0; j < N; ++j) {
            if (n == j) {
                D[n * M + n] = z + sp.mu[n];
                D[(N + n) * M + N + n] = zb + std::conj(sp.mu[n]);
            } else {
                D[n * M + j] = 1.0 / (l - sp.lambda[j]);
                D[(N + n) * M + N + j] = 1.0 / (lb - std::conj(sp.lambda[j]));
            }
        }
        D[n * M + N + n] = sp.nu[n] * std::exp(lb * zb - l * z);
        D[(N + n) * M + n] = double(sp.eps) * std::conj(sp.nu[n]) * std::exp(l * z - lb * zb);
    }
    return D;
}

struct PointSol {
    cplx p, psi, phi;
    bool ok;
};

PointSol soliton_point(const SolitonParams& s, cplx z) {
    const int N = int(s.N());
    DenseLU lu(soliton_matrix(s, z), 2 * N);
    if (lu.singular() || lu.pivot_ratio() > 1e13) return {0, 0, 0, false};
    std::vector<cplx> b(2 * N, 0.0);
    for (int n = 0; n < N; ++n) b[n] = 1.0;
    auto x = lu.solve(b);
    cplx p = 0;
    for (int n = 0; n < N; ++n) p += x[N + n];
    p *= -double(s.eps);
    for (int n = 0; n < N; ++n) b[n] = -1.0 / s.lambda[n];
    x = lu.solve(b);
    cplx a = 1.0, c = 0.0;
    for (int n = 0; n < N; ++n) a += x[n], c += x[N + n];
    return {p, std::conj(a), std::conj(c), true};
}

}  // namespace

cplx soliton1_p(const SolitonParams& sp, cplx z) {
    if (sp.N() != 1) throw Error("soliton1_p: N must be 1");
    const cplx l = sp.lambda[0];
    const double t = sp.t2;
    const cplx ph = std::exp(l * z - std::conj(l) * std::conj(z) + I * (l * l + std::conj(l * l)) * t);
    const double den = std::norm(z + 2.0 * I * l * t + sp.mu[0]) - sp.eps * std::norm(sp.nu[0]);
    return std::conj(sp.nu[0]) * ph / den;
}

cplx soliton_p_at(const SolitonParams& sp, cplx z) { return soliton_point(sp.at_time(), z).p; }

double soliton_logdet_at(const SolitonParams& sp, cplx z) {
    const auto s = sp.at_time();
    DenseLU lu(soliton_matrix(s, z), 2 * int(s.N()));
    return lu.log_abs_det();
}

double soliton_p2_jacobi(const SolitonParams& sp0, cplx z) {
    const auto sp = sp0.at_time();
    const int N = int(sp.N()), M = 2 * N;
    const auto D = soliton_matrix(sp, z);
    std::vector<cplx> Dz(D.size(), 0.0), Dzb(D.size(), 0.0), Dzzb(D.size(), 0.0);
    for (int n = 0; n < N; ++n) {
        const cplx l = sp.lambda[n], lb = std::conj(l);
        Dz[n * M + n] = 1.0;
        Dzb[(N + n) * M + N + n] = 1.0;
        const cplx up = D[n * M + N + n], lo = D[(N + n) * M + n];
        Dz[n * M + N + n] = -l * up;
        Dzb[n * M + N + n] = lb * up;
        Dzzb[n * M + N + n] = -l * lb * up;
        Dz[(N + n) * M + n] = l * lo;
        Dzb[(N + n) * M + n] = -lb * lo;
        Dzzb[(N + n) * M + n] = -l * lb * lo;
    }
    DenseLU lu(D, M);
    // columns of D^-1 X
    auto solve_mat = [&](const std::vector<cplx>& X) {
        std::vector<cplx> R(X.size());
        std::vector<cplx> col(M);
        for (int c = 0; c < M; ++c) {
            for (int r = 0; r < M; ++r) col[r] = X[r * M + c];
            auto s = lu.solve(col);
            for (int r = 0; r < M; ++r) R[r * M + c] = s[r];
        }
        return R;
    };
    const auto A = solve_mat(Dz), B = solve_mat(Dzb), C = solve_mat(Dzzb);
    cplx tr = 0;
    for (int i = 0; i < M; ++i) {
        tr += C[i * M + i];
        for (int k = 0; k < M; ++k) tr -= A[i * M + k] * B[k * M + i];
    }
    return -double(sp.eps) * tr.real();
}

SolitonResult soliton_fields(const SolitonParams& sp, const Grid& g, Exec ex) {
    sp.validate();
    g.validate();
    const auto s1 = sp.at_time();
    const auto s2 = sp.tilde().at_time();
    // tilde parameters are applied after the time shift
    SolitonParams s2t = s1;
    for (std::size_t n = 0; n < sp.N(); ++n) {
        s2t.lambda[n] = -s1.lambda[n];
        s2t.nu[n] = std::conj(s1.nu[n]);
    }
    (void)s2;
    SolitonResult out;
    const std::size_t n = g.size();
    out.p.assign(n, 0.0);
    SpinorQuad& sq = out.sq;
    sq.rep = sp.eps < 0 ? Rep::R4 : Rep::R22;
    sq.grid = g;
    sq.psi1.assign(n, 0.0), sq.phi1.assign(n, 0.0), sq.psi2.assign(n, 0.0), sq.phi2.assign(n, 0.0);
    sq.mask.assign(n, 0);
    std::vector<double> tgap(g.ny, 0.0), cgap(g.ny, 0.0);
    auto row = [&](int j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.idx(i, j);
            const cplx z = g.z(i, j);
            const auto a = soliton_point(s1, z);
            const auto b = soliton_point(s2t, z);
            if (!a.ok || !b.ok) {
                sq.mask[k] = 1;
                continue;
            }
            out.p[k] = a.p;
            sq.psi1[k] = a.psi, sq.phi1[k] = a.phi;
            sq.psi2[k] = b.psi, sq.phi2[k] = b.phi;
            tgap[j] = std::max(tgap[j], std::abs(b.p - std::conj(a.p)));
            if (sp.N() == 1) cgap[j] = std::max(cgap[j], std::abs(soliton1_p(sp, z) - a.p));
        }
    };
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < g.ny; ++j) row(j);
    } else {
        for (int j = 0; j < g.ny; ++j) row(j);
    }
    out.masked = count_masked(sq.mask);
    out.tilde_gap = *std::max_element(tgap.begin(), tgap.end());
    out.closed_gap = *std::max_element(cgap.begin(), cgap.end());
    if (out.tilde_gap > 1e-8 * std::max(1.0, max_abs(out.p)))
        throw Error("soliton: second-pair parameters violate p_tilde = conj(p)");
    if (sp.N() == 1) {
        // closed form is authoritative for N = 1
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (!sq.mask[g.idx(i, j)]) out.p[g.idx(i, j)] = soliton1_p(sp, g.z(i, j));
    }
    if (out.masked == 0) sq.mask.clear();
    return out;
}

LogDetResult soliton_p2_logdet(const SolitonParams& sp, const Grid& g, int order, Exec ex) {
    sp.validate();
    g.validate();
    const auto s = sp.at_time();
    rfield ld(g.size(), 0.0);
    Mask m(g.size(), 0);
    const int M = 2 * int(s.N());
    auto row = [&](int j) {
        for (int i = 0; i < g.nx; ++i) {
            DenseLU lu(soliton_matrix(s, g.z(i, j)), M);
            const std::size_t k = g.idx(i, j);
            if (lu.singular() || !std::isfinite(lu.log_abs_det())) m[k] = 1;
            else ld[k] = lu.log_abs_det();
        }
    };
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < g.ny; ++j) row(j);
    } else {
        for (int j = 0; j < g.ny; ++j) row(j);
    }
    LogDetResult out;
    out.p2 = dzdzbar(ld, g, order, ex);
    for (auto& v : out.p2) v *= -double(s.eps);
    // a masked point poisons its stencil neighbourhood
    const int w = order / 2;
    out.mask.assign(g.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (m[g.idx(i, j)])
                for (int dj = -w; dj <= w; ++dj)
                    for (int di = -w; di <= w; ++di) {
                        const int ii = i + di, jj = j + dj;
                        if (ii >= 0 && jj >= 0 && ii < g.nx && jj < g.ny) out.mask[g.idx(ii, jj)] = 1;
                    }
    out.masked = count_masked(out.mask);
    return out;
}

// ---------------------------------------------------------------- dromions

cplx Profile::value(double s, double t) const {
    const double x = (s - center) / width;
    if (kind == ProfileKind::gaussian) {
        if (t != 0.0) throw Error("gaussian dromion profile is only defined at t2 = 0");
        return std::exp(-x * x);
    }
    const double k = 1.0 / width;
    return std::exp(I * k * k * t) / std::cosh(x);
}

void DromionParams::validate() const {
    if (M < 1 || L < 1) throw Error("dromion: M, L must be >= 1");
    if (rho.size() != std::size_t(M) * L) throw Error("dromion: rho must be M x L");
    if (int(X.size()) != M || int(Y.size()) != L) throw Error("dromion: need M X-profiles and L Y-profiles");
    if (eps != 1 && eps != -1) throw Error("dromion: eps must be +-1");
    for (auto v : rho)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("dromion: rho not finite");
}

namespace {

// cumulative Gram matrices G(s)_{ij} = int_{-inf}^s f_i conj(f_j) along one axis
std::vector<std::vector<cplx>> cumulative_gram(const std::vector<Profile>& fs, double s0, double h, int n, double t,
                                               std::vector<cplx>* whiten) {
    const int m = int(fs.size());
    std::vector<std::vector<cplx>> vals(m, std::vector<cplx>(n));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) vals[a][i] = fs[a].value(s0 + i * h, t);
    for (int a = 0; a < m; ++a)
        if (std::abs(vals[a][0]) > 1e-8 || std::abs(vals[a][n - 1]) > 1e-8)
            throw Error("dromion: profile does not decay below 1e-8 at the grid edge");
    std::vector<std::vector<cplx>> G(n, std::vector<cplx>(m * m, 0.0));
    for (int i = 1; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                G[i][a * m + b] = G[i - 1][a * m + b] + 0.5 * h *
                                                            (vals[a][i - 1] * std::conj(vals[b][i - 1]) +
                                                             vals[a][i] * std::conj(vals[b][i]));
    if (whiten) {
        // Cholesky of the total Gram, W = L^{-1}, G -> W G W^dagger
        const auto& T = G[n - 1];
        std::vector<cplx> Lc(m * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) {
                cplx s = T[i * m + j];
                for (int k = 0; k < j; ++k) s -= Lc[i * m + k] * std::conj(Lc[j * m + k]);
                if (i == j) {
                    if (s.real() <= 0) throw Error("dromion: profiles are linearly dependent");
                    Lc[i * m + i] = std::sqrt(s.real());
                } else {
                    Lc[i * m + j] = s / Lc[j * m + j];
                }
            }
        std::vector<cplx> W(m * m, 0.0);
        for (int c = 0; c < m; ++c) {
            for (int i = 0; i < m; ++i) {
                cplx s = (i == c) ? 1.0 : 0.0;
                for (int k = 0; k < i; ++k) s -= Lc[i * m + k] * W[k * m + c];
                W[i * m + c] = s / Lc[i * m + i];
            }
        }
        for (auto& Gi : G) {
            std::vector<cplx> tmp(m * m, 0.0), out(m * m, 0.0);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int k = 0; k < m; ++k) tmp[i * m + j] += W[i * m + k] * Gi[k * m + j];
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int k = 0; k < m; ++k) out[i * m + j] += tmp[i * m + k] * std::conj(W[j * m + k]);
            Gi = out;
        }
        *whiten = W;
    }
    return G;
}

}  // namespace

DromionResult dromion_p2(const DromionParams& dp, const Grid& g) {
    dp.validate();
    g.validate();
    if (g.periodic_x || g.periodic_y) throw Error("dromion: grid must be non-periodic");
    const int M = dp.M, L = dp.L;
    std::vector<cplx> wx, wy;
    const auto alpha = cumulative_gram(dp.X, g.x_min, g.hx(), g.nx, dp.t2, dp.orthonormalize ? &wx : nullptr);
    const auto beta = cumulative_gram(dp.Y, g.y_min, g.hy(), g.ny, dp.t2, dp.orthonormalize ? &wy : nullptr);
    DromionResult out;
    out.logdet.assign(g.size(), 0.0);
    const double e = dp.eps;
    for (int j = 0; j < g.ny; ++j) {
        // B = rho beta rho^dagger (M x M), independent of xi
        std::vector<cplx> B(M * M, 0.0);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
                for (int k = 0; k < L; ++k)
                    for (int l = 0; l < L; ++l)
                        B[a * M + b] += dp.rho[a * L + k] * beta[j][k * L + l] * std::conj(dp.rho[b * L + l]);
        for (int i = 0; i < g.nx; ++i) {
            std::vector<cplx> T(M * M, 0.0);
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) {
                    cplx s = 0;
                    for (int k = 0; k < M; ++k) s += B[a * M + k] * std::conj(alpha[i][k * M + b]);
                    T[a * M + b] = (a == b ? 1.0 : 0.0) - e * s;
                }
            DenseLU lu(T, M);
            if (lu.singular()) throw Error("dromion: 1 - eps A is singular");
            out.logdet[g.idx(i, j)] = lu.log_abs_det();
        }
    }
    out.p2 = dxy(out.logdet, g);
    for (auto& v : out.p2) v = -v;
    const auto qr = quad_area(out.p2, g);
    out.integral = qr.value.real();
    out.coverage = qr.coverage;
    return out;
}

double dromion_integral_exact(const DromionParams& dp) {
    dp.validate();
    const int M = dp.M, L = dp.L;
    std::vector<cplx> T(M * M, 0.0);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            cplx s = 0;
            for (int k = 0; k < L; ++k) s += dp.rho[a * L + k] * std::conj(dp.rho[b * L + k]);
            T[a * M + b] = (a == b ? 1.0 : 0.0) - double(dp.eps) * s;
        }
    DenseLU lu(T, M);
    if (lu.singular()) throw Error("dromion: 1 - eps rho rho^dagger is singular");
    const cplx d = lu.det();
    if (d.real() <= 0) throw Error("dromion: det(1 - eps rho rho^dagger) <= 0, log undefined");
    return -double(dp.eps) * std::log(d.real());
}

double willmore_dromion(const DromionParams& dp) {
    if (dp.eps != 1) throw Error("willmore_dromion: the timelike R31 formula is for eps = 1");
    return 2.0 * dromion_integral_exact(dp);
}

// ---------------------------------------------------------------- constants

SpinorQuad constant_p_timelike(const Grid& g, cplx p0, double a) {
    if (a == 0.0) throw Error("constant_p_timelike: a must be nonzero");
    if (p0 == 0.0) throw Error("constant_p_timelike: p0 = 0, use minimal_spinors");
    const double b = std::norm(p0) / a;
    SpinorQuad sq;
    sq.rep = Rep::R31T;
    sq.grid = g;
    const std::size_t n = g.size();
    sq.psi1.resize(n), sq.phi1.resize(n);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const cplx e = std::exp(a * g.x(i) + b * g.y(j));
            sq.psi1[g.idx(i, j)] = e;
            sq.phi1[g.idx(i, j)] = (a / p0) * e;
        }
    // second pair: a different rate keeps the metric nondegenerate
    const double a2 = -a;
    const double b2 = std::norm(p0) / a2;
    sq.psi2.resize(n), sq.phi2.resize(n);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const cplx e = std::exp(a2 * g.x(i) + b2 * g.y(j));
            sq.psi2[g.idx(i, j)] = e;
            sq.phi2[g.idx(i, j)] = (a2 / p0) * e;
        }
    return sq;
}

ConstantH2Data constant_h2_r4(const Grid& g, cplx p0, cplx k1, cplx k2, cplx A1, cplx A2) {
    if (std::abs(std::abs(k1) - std::abs(p0)) > 1e-12 || std::abs(std::abs(k2) - std::abs(p0)) > 1e-12)
        throw Error("constant_h2_r4: need |k1| = |k2| = |p0|");
    if (p0 == 0.0) throw Error("constant_h2_r4: p0 must be nonzero");
    ConstantH2Data d;
    d.sq.rep = Rep::R4;
    d.sq.grid = g;
    const std::size_t n = g.size();
    d.pot.p.assign(n, p0);
    d.sq.psi1.resize(n), d.sq.phi1.resize(n), d.sq.psi2.resize(n), d.sq.phi2.resize(n);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const cplx z = g.z(i, j), zb = std::conj(z);
            const std::size_t k = g.idx(i, j);
            const cplx e1 = A1 * std::exp(k1 * z - std::conj(k1) * zb);
            const cplx e2 = A2 * std::exp(k2 * z - std::conj(k2) * zb);
            d.sq.psi1[k] = e1, d.sq.phi1[k] = k1 * e1 / p0;
            d.sq.psi2[k] = e2, d.sq.phi2[k] = k2 * e2 / std::conj(p0);
        }
    return d;
}

}  // namespace w4d
