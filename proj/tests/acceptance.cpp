// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "w4d/deformation.hpp"
#include "w4d/geometry.hpp"
#include "w4d/reduction1d.hpp"
#include "w4d/scenario.hpp"

using namespace w4d;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "w4d_acceptance";
int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("AC%-2d %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

RunResult run(const char* patch, Command cmd) {
    json c = default_config();
    c.merge_patch(json::parse(patch));
    return run_scenario(c, cmd, kOut.string());
}

const CheckResult* find(const RunResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

double seconds(const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void guarded(int id, const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

// ---- 1: Willmore of N-solitons against 16 pi N ----
void ac1() {
    RunResult r1, r2;
    const char* off = R"("analysis":{"conformality":false,"closedness":false})";
    const double t1 = seconds([&] {
        r1 = run((std::string(R"({"name":"ac1_n1","family":"soliton","grid":{"half":40,"n":512},
                     "params":{"lambda":[0.5],"mu":[0.0],"nu":[1.0],"eps":-1},"checks":{"willmore_rtol":0.01},)") +
                  off + "}").c_str(),
                 Command::generate);
    });
    r2 = run((std::string(R"({"name":"ac1_n2","family":"soliton","grid":{"half":40,"n":512},
                 "params":{"lambda":[0.5,0.8],"mu":[0.0,3.0],"nu":[1.0,1.0],"eps":-1},"checks":{"willmore_rtol":0.02},)") +
              off + "}").c_str(),
             Command::generate);
    const double W1 = r1.report["results"]["W"], W2 = r2.report["results"]["W"];
    const double e1 = std::abs(W1 - 16 * PI) / (16 * PI), e2 = std::abs(W2 - 32 * PI) / (32 * PI);
    report(1, e1 < 0.01 && e2 < 0.02 && t1 < 30,
           fmt("N=1 W=%.6f (16pi: rel %.3g, W/4pi=%.6f), %.1fs", W1, e1, W1 / (4 * PI), t1) +
               fmt("; N=2 W=%.6f (32pi: rel %.3g, W/8pi=%.6f)", W2, e2, W2 / (8 * PI)));
}

// ---- 2: log-det |p|^2 against the closed one-soliton formula ----
void ac2() {
    const auto r = run(R"({"name":"ac2","family":"soliton","grid":{"half":20,"n":256},
                           "params":{"lambda":[0.5],"mu":[0.0],"nu":[1.0],"eps":-1},
                           "analysis":{"curvatures":false,"numeric":false,"conformality":false,"closedness":false},
                           "checks":{"willmore_rtol":-1,"dual_formula":1e-4}})",
                       Command::analyze);
    const auto* c = find(r, "dual_formula_logdet_vs_closed");
    report(2, c && c->pass, fmt("max |p|^2 gap / peak = %.3g (< 1e-4)", c ? c->value : NAN));
}

// ---- 3: conformality and two-contour closedness of every analytic surface ----
void ac3() {
    const char* cases[] = {
        R"({"name":"ac3_min_r4","family":"minimal","representation":"R4","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_min_r22","family":"minimal","representation":"R22","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_min_r31","family":"minimal","representation":"R31","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_min_r3","family":"minimal","representation":"R3","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_min_r21","family":"minimal","representation":"R21","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_min_r31t","family":"minimal","representation":"R31T","grid":{"half":1.5,"n":64}})",
        R"({"name":"ac3_superminimal","family":"minimal","grid":{"half":1.5,"n":64},
            "params":{"superminimal":[[0.5,0.5],2.0]}})",
        R"({"name":"ac3_soliton_n1","family":"soliton","grid":{"half":20,"n":256},
            "params":{"lambda":[0.5],"mu":[0.0],"nu":[1.0],"eps":-1},"checks":{"willmore_rtol":-1}})",
        R"({"name":"ac3_soliton_n2","family":"soliton","grid":{"half":20,"n":256},
            "params":{"lambda":[0.5,0.8],"mu":[0.0,3.0],"nu":[1.0,1.0],"eps":-1},"checks":{"willmore_rtol":-1}})",
        R"({"name":"ac3_constant_h2","family":"constant_h2","grid":{"half":2,"n":128}})",
        R"({"name":"ac3_timelike_p","family":"constant_p_timelike","grid":{"half":1,"n":64}})",
    };
    double conf = 0, clos = 0;
    bool ok = true;
    std::string worst;
    for (const char* cfg : cases) {
        json patch = json::parse(cfg);
        patch["analysis"] = {{"curvatures", false}, {"numeric", false}};
        const auto r = run(patch.dump().c_str(), Command::generate);
        const auto *a = find(r, "conformality"), *b = find(r, "two_contour_closedness");
        if (!a || !b) {
            ok = false;
            continue;
        }
        if (!(a->pass && b->pass)) ok = false, worst += " " + patch["name"].get<std::string>();
        conf = std::max(conf, a->value), clos = std::max(clos, b->value);
    }
    report(3, ok, fmt("%.0f surfaces: max |g_zz|/g_zzb = %.3g, max two-contour gap / diameter = %.3g", double(std::size(cases)),
                      conf, clos) + (worst.empty() ? "" : ";" + worst));
}

// ---- 4: closed vs numeric geometry, refinement order ----
void ac4() {
    SolitonParams sp;
    sp.lambda = {0.5}, sp.mu = {cplx(0.3, 0.1)}, sp.nu = {0.8};
    const int ns[3] = {129, 257, 513};
    double eF[3], eH[3];
    for (int l = 0; l < 3; ++l) {
        const Grid g = Grid::box(6.0, ns[l]);
        const auto r = soliton_fields(sp, g);
        ImmerseOptions io;
        io.i0 = io.j0 = g.nx / 2;
        const auto patch = immerse(r.sq, {r.p, {}}, io);
        const auto geo = curvatures(r.sq, {r.p, {}});
        const auto ng = geometry_numeric(patch);
        const auto mc = metric_closed(r.sq);
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
    const double oF1 = std::log2(eF[0] / eF[1]), oF2 = std::log2(eF[1] / eF[2]);
    const double oH1 = std::log2(eH[0] / eH[1]), oH2 = std::log2(eH[1] / eH[2]);
    report(4, std::min({oF1, oF2, oH1, oH2}) >= 1.8,
           fmt("metric orders %.2f, %.2f; H2 orders %.2f, %.2f", oF1, oF2, oH1, oH2) +
               fmt(" (finest rel gaps %.2g, %.2g)", eF[2], eH[2]));
}

// ---- 5: Willmore invariance under the DS-II flow ----
double drift(const std::vector<SeriesRow>& s, bool w) {
    double d = 0;
    const double ref = w ? s.front().W : s.front().C1;
    for (const auto& r : s) d = std::max(d, std::abs((w ? r.W : r.C1) - ref) / std::abs(ref));
    return d;
}
// 32^2: the stability rule ties dt to h^2, and on finer grids the drift sits at roundoff
// where no rate can be measured.
void ac5() {
    const Grid g = Grid::box(PI, 32, true);
    const auto p0 = sample(g, [](cplx z) {
        const double x = z.real(), y = z.imag();
        return 0.3 * (std::exp(I * (2 * x)) * std::cos(y) + 0.5 * std::exp(-I * (y - x)) + 0.3 * std::sin(3 * y));
    });
    const auto s0 = make_state(g, p0, -1);
    EvolveOptions eo;
    eo.T = 0.1;
    eo.track_spinors = false;
    eo.dt = stable_dt(g);
    const auto r1 = evolve_and_track(s0, eo);
    eo.dt = r1.dt / 2;
    const auto r2 = evolve_and_track(s0, eo);
    const double dW = drift(r1.series, true), dC = drift(r1.series, false), dW2 = drift(r2.series, true);
    const double order = std::log2(dW / dW2);
    report(5, dW < 1e-6 && dC < 1e-6 && order >= 3.5,
           fmt("dt=%.3g: W drift %.3g, C1 drift %.3g; dt/2: W drift %.3g", r1.dt, dW, dC, dW2) +
               fmt(", rate dt^%.2f (>= 3.5)", order));
}

// ---- 6: evolved soliton against the time-shifted log-det field ----
void ac6() {
    const double L = 8 * PI;
    const Grid g{-L, L, -L, L, 256, 256, true, true};
    SolitonParams sp;
    sp.lambda = {0.5}, sp.mu = {0.0}, sp.nu = {1.0};
    const auto p0 = sample(g, [&](cplx z) { return soliton_p_at(sp, z); });
    EvolveOptions eo;
    eo.T = 0.05;
    eo.dt = 0.0025;
    eo.track_spinors = false;
    const auto r = evolve_and_track(make_state(g, p0, -1), eo);
    auto st = sp;
    st.t2 = r.final_state.t;
    double err = 0, peak = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double ex = soliton_p2_jacobi(st, g.z(i, j));
            peak = std::max(peak, ex);
            err = std::max(err, std::abs(std::norm(r.final_state.p[g.idx(i, j)]) - ex));
        }
    report(6, err / peak < 1e-3, fmt("t=%.3g, max | |p|^2 - exact | / peak = %.3g (< 1e-3)", r.final_state.t, err / peak));
}

// ---- 7: curves on the unit sphere, static and NLS-driven ----
void ac7() {
    const Grid1D g{-20, 40, 1024, true};
    cfield p(g.n);
    for (int i = 0; i < g.n; ++i) p[i] = 1.0 / std::cosh(g.x(i)) * std::exp(I * 0.5 * g.x(i));
    const auto c = curve_from_reduction(p, g, 0.5, 0.5, Rep::R4);
    Evolve1DOptions eo;
    eo.T = 1.0;
    eo.sample_every = 25;
    const auto m = curve_motion(p, -1, g, 0.5, 0.5, eo);
    report(7, c.constraint_defect < 1e-8 && m.max_constraint_defect < 1e-6,
           fmt("static defect %.3g (< 1e-8); moving: %.0f frames to t=%.3g, max defect %.3g (< 1e-6)",
               c.constraint_defect, double(m.t.size()), m.t.back(), m.max_constraint_defect));
}

// ---- 8: dromion Willmore ----
void ac8() {
    const auto r = run(R"({"name":"ac8","family":"dromion","grid":{"half":12,"n":256},"params":{"rho":[0.5]},
                           "checks":{"dromion_rtol":0.01}})",
                       Command::generate);
    const double ex = r.report["results"]["W_exact"], q = r.report["results"]["W_quadrature"];
    const auto* c = find(r, "dromion_willmore_rel");
    report(8, c && c->pass && std::abs(ex + 2 * std::log(0.75)) < 1e-12,
           fmt("W exact %.12f, quadrature %.12f, rel %.3g (< 0.01)", ex, q, c ? c->value : NAN));
}

// ---- 9: minimal and superminimal predicates ----
void ac9() {
    const auto a = run(R"({"name":"ac9_minimal","family":"minimal","grid":{"half":1.5,"n":64}})", Command::analyze);
    const auto b = run(R"({"name":"ac9_superminimal","family":"minimal","grid":{"half":1.5,"n":64},
                           "params":{"superminimal":[[0.5,0.5],2.0]}})",
                       Command::analyze);
    const auto *h = find(a, "minimal_max_H"), *s1 = find(b, "superminimal_sufficient"), *s2 = find(b, "superminimal_direct");
    report(9, h && s1 && s2 && h->pass && s1->pass && s2->pass,
           fmt("max|H| = %.3g; superminimal residuals %.3g (sufficient), %.3g (direct); all < 1e-8", h ? h->value : NAN,
               s1 ? s1->value : NAN, s2 ? s2->value : NAN));
}

// ---- 10: conservation of C1 by the 1D evolvers ----
void ac10() {
    const auto n = run(R"({"name":"ac10_nls","family":"reduction",
                           "reduction":{"kind":"nls","x0":-20,"length":40,"n":1024,"T":1.0},
                           "params":{"velocity":0.5},"checks":{"c1_drift_1d":1e-8}})",
                       Command::reduce);
    const auto k = run(R"({"name":"ac10_kdv","family":"reduction",
                           "reduction":{"kind":"kdv","x0":-50,"length":100,"n":1024,"T":1.0},
                           "params":{"c":1.0},"checks":{"c1_drift_1d":1e-8}})",
                       Command::reduce);
    const auto m = run(R"({"name":"ac10_mkdv","family":"reduction",
                           "reduction":{"kind":"mkdv","x0":-50,"length":100,"n":1024,"T":1.0},
                           "checks":{"c1_drift_1d":1e-8}})",
                       Command::reduce);
    const auto *a = find(n, "c1_rel_drift_1d"), *b = find(k, "c1_rel_drift_1d"), *c = find(m, "c1_rel_drift_1d");
    report(10, a && b && c && a->pass && b->pass && c->pass,
           fmt("relative C1 drift over t=1: NLS %.3g, KdV %.3g, mKdV %.3g (< 1e-8)", a ? a->value : NAN,
               b ? b->value : NAN, c ? c->value : NAN));
}

}  // namespace

int main() {
    fs::remove_all(kOut);
    fs::create_directories(kOut);
    const std::function<void()> acs[] = {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10};
    for (int i = 0; i < 10; ++i) guarded(i + 1, acs[i]);
    fs::remove_all(kOut);
    std::printf("%d of 10 criteria pass\n", 10 - failures);
    return failures ? 1 : 0;
}
