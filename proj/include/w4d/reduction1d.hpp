// One-dimensional reductions: AKNS spectral problem, curves on spheres /
// hyperboloids, surfaces of "revolution", and the NLS / KdV / mKdV evolvers.
#pragma once

#include "w4d/immersion.hpp"

namespace w4d {

struct Grid1D {
    double x0 = 0, length = 1;
    int n = 64;
    bool periodic = true;
    double h() const { return periodic ? length / n : length / (n - 1); }
    double x(int i) const { return x0 + i * h(); }
    void validate() const;
};

// chi_x = i lambda chi + 2 p chit,  chit_x = -i lambda chit + 2 q chi
struct AknsProblem {
    Grid1D grid;
    cfield p, q;
    cplx lambda = 0.0;
};

// Row-major 2x2 fundamental matrix at every sample, identity at x = grid.x0.
struct Fundamental {
    std::vector<std::array<cplx, 4>> phi;
    double det_drift = 0;   // max |det - 1| seen before renormalization
    bool renormalized = true;
};
Fundamental akns_solve(const AknsProblem& prob, bool renormalize = true);
// exp(x M) for constant p, q (closed form)
std::array<cplx, 4> akns_constant(cplx p, cplx q, cplx lambda, double x);

enum class ReductionKind { nls, mkdv, kdv };
// q for a reduction: nls -> eps conj(p), mkdv -> p; kdv fixes p = -1 (q is the field)
cfield reduced_q(const cfield& p, ReductionKind kind, int eps = -1);

// Real-lambda branch: X = Y(x) exp[(lambda+mu) y].
//   R4:  pair 1 (p, -conj p), pair 2 (conj p, -p)
//   R22: pair 1 (p,  conj p), pair 2 (conj p,  p)
//   R31: p, q real; both pairs are the columns of one fundamental matrix (mu = lambda)
struct CurveOnS3 {
    Grid1D grid;
    Signature sig;
    std::array<rfield, 4> Y;
    double radius2 = 0;          // 1/(lambda+mu)^2
    // max | Y.Y - radius2 | / max(radius2, |Y|^2_euclid): on the sphere this is
    // the absolute defect over radius2; hyperboloid curves can run far out
    double constraint_defect = 0;
    double imag_defect = 0;        // imaginary part dropped from Y
    double speed_defect = 0;       // max | Y'.Y' - F(x,0) | / max(1, |Y'|^2_euclid)  (metric pullback)
    rfield speed2;                 // Y'.Y'
    double det_drift = 0;
};
CurveOnS3 curve_from_reduction(const cfield& p, const Grid1D& g, double lambda, double mu, Rep rep,
                               const cfield* q = nullptr);
// 2D immersion of the same separable data, compared with Y e^{(lambda+mu) y}
// (up to the translation fixed by the basepoint).  Returns the max deviation.
double cone_immersion_gap(const cfield& p, const Grid1D& g, double lambda, double mu, Rep rep, double y_max, int ny);

// Imaginary-lambda branch (lambda = i omega1, mu = i omega2), R4 only.
struct RevolutionData {
    SurfacePatch patch;
    rfield A;                  // (|chi1|^2+|chit1|^2)(|chi2|^2+|chit2|^2)
    double metric_y_variation = 0;  // max over x of spread of F in y, relative
    double metric_A_gap = 0;        // max |F - A| / max A
};
RevolutionData surface_of_revolution(const cfield& p, const Grid1D& g, double omega1, double omega2, double y_max,
                                     int ny);

// ---- evolvers (periodic, pseudo-spectral, classical RK4) ----
struct Evolve1DOptions {
    double T = 1.0, dt = 0;  // dt <= 0: stable_dt_1d
    int sample_every = 1;
    double blowup = 1e3;
    bool keep_snapshots = false;
};
struct Series1DRow {
    double t;
    double C1;      // int q p dx
    double mass;    // int |p|^2 (nls), int q (kdv), int p (mkdv)
    double energy;  // int q^2 (kdv), int p^2 (mkdv), int |p_x|^2 + eps |p|^4 (nls)
};
struct Evolve1DResult {
    cfield field;
    std::vector<Series1DRow> series;
    std::vector<cfield> snapshots;
    double dt = 0;
    int steps = 0;
};
// i p_t = p_xx - 2 eps |p|^2 p
Evolve1DResult nls_evolve(const cfield& p, int eps, const Grid1D& g, const Evolve1DOptions& opt);
// q_t = -q_xxx - 6 q q_x
Evolve1DResult kdv_evolve(const rfield& q, const Grid1D& g, const Evolve1DOptions& opt);
// p_t = p_xxx - 6 p^2 p_x
Evolve1DResult mkdv_evolve(const rfield& p, const Grid1D& g, const Evolve1DOptions& opt);
// RK4 stability bound: order 2 (nls) or 3 (kdv/mkdv), scaled by `safety`
double stable_dt_1d(const Grid1D& g, int order, double amplitude, double safety = 0.5);

// Traveling wave q(x - c t) of the KdV flow by shooting on q'' = c q - 3 q^2.
double kdv_shooting_amplitude(double c);
rfield kdv_soliton_profile(const Grid1D& g, double c, double center);

// NLS-driven motion of the curve: each frame re-solves the AKNS problem.
struct CurveMotion {
    std::vector<double> t;
    std::vector<CurveOnS3> frames;
    double max_constraint_defect = 0;
};
CurveMotion curve_motion(const cfield& p0, int eps, const Grid1D& g, double lambda, double mu,
                         const Evolve1DOptions& opt);

}  // namespace w4d
