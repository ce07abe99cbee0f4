// DS-II t2 flow of the potential and of the R4 / R22 spinor pairs.
#pragma once

#include <optional>

#include "w4d/immersion.hpp"
#include "w4d/spectral.hpp"

namespace w4d {

// u, w1, w2 in the zero-mean gauge:
//   w1_z = -2 eps |p|^2_zbar,  w2_zbar = -2 eps |p|^2_z,  u = w1 + w2
struct Auxiliary {
    cfield u, w1, w2;
};
Auxiliary solve_auxiliary(const cfield& p, int eps, const Spectral2D& sp);
Auxiliary solve_auxiliary(const cfield& p, int eps, const Grid& g);

struct DS2State {
    Grid grid;
    cfield p;
    int eps = -1;          // -1: R4, +1: R22
    double t = 0;
    std::optional<SpinorQuad> sq;  // evolved alongside p when present
    Auxiliary aux;
};

DS2State make_state(const Grid& g, cfield p, int eps, std::optional<SpinorQuad> sq = std::nullopt);

// explicit RK4 stability bound for the spectral operator, times `safety`
double stable_dt(const Grid& g, double safety = 0.5);

struct StepOptions {
    double blowup = 1e3;   // abort when max|p| exceeds blowup * max(1, max|p(0)|)
    double p_scale = 0;    // reference amplitude (0: taken from the state)
};

// p_t = i (p_zz + p_zbzb + u p); spinors per the paired t2 flows
DS2State ds2_step(const DS2State& s, double dt, const Spectral2D& sp, const StepOptions& opt = {});

struct SeriesRow {
    double t, W, C1, dirac_residual, conformality_defect;  // NaN when no spinors are carried
};
struct EvolveOptions {
    double T = 0.1, dt = 0;   // dt <= 0: stable_dt
    int sample_every = 1;
    bool keep_snapshots = false;
    bool track_spinors = true;  // residual / conformality columns
    StepOptions step;
};
struct EvolveResult {
    std::vector<SeriesRow> series;
    std::vector<DS2State> snapshots;
    DS2State final_state;
    int steps = 0;
    double dt = 0;
};
EvolveResult evolve_and_track(const DS2State& s0, const EvolveOptions& opt);

// C1 = int |p|^2 and W = -4 eps C1 (R4: 4 int |p|^2, R22: -4 int |p|^2)
double ds2_c1(const cfield& p, const Grid& g);
double ds2_willmore(const cfield& p, int eps, const Grid& g);

// Time derivative of the R4 spinors under the t2 flow (finite-difference derivatives).
SpinorQuad spinor_velocity(const SpinorQuad& sq, const cfield& p, const Auxiliary& aux, int eps);

// Coordinate velocity.  `flow` integrates the time derivative of the
// Weierstrass 1-form; `formula` is the closed local expression plus the two
// contour integrals.  Both are gauged to vanish at the basepoint.
struct VelocityResult {
    Vec4 flow, formula;
    rfield a, b;       // normal parts
    cfield c;          // tangential part: V = a N1 + b N2 + c X_z + conj(c) X_zb
    Mask mask;
    double formula_gap = 0;         // max |formula - flow| / max |flow|
    double reconstruction_gap = 0;  // max |a N1 + b N2 + c Xz + cc - flow| / max |flow|
};
VelocityResult coordinate_velocity(const SpinorQuad& sq, const cfield& p, const Auxiliary& aux,
                                   const ImmerseOptions& opt = {});

}  // namespace w4d
