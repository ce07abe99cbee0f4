// Integration of the closed Weierstrass 1-forms into coordinates X^1..X^4.
#pragma once

#include <utility>
#include <vector>

#include "w4d/solutions.hpp"

namespace w4d {

// Differential of X along the grid axes.  Spacelike: dz/dzbar parts are kept
// too (zpart, zbpart), built independently from the representation formulas.
struct OneForm {
    Grid grid;
    Rep rep = Rep::R4;
    CVec4 fx, fy;           // dX/dx, dX/dy (or dX/dxi, dX/deta)
    CVec4 zpart, zbpart;    // spacelike only
};

OneForm weierstrass_form(const SpinorQuad& sq);

enum class Quadrature { trapezoid, corrected };  // corrected = trapezoid + h^2/12 endpoint slope term
enum class PathOrder { row_first, column_first };

struct ImmerseOptions {
    int i0 = 0, j0 = 0;            // basepoint, X(basepoint) = 0
    double residual_tol = 1e-2;    // relative to spinor scale; negative disables the check
    double reality_tol = 1e-8;     // relative to diameter
    Quadrature rule = Quadrature::corrected;
    PathOrder order = PathOrder::row_first;
    Exec exec = Exec::parallel;
};

struct SurfacePatch {
    Grid grid;
    Rep rep = Rep::R4;
    Signature sig;
    Vec4 X;
    int i0 = 0, j0 = 0;
    Mask mask;
    double max_imag = 0;   // dropped imaginary part
    double residual = 0;   // dirac residual at construction
};

SurfacePatch immerse(const SpinorQuad& sq, const Potentials& pot, const ImmerseOptions& opt = {});
SurfacePatch integrate_form(const OneForm& w, const ImmerseOptions& opt = {});

// waypoints: consecutive entries differ by one step along one axis
using Contour = std::vector<std::pair<int, int>>;
Contour straight_contour(std::pair<int, int> a, std::pair<int, int> b, bool x_first);
std::array<cplx, 4> integrate_contour(const OneForm& w, const Contour& c, Quadrature rule = Quadrature::corrected);

// max defect of d(omega) = 0
double closedness_residual(const OneForm& w, Exec ex = Exec::parallel);
double closedness_residual(const SpinorQuad& sq, Exec ex = Exec::parallel);

double diameter(const SurfacePatch& sp);

// e^{2 sigma} = [1 + (K0/4) X.X]^{-2}, X.X with the ambient signature
struct ConformalFactor {
    rfield e2s;
    Mask mask;
    double K0 = 0;
};
ConformalFactor conformal_scale(const SurfacePatch& sp, double K0, double tol = 1e-10);

// Simplified forms at p = 1.
//   R31:  psi_a zzbar = q psi_a,      phi_a = psi_a z
//   R22T: psi_a xi eta = q psi_a,     phi_a = psi_a xi, tphi_1 = psi_3, tphi_2 = psi_4 (or swapped)
struct MoutardInput {
    Rep rep = Rep::R31;
    Grid grid;
    cfield psi[4];
    cfield q;
    bool swap_pairing = false;
};
struct MoutardResult {
    SpinorQuad sq;
    Potentials pot;
    SurfacePatch patch;
    double moutard_residual = 0;
    rfield metric_wronskian;   // conformal factor from the Wronskian form
};
double moutard_residual(const MoutardInput& in, Exec ex = Exec::parallel);
MoutardResult immerse_moutard(const MoutardInput& in, double tol = 1e-3, const ImmerseOptions& opt = {});

}  // namespace w4d
