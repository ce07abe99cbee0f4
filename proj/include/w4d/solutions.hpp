// Solutions of the Dirac-type linear systems: minimal data, N-solitons,
// dromion densities, separable constant-potential data.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "w4d/core.hpp"

namespace w4d {

// Linear system / ambient space.  T suffix = timelike surface on a (xi,eta) grid,
// xi along the grid x axis, eta along y.
//   R4   psi_z = p phi,  phi_zb = -pb psi     (pair 2 with pb)
//   R22  psi_z = p phi,  phi_zb = +pb psi
//   R31  psi_z = p phi,  phi_zb = q psi       (p,q real)
//   R3   psi_z = p phi,  phi_zb = -p psi      (p real, one pair)
//   R21  psi_z = p phi,  phi_zb = p psi       (p real, one pair)
//   R31T psi_xi = p phi, phi_eta = pb psi
//   R22T psi_xi = p phi, phi_eta = q psi; tpsi_xi = q tphi, tphi_eta = p tpsi (all real)
enum class Rep { R4, R22, R31, R3, R21, R31T, R22T };

std::string to_string(Rep r);
Rep rep_from_string(const std::string& s);
Signature signature_of(Rep r);
bool is_timelike(Rep r);

struct Potentials {
    cfield p;
    cfield q;  // used by R31, R22T; ignored elsewhere
};

struct SpinorQuad {
    Rep rep = Rep::R4;
    Grid grid;
    cfield psi1, phi1, psi2, phi2;
    cfield tpsi1, tphi1, tpsi2, tphi2;  // R22T only
    Mask mask;                           // empty = nothing masked
};

// Max over unmasked points of the largest equation defect.
double dirac_residual(const SpinorQuad& sq, const Potentials& pot, Exec ex = Exec::parallel);

// ---- minimal (p = q = 0) ----
// Spacelike: psi = antiholomorphic (a), phi = holomorphic (h).
// Timelike: psi depends on eta only, phi on xi only.
SpinorQuad minimal_spinors(const Grid& g, const cfield& h1, const cfield& h2, const cfield& a1, const cfield& a2,
                           Rep rep, double tol = 1e-6);

// ---- solitons ----
struct SolitonParams {
    std::vector<cplx> lambda, mu, nu;
    int eps = -1;
    double t2 = 0.0;
    cplx spectral = 0.0;  // only k = 0 (bounded eigenfunction) is supported
    void validate() const;
    std::size_t N() const { return lambda.size(); }
    // parameters after the explicit t2 shift
    SolitonParams at_time() const;
    // second-pair parameters: lambda -> -lambda, nu -> conj(nu)
    SolitonParams tilde() const;
};

struct SolitonResult {
    cfield p;
    SpinorQuad sq;
    std::size_t masked = 0;
    double tilde_gap = 0;     // max |p_tilde - conj(p)|
    double closed_gap = 0;    // N = 1: max |p_closed - p_lu|
};

SolitonResult soliton_fields(const SolitonParams& sp, const Grid& g, Exec ex = Exec::parallel);
// closed-form one-soliton potential at a point (time shift included)
cplx soliton1_p(const SolitonParams& sp, cplx z);
// potential from the linear system at a point
cplx soliton_p_at(const SolitonParams& sp, cplx z);
// log|det D| at a point (Cauchy-scaled matrix, same determinant)
double soliton_logdet_at(const SolitonParams& sp, cplx z);

struct LogDetResult {
    rfield p2;
    Mask mask;
    std::size_t masked = 0;
};
// |p|^2 = -eps [log det D]_{z zbar} by an `order` second-difference stencil
LogDetResult soliton_p2_logdet(const SolitonParams& sp, const Grid& g, int order = 8, Exec ex = Exec::parallel);
// same quantity by the Jacobi formula (no grid differentiation)
double soliton_p2_jacobi(const SolitonParams& sp, cplx z);

// ---- dromions ----
enum class ProfileKind { gaussian, sech };
struct Profile {
    ProfileKind kind = ProfileKind::gaussian;
    double center = 0, width = 1;
    // sech profile: bound state of u = 2 k^2 sech^2(k s), phase exp(i k^2 t)
    cplx value(double s, double t) const;
};
struct DromionParams {
    int M = 1, L = 1;
    std::vector<cplx> rho;  // M x L, row-major
    std::vector<Profile> X, Y;
    int eps = 1;
    double t2 = 0.0;
    bool orthonormalize = true;  // make alpha(+inf) = beta(+inf) = I
    void validate() const;
};
struct DromionResult {
    rfield p2;
    rfield logdet;
    double integral = 0;  // quadrature of p2
    double coverage = 1;
};
DromionResult dromion_p2(const DromionParams& dp, const Grid& g);
double willmore_dromion(const DromionParams& dp);
// -eps log det(1 - eps rho rho^dagger)
double dromion_integral_exact(const DromionParams& dp);

// ---- constant potentials ----
// R31T: psi = exp(a xi + b eta), phi = (a/p0) psi, b = |p0|^2/a
SpinorQuad constant_p_timelike(const Grid& g, cplx p0, double a);
// R4 constant |H|^2 family: psi_k = A_k e^{k_k z - conj(k_k) zb}, phi_k = k_k psi_k / p_k
struct ConstantH2Data {
    SpinorQuad sq;
    Potentials pot;
};
ConstantH2Data constant_h2_r4(const Grid& g, cplx p0, cplx k1, cplx k2, cplx A1 = 1.0, cplx A2 = 1.0);

// ---- separable data for 1D reductions lives in reduction1d ----

}  // namespace w4d
