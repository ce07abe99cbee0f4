// Geometric invariants, computed closed-form from spinors and numerically
// from immersed coordinates.
#pragma once

#include "w4d/immersion.hpp"

namespace w4d {

// Spacelike: ds^2 = factor dz dzbar, g_zzb = factor/2.
// Timelike:  ds^2 = factor dxi deta, g_xieta = factor/2.
struct MetricData {
    bool timelike = false;
    cfield g_zz;        // spacelike
    rfield g_zzb;       // spacelike
    rfield g_xixi, g_xieta, g_etaeta;  // timelike
    rfield factor;
    Mask mask;
    double conformality_defect = 0;  // max |g_zz|/g_zzb or max(|g_xixi|,|g_etaeta|)/|g_xieta|
};

MetricData metric_closed(const SpinorQuad& sq, double mask_tol = 1e-12);
MetricData metric_numeric(const SurfacePatch& sp, Exec ex = Exec::parallel);
// metric from the exact 1-form components (no differentiation of X)
MetricData metric_from_form(const OneForm& w);

struct GeometryReport {
    rfield K;            // closed form from the conformal factor
    Vec4 H;              // closed form
    rfield H2;           // closed scalar formula (4|p|^2/(u1 u2) family)
    rfield H2_vec;       // ambient_dot(H, H)
    double W = 0;        // representation formula (signed quadrature)
    double W_area = 0;   // int H2 dA
    Mask mask;
    double coverage = 1;
    double conformality_defect = 0;
};

// cf (optional): ambient conformal factor e^{2 sigma}
GeometryReport curvatures(const SpinorQuad& sq, const Potentials& pot, const struct ConformalFactor* cf = nullptr,
                          int order = 4, Exec ex = Exec::parallel);

// Numeric invariants from an immersed patch.
struct NumericGeometry {
    MetricData metric;
    Vec4 H;         // X_zzb / g_zzb  or  X_xieta / g_xieta
    rfield H2;      // ambient_dot(H, H)
    rfield K;       // Brioschi formula from E, F, G
};
NumericGeometry geometry_numeric(const SurfacePatch& sp, Exec ex = Exec::parallel);

// Gaussian curvature of ds^2 = E du^2 + 2F du dv + G dv^2 (u = grid x, v = grid y)
rfield brioschi(const rfield& E, const rfield& F, const rfield& G, const Grid& g, Exec ex = Exec::parallel);

// Signed Willmore quadrature per representation.
//  R4: 4|p|^2   R22: -4|p|^2   R31: -4qp   R3: 4p^2   R21: -4p^2   R31T: 2|p|^2   R22T: -2 sign qp
double willmore(const Potentials& pot, Rep rep, const Grid& g, const rfield* sign_field = nullptr,
                const Mask* mask = nullptr);

// ---- R4 normals and Gauss map ----
struct GaussMapData {
    Vec4 N1, N2;
    CVec4 G;
    rfield h1, h2;
    Mask mask;
    double quadric_defect = 0;       // max |sum G_i^2| / max |G|^2
    double tangency_defect = 0;      // max |N_a . X_z| / |X_z|
    double orthonormality_defect = 0;
    double h_decomposition_gap = 0;  // max |H - h1 N1 - h2 N2|
    double h2_gap = 0;               // max |h1^2 + h2^2 - H2|
};
GaussMapData normals_and_gauss(const SpinorQuad& sq, const Potentials& pot, double mask_tol = 1e-10);

// ---- Kenmotsu form ----
struct KenmotsuData {
    cfield f1, f2, eta, F1, F2;
    cfield p_from_F1, p_from_F2;  // recovered potential from each F
    Mask mask;
    double p_gap = 0;          // max |p_rec - p|
    double modulus_gap = 0;    // max ||F1| - |F2||
    double eta_gap = 0;        // relative gap in conj(eta)^2 = -4 F1 F2 / (H^2 (1+|f1|^2)(1+|f2|^2))
    double imag_constraint = 0;  // Im of the z-bar derivative of the combined bracket
    double logH_gap = 0;       // bracket vs 2 (log H)_z
};
KenmotsuData kenmotsu_convert(const SpinorQuad& sq, const Potentials& pot, int interior = 4);
// inverse map; phi1 fixes the remaining gauge
SpinorQuad kenmotsu_inverse(const Grid& g, const cfield& f1, const cfield& f2, const cfield& eta, const cfield& phi1);

// ---- class predicates ----
struct ClassResiduals {
    double minimal = 0;            // max |H| (closed)
    double superminimal_direct = 0;  // max |X_zz . X_zz| from the exact 1-form
    double superminimal_rhs_gap = 0; // max |X_zz.X_zz - sign * (..)(..)|
    double superminimal_sufficient = 0;  // p = 0 and phi_a = a conj(psi_a), best of a = 1,2
    double constant_h2 = 0;        // stddev / mean of H2 over unmasked points
    double constant_h2_system = 0; // defect of the constant-|H| spinor system with theta = arg p
};
ClassResiduals class_predicates(const SpinorQuad& sq, const Potentials& pot, int interior = 4);
// sign in X_zz.X_zz = s (conj(psi1)_z phi1 - ...)(...)
double superminimal_sign(Rep rep);

Mask interior_mask(const Grid& g, int border);

}  // namespace w4d
