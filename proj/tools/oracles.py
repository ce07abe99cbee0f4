#!/usr/bin/env python3
"""Reference values for the unit tests, computed independently of the C++ code
(mpmath quadrature / differentiation, scipy matrix exponential).

    python3 tools/oracles.py

Each printed value is frozen into the test named next to it.
"""
import mpmath as mp
import numpy as np
from scipy.linalg import expm

mp.mp.dps = 30


def show(tag, v):
    if isinstance(v, (complex, mp.mpc)):
        print(f"{tag:44s} {complex(v).real:.17g} {complex(v).imag:+.17g}i")
    else:
        print(f"{tag:44s} {float(v):.17g}")


# ---- one soliton, eps = -1:  |p|^2 = |nu|^2 / (|z + mu + 2 i lam t|^2 + |nu|^2)^2
#      and |p|^2 = (log D)_{z zbar} with D = |z + mu + 2 i lam t|^2 + |nu|^2
def sol_p2(z, lam, mu, nu, t=0):
    w = z + mu + 2j * lam * t
    return abs(nu) ** 2 / (abs(w) ** 2 + abs(nu) ** 2) ** 2


def sol_logdet_lap(x, y, lam, mu, nu, t=0):
    f = lambda xx, yy: mp.log(abs(mp.mpc(xx, yy) + mu + 2j * lam * t) ** 2 + abs(nu) ** 2)
    # d_z d_zbar = (1/4) Laplacian
    return (mp.diff(f, (x, y), (2, 0)) + mp.diff(f, (x, y), (0, 2))) / 4


lam, mu, nu = 0.5, 0.3 + 0.1j, 0.8
for (x, y) in [(0.0, 0.0), (1.0, 0.5), (-2.0, 3.0)]:
    show(f"soliton1 |p|^2 closed  z=({x},{y})       [solutions]", sol_p2(complex(x, y), lam, mu, nu))
    show(f"soliton1 |p|^2 logdet  z=({x},{y})       [solutions]", sol_logdet_lap(x, y, lam, mu, nu))
show("soliton1 |p|^2 closed t=0.2 z=(1,0.5)      [solutions]", sol_p2(1 + 0.5j, lam, mu, nu, 0.2))
box = mp.quad(lambda x, y: 1 / (x * x + y * y + 1) ** 2, [-40, 40], [-40, 40])
show("soliton1 nu=1 W = 4 int|p|^2 on [-40,40]^2  [geometry]", 4 * box)
show("soliton1 W on the plane (4 pi)             [geometry]", 4 * mp.pi)

# ---- dromion 1x1, rho = 0.5, eps = +1: W = -2 log(1 - |rho|^2)
show("dromion W, rho = 0.5                        [solutions]", -2 * mp.log(1 - mp.mpf("0.25")))

# ---- AKNS with constant potentials: Phi(x) = expm(x [[i lam, 2p], [2q, -i lam]])
p = 0.3 + 0.2j
q = -np.conj(p)
A = np.array([[1j * 0.7, 2 * p], [2 * q, -1j * 0.7]])
Phi = expm(1.3 * A)
for k, v in enumerate(Phi.ravel()):
    show(f"akns_constant p=.3+.2i lam=.7 x=1.3 [{k}]   [reduction1d]", v)

# ---- KdV traveling wave: q = (c/2) sech^2(sqrt(c) x / 2) solves q'' = c q - 3 q^2
for c in (1.0, 2.25):
    A0 = c / 2
    qf = lambda x: A0 / mp.cosh(mp.sqrt(c) * x / 2) ** 2
    resid = max(abs(mp.diff(qf, x, 2) - (c * qf(x) - 3 * qf(x) ** 2)) for x in (0.3, 1.1, 2.7))
    show(f"kdv amplitude c={c} (residual {float(resid):.1e})     [reduction1d]", A0)

# ---- conserved quantities of sech data on the line
a, v = 1.0, 0.5
pn = lambda x: a / mp.cosh(a * x) * mp.exp(1j * v * x)
show("nls mass  int|p|^2                          [reduction1d]", mp.quad(lambda x: abs(pn(x)) ** 2, [-mp.inf, mp.inf]))
show("nls energy int|p_x|^2 - |p|^4 (eps=-1)      [reduction1d]",
     mp.quad(lambda x: abs(mp.diff(pn, x)) ** 2 - abs(pn(x)) ** 4, [-mp.inf, 0, mp.inf]))
qk = lambda x: 0.5 / mp.cosh(x / 2) ** 2
show("kdv c=1 mass int q                          [reduction1d]", mp.quad(qk, [-mp.inf, mp.inf]))
show("kdv c=1 energy int q^2                      [reduction1d]", mp.quad(lambda x: qk(x) ** 2, [-mp.inf, mp.inf]))
pm = lambda x: 1 / mp.cosh(x)
show("mkdv a=1 mass int p                         [reduction1d]", mp.quad(pm, [-mp.inf, mp.inf]))
show("mkdv a=1 C1 int p^2                         [reduction1d]", mp.quad(lambda x: pm(x) ** 2, [-mp.inf, mp.inf]))
show("mkdv a=1 energy int p_x^2 + p^4             [reduction1d]",
     mp.quad(lambda x: mp.diff(pm, x) ** 2 + pm(x) ** 4, [-mp.inf, 0, mp.inf]))

# ---- DS-II auxiliary field for p = 0.3 e^{ix} + 0.2 e^{2iy}, eps = -1 (zero-mean gauge)
#      w1_z = -2 eps |p|^2_zbar.  Ansatz w1 = C e^{i(x-2y)} + conj-mode; solve for C symbolically.
eps = -1
P = lambda x, y: abs(0.3 * mp.exp(1j * x) + 0.2 * mp.exp(2j * y)) ** 2
# |p|^2 = 0.13 + 0.12 cos(x - 2y): modes e^{+-i(x-2y)} with amplitude 0.06 each
dz = lambda f, x, y: (mp.diff(f, (x, y), (1, 0)) - 1j * mp.diff(f, (x, y), (0, 1))) / 2
dzb = lambda f, x, y: (mp.diff(f, (x, y), (1, 0)) + 1j * mp.diff(f, (x, y), (0, 1))) / 2
e = lambda x, y: mp.exp(1j * (x - 2 * y))
sz, szb = dz(e, 0, 0), dzb(e, 0, 0)   # symbols on the + mode; both flip sign on the - mode
C = -2 * eps * 0.06 * szb / sz
w1 = lambda x, y: C * (mp.exp(1j * (x - 2 * y)) + mp.exp(-1j * (x - 2 * y)))
x0, y0 = 0.4, -1.1
check = abs(dz(w1, x0, y0) - (-2 * eps) * dzb(P, x0, y0))
show(f"ds2 w1 at (0.4,-1.1) (defect {float(check):.1e})   [deformation]", w1(x0, y0))

# ---- minimal R4 immersion, psi1 = 1, psi2 = zbar, phi1 = z, phi2 = 1 + z^2/2, basepoint 0
#   (X1+iX2)_z = -phi1 phi2, (X1-iX2)_z = conj(psi1) conj(psi2),
#   (X3+iX4)_z = phi1 conj(psi2), (X3-iX4)_z = conj(psi1) phi2;  X = 2 Re int X_z dz
f_p12 = lambda z: -z * (1 + z * z / 2)
f_m12 = lambda z: z
f_p34 = lambda z: z * z
f_m34 = lambda z: 1 + z * z / 2
Xz = [lambda z: (f_p12(z) + f_m12(z)) / 2, lambda z: (f_p12(z) - f_m12(z)) / 2j,
      lambda z: (f_p34(z) + f_m34(z)) / 2, lambda z: (f_p34(z) - f_m34(z)) / 2j]
zt = mp.mpc(1.0, 0.5)
for k in range(4):
    val = 2 * mp.re(mp.quad(lambda s: Xz[k](s * zt) * zt, [0, 1]))
    show(f"minimal R4 X{k + 1}(1+0.5i)                      [immersion]", val)
