#include "w4d/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace w4d {

void Grid::validate() const {
    if (nx < 8 || ny < 8) throw Error("grid needs at least 8 points per axis");
    if (!(x_max > x_min) || !(y_max > y_min)) throw Error("grid bounds must be increasing");
}

Signature Signature::of(Sig t) {
    switch (t) {
        case Sig::R4: return {t, {1, 1, 1, 1}};
        case Sig::R31: return {t, {1, 1, 1, -1}};
        case Sig::R22: return {t, {1, 1, -1, -1}};
        case Sig::R3: return {t, {1, 1, 1, 1}};
        case Sig::R21: return {t, {1, 1, 1, -1}};
    }
    throw Error("unknown signature");
}

std::string to_string(Sig s) {
    switch (s) {
        case Sig::R4: return "R4";
        case Sig::R31: return "R31";
        case Sig::R22: return "R22";
        case Sig::R3: return "R3";
        case Sig::R21: return "R21";
    }
    return "?";
}

Sig sig_from_string(const std::string& s) {
    if (s == "R4") return Sig::R4;
    if (s == "R31") return Sig::R31;
    if (s == "R22") return Sig::R22;
    if (s == "R3") return Sig::R3;
    if (s == "R21") return Sig::R21;
    throw Error("unknown signature tag '" + s + "'");
}

namespace {

template <class T>
bool finite_val(const T& v) {
    if constexpr (std::is_same_v<T, cplx>) return std::isfinite(v.real()) && std::isfinite(v.imag());
    else return std::isfinite(v);
}

template <class V>
void finite_check(const V& f, const Grid& g, const char* what) {
    if (f.size() != g.size()) throw Error(std::string(what) + ": field/grid size mismatch");
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!finite_val(f[k])) {
            std::ostringstream os;
            os << what << ": non-finite value at (i,j)=(" << k % g.nx << "," << k / g.nx << ")";
            throw Error(os.str());
        }
    }
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// d/ds along one line of n samples with stride st.
template <class T>
void d1_line(const T* f, T* out, int n, std::ptrdiff_t st, double h, bool periodic) {
    const double c = 1.0 / (12.0 * h);
    if (periodic) {
        for (int i = 0; i < n; ++i) {
            auto at = [&](int k) { return f[wrap(i + k, n) * st]; };
            out[i * st] = c * (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2));
        }
        return;
    }
    const double c2 = 1.0 / (2.0 * h);
    out[0] = c2 * (-3.0 * f[0] + 4.0 * f[st] - f[2 * st]);
    out[st] = c2 * (f[2 * st] - f[0]);
    for (int i = 2; i < n - 2; ++i)
        out[i * st] = c * (f[(i - 2) * st] - 8.0 * f[(i - 1) * st] + 8.0 * f[(i + 1) * st] - f[(i + 2) * st]);
    out[(n - 2) * st] = c2 * (f[(n - 1) * st] - f[(n - 3) * st]);
    out[(n - 1) * st] = c2 * (3.0 * f[(n - 1) * st] - 4.0 * f[(n - 2) * st] + f[(n - 3) * st]);
}

// symmetric second-difference weights, w[0] centre, w[k] for offset ±k
const double W2[] = {-2.0, 1.0};
const double W4[] = {-5.0 / 2, 4.0 / 3, -1.0 / 12};
const double W6[] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
const double W8[] = {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

const double* weights(int half) {
    switch (half) {
        case 1: return W2;
        case 2: return W4;
        case 3: return W6;
        default: return W8;
    }
}

template <class T>
void d2_line(const T* f, T* out, int n, std::ptrdiff_t st, double h, bool periodic, int order) {
    const int half = order / 2;
    const double ih2 = 1.0 / (h * h);
    if (periodic) {
        const double* w = weights(half);
        for (int i = 0; i < n; ++i) {
            T acc = w[0] * f[i * st];
            for (int k = 1; k <= half; ++k) acc += w[k] * (f[wrap(i + k, n) * st] + f[wrap(i - k, n) * st]);
            out[i * st] = acc * ih2;
        }
        return;
    }
    out[0] = ih2 * (2.0 * f[0] - 5.0 * f[st] + 4.0 * f[2 * st] - f[3 * st]);
    out[(n - 1) * st] =
        ih2 * (2.0 * f[(n - 1) * st] - 5.0 * f[(n - 2) * st] + 4.0 * f[(n - 3) * st] - f[(n - 4) * st]);
    for (int i = 1; i < n - 1; ++i) {
        // widest symmetric stencil that fits, capped at the requested order
        const int hk = std::min({half, i, n - 1 - i});
        const double* w = weights(hk);
        T acc = w[0] * f[i * st];
        for (int k = 1; k <= hk; ++k) acc += w[k] * (f[(i + k) * st] + f[(i - k) * st]);
        out[i * st] = acc * ih2;
    }
}

template <class T, class Kern>
std::vector<T> along_x(const std::vector<T>& f, const Grid& g, Exec ex, Kern&& kern) {
    if (f.size() != g.size()) throw Error("field/grid size mismatch");
    std::vector<T> out(f.size());
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < g.ny; ++j) kern(f.data() + g.idx(0, j), out.data() + g.idx(0, j));
    } else {
        for (int j = 0; j < g.ny; ++j) kern(f.data() + g.idx(0, j), out.data() + g.idx(0, j));
    }
    return out;
}

template <class T, class Kern>
std::vector<T> along_y(const std::vector<T>& f, const Grid& g, Exec ex, Kern&& kern) {
    if (f.size() != g.size()) throw Error("field/grid size mismatch");
    std::vector<T> out(f.size());
    if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < g.nx; ++i) kern(f.data() + i, out.data() + i);
    } else {
        for (int i = 0; i < g.nx; ++i) kern(f.data() + i, out.data() + i);
    }
    return out;
}

void check_order(int order) {
    if (order != 2 && order != 4 && order != 6 && order != 8) throw Error("second-difference order must be 2,4,6,8");
}

}  // namespace

void require_finite(const cfield& f, const Grid& g, const char* what) { finite_check(f, g, what); }
void require_finite(const rfield& f, const Grid& g, const char* what) { finite_check(f, g, what); }

template <class T>
std::vector<T> dx(const std::vector<T>& f, const Grid& g, Exec ex) {
    const double h = g.hx();
    return along_x(f, g, ex, [&](const T* a, T* b) { d1_line(a, b, g.nx, 1, h, g.periodic_x); });
}
template <class T>
std::vector<T> dy(const std::vector<T>& f, const Grid& g, Exec ex) {
    const double h = g.hy();
    const std::ptrdiff_t st = g.nx;
    return along_y(f, g, ex, [&](const T* a, T* b) { d1_line(a, b, g.ny, st, h, g.periodic_y); });
}
template <class T>
std::vector<T> dxx(const std::vector<T>& f, const Grid& g, int order, Exec ex) {
    check_order(order);
    const double h = g.hx();
    return along_x(f, g, ex, [&](const T* a, T* b) { d2_line(a, b, g.nx, 1, h, g.periodic_x, order); });
}
template <class T>
std::vector<T> dyy(const std::vector<T>& f, const Grid& g, int order, Exec ex) {
    check_order(order);
    const double h = g.hy();
    const std::ptrdiff_t st = g.nx;
    return along_y(f, g, ex, [&](const T* a, T* b) { d2_line(a, b, g.ny, st, h, g.periodic_y, order); });
}
template <class T>
std::vector<T> dxy(const std::vector<T>& f, const Grid& g, Exec ex) {
    return dy(dx(f, g, ex), g, ex);
}

template std::vector<cplx> dx(const std::vector<cplx>&, const Grid&, Exec);
template std::vector<double> dx(const std::vector<double>&, const Grid&, Exec);
template std::vector<cplx> dy(const std::vector<cplx>&, const Grid&, Exec);
template std::vector<double> dy(const std::vector<double>&, const Grid&, Exec);
template std::vector<cplx> dxx(const std::vector<cplx>&, const Grid&, int, Exec);
template std::vector<double> dxx(const std::vector<double>&, const Grid&, int, Exec);
template std::vector<cplx> dyy(const std::vector<cplx>&, const Grid&, int, Exec);
template std::vector<double> dyy(const std::vector<double>&, const Grid&, int, Exec);
template std::vector<cplx> dxy(const std::vector<cplx>&, const Grid&, Exec);
template std::vector<double> dxy(const std::vector<double>&, const Grid&, Exec);

cfield dz(const cfield& f, const Grid& g, Exec ex) {
    require_finite(f, g, "dz");
    auto fx = dx(f, g, ex);
    auto fy = dy(f, g, ex);
    for (std::size_t k = 0; k < fx.size(); ++k) fx[k] = 0.5 * (fx[k] - I * fy[k]);
    return fx;
}

cfield dzbar(const cfield& f, const Grid& g, Exec ex) {
    require_finite(f, g, "dzbar");
    auto fx = dx(f, g, ex);
    auto fy = dy(f, g, ex);
    for (std::size_t k = 0; k < fx.size(); ++k) fx[k] = 0.5 * (fx[k] + I * fy[k]);
    return fx;
}

template <class T>
static std::vector<T> lap4(const std::vector<T>& f, const Grid& g, int order, Exec ex) {
    auto a = dxx(f, g, order, ex);
    auto b = dyy(f, g, order, ex);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.25 * (a[k] + b[k]);
    return a;
}

cfield dzdzbar(const cfield& f, const Grid& g, int order, Exec ex) {
    require_finite(f, g, "dzdzbar");
    return lap4(f, g, order, ex);
}
rfield dzdzbar(const rfield& f, const Grid& g, int order, Exec ex) {
    require_finite(f, g, "dzdzbar");
    return lap4(f, g, order, ex);
}

namespace {
template <class T>
QuadResult quad_impl(const std::vector<T>& f, const Grid& g, const Mask* mask) {
    if (f.size() != g.size()) throw Error("quad_area: field/grid size mismatch");
    if (mask && mask->size() != g.size()) throw Error("quad_area: mask/grid size mismatch");
    auto w1 = [](int i, int n, bool per) { return (!per && (i == 0 || i == n - 1)) ? 0.5 : 1.0; };
    cplx acc = 0;
    double wall = 0, wkept = 0;
    std::size_t nm = 0;
    for (int j = 0; j < g.ny; ++j) {
        const double wy = w1(j, g.ny, g.periodic_y);
        for (int i = 0; i < g.nx; ++i) {
            const double w = wy * w1(i, g.nx, g.periodic_x);
            const std::size_t k = g.idx(i, j);
            wall += w;
            if (mask && (*mask)[k]) {
                ++nm;
                continue;
            }
            wkept += w;
            acc += w * cplx(f[k]);
        }
    }
    return {acc * g.hx() * g.hy(), wkept / wall, nm};
}
}  // namespace

QuadResult quad_area(const cfield& f, const Grid& g, const Mask* mask) { return quad_impl(f, g, mask); }
QuadResult quad_area(const rfield& f, const Grid& g, const Mask* mask) { return quad_impl(f, g, mask); }

rfield ambient_dot(const Vec4& a, const Vec4& b, const Signature& s) {
    const std::size_t n = a[0].size();
    rfield out(n, 0.0);
    for (int c = 0; c < 4; ++c) {
        if (a[c].size() != n || b[c].size() != n) throw Error("ambient_dot: size mismatch");
        for (std::size_t k = 0; k < n; ++k) out[k] += s.diag[c] * a[c][k] * b[c][k];
    }
    return out;
}

cfield ambient_dot(const CVec4& a, const CVec4& b, const Signature& s) {
    const std::size_t n = a[0].size();
    cfield out(n, 0.0);
    for (int c = 0; c < 4; ++c) {
        if (a[c].size() != n || b[c].size() != n) throw Error("ambient_dot: size mismatch");
        for (std::size_t k = 0; k < n; ++k) out[k] += s.diag[c] * a[c][k] * b[c][k];
    }
    return out;
}

double max_abs(const cfield& f, const Mask* mask) {
    double m = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!mask || !(*mask)[k]) m = std::max(m, std::abs(f[k]));
    return m;
}
double max_abs(const rfield& f, const Mask* mask) {
    double m = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!mask || !(*mask)[k]) m = std::max(m, std::abs(f[k]));
    return m;
}

Mask mask_or(const Mask& a, const Mask& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Mask m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = a[k] | b[k];
    return m;
}

std::size_t count_masked(const Mask& m) { return std::size_t(std::count(m.begin(), m.end(), 1)); }

cfield to_complex(const rfield& f) { return cfield(f.begin(), f.end()); }
rfield real_part(const cfield& f) {
    rfield r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k].real();
    return r;
}
rfield imag_part(const cfield& f) {
    rfield r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k].imag();
    return r;
}
rfield abs2(const cfield& f) {
    rfield r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = std::norm(f[k]);
    return r;
}

}  // namespace w4d
