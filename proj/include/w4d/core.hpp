// Grid, field and stencil substrate shared by every other module.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace w4d {

using cplx = std::complex<double>;
using cfield = std::vector<cplx>;
using rfield = std::vector<double>;
using Mask = std::vector<std::uint8_t>;  // 1 = excluded
using Vec4 = std::array<rfield, 4>;
using CVec4 = std::array<cfield, 4>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

enum class Exec { serial, parallel };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the explicit evolvers when the field stops being finite or
// outgrows the configured amplitude bound.
class BlowupError : public Error {
public:
    BlowupError(const std::string& what, double t, double max_p) : Error(what), t_(t), max_p_(max_p) {}
    double time() const { return t_; }
    double max_p() const { return max_p_; }

private:
    double t_, max_p_;
};

// Uniform (x,y) sampling.  Index (i,j) -> i + nx*j, x fastest.
// Periodic axes drop the right end point: h = L/n.
struct Grid {
    double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
    int nx = 8, ny = 8;
    bool periodic_x = false, periodic_y = false;

    static Grid box(double half, int n, bool periodic = false) {
        return {-half, half, -half, half, n, n, periodic, periodic};
    }
    void validate() const;
    double hx() const { return (x_max - x_min) / (periodic_x ? nx : nx - 1); }
    double hy() const { return (y_max - y_min) / (periodic_y ? ny : ny - 1); }
    double x(int i) const { return x_min + i * hx(); }
    double y(int j) const { return y_min + j * hy(); }
    cplx z(int i, int j) const { return {x(i), y(j)}; }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t idx(int i, int j) const { return std::size_t(i) + std::size_t(nx) * std::size_t(j); }
    bool same_as(const Grid& o) const {
        return nx == o.nx && ny == o.ny && x_min == o.x_min && x_max == o.x_max && y_min == o.y_min &&
               y_max == o.y_max && periodic_x == o.periodic_x && periodic_y == o.periodic_y;
    }
};

enum class Sig { R4, R31, R22, R3, R21 };

// R3 and R21 live in the first/last slots of a 4-vector whose unused
// coordinate is kept identically zero (X4 for R3, X3 for R21).
struct Signature {
    Sig tag = Sig::R4;
    std::array<double, 4> diag{1, 1, 1, 1};
    static Signature of(Sig t);
    double dot(const std::array<double, 4>& a, const std::array<double, 4>& b) const {
        return diag[0] * a[0] * b[0] + diag[1] * a[1] * b[1] + diag[2] * a[2] * b[2] + diag[3] * a[3] * b[3];
    }
};
std::string to_string(Sig s);
Sig sig_from_string(const std::string& s);

// Sample f(z) on the grid.
template <class F>
cfield sample(const Grid& g, F&& f) {
    cfield out(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[g.idx(i, j)] = f(g.z(i, j));
    return out;
}

void require_finite(const cfield& f, const Grid& g, const char* what);
void require_finite(const rfield& f, const Grid& g, const char* what);

// First derivatives: 4th-order central, 2nd-order one-sided at open ends.
template <class T> std::vector<T> dx(const std::vector<T>& f, const Grid& g, Exec ex = Exec::parallel);
template <class T> std::vector<T> dy(const std::vector<T>& f, const Grid& g, Exec ex = Exec::parallel);
// Second derivatives along one axis; order 4 or 8 in the interior.
template <class T> std::vector<T> dxx(const std::vector<T>& f, const Grid& g, int order = 4, Exec ex = Exec::parallel);
template <class T> std::vector<T> dyy(const std::vector<T>& f, const Grid& g, int order = 4, Exec ex = Exec::parallel);

cfield dz(const cfield& f, const Grid& g, Exec ex = Exec::parallel);
cfield dzbar(const cfield& f, const Grid& g, Exec ex = Exec::parallel);
// d_z d_zbar = (dxx + dyy)/4 with a dedicated second-difference stencil
cfield dzdzbar(const cfield& f, const Grid& g, int order = 4, Exec ex = Exec::parallel);
rfield dzdzbar(const rfield& f, const Grid& g, int order = 4, Exec ex = Exec::parallel);
// mixed d_x d_y (used as d_xi d_eta on timelike grids)
template <class T> std::vector<T> dxy(const std::vector<T>& f, const Grid& g, Exec ex = Exec::parallel);

struct QuadResult {
    cplx value;
    double coverage = 1.0;  // unmasked weight / total weight
    std::size_t masked = 0;
};
QuadResult quad_area(const cfield& f, const Grid& g, const Mask* mask = nullptr);
QuadResult quad_area(const rfield& f, const Grid& g, const Mask* mask = nullptr);

rfield ambient_dot(const Vec4& a, const Vec4& b, const Signature& s);
cfield ambient_dot(const CVec4& a, const CVec4& b, const Signature& s);

// max |f| over unmasked points
double max_abs(const cfield& f, const Mask* mask = nullptr);
double max_abs(const rfield& f, const Mask* mask = nullptr);
Mask mask_or(const Mask& a, const Mask& b);
std::size_t count_masked(const Mask& m);

cfield to_complex(const rfield& f);
rfield real_part(const cfield& f);
rfield imag_part(const cfield& f);
rfield abs2(const cfield& f);

}  // namespace w4d
