#include "w4d/linalg.hpp"

#include <cmath>
#include <limits>

namespace w4d {

DenseLU::DenseLU(std::vector<cplx> a, int n) : lu_(std::move(a)), piv_(n), n_(n) {
    if (lu_.size() != std::size_t(n) * n) throw Error("DenseLU: size mismatch");
    for (int i = 0; i < n; ++i) piv_[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu_[k * n + k]);
        for (int r = k + 1; r < n; ++r)
            if (std::abs(lu_[r * n + k]) > best) best = std::abs(lu_[r * n + k]), p = r;
        if (best == 0.0) {
            singular_ = true;
            continue;
        }
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(lu_[k * n + c], lu_[p * n + c]);
            std::swap(piv_[k], piv_[p]);
            sign_ = -sign_;
        }
        const cplx inv = 1.0 / lu_[k * n + k];
        for (int r = k + 1; r < n; ++r) {
            const cplx m = lu_[r * n + k] * inv;
            lu_[r * n + k] = m;
            for (int c = k + 1; c < n; ++c) lu_[r * n + c] -= m * lu_[k * n + c];
        }
    }
}

cplx DenseLU::det() const {
    cplx d = double(sign_);
    for (int i = 0; i < n_; ++i) d *= lu_[i * n_ + i];
    return d;
}

double DenseLU::log_abs_det() const {
    double s = 0;
    for (int i = 0; i < n_; ++i) s += std::log(std::abs(lu_[i * n_ + i]));
    return s;
}

double DenseLU::pivot_ratio() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (int i = 0; i < n_; ++i) {
        const double v = std::abs(lu_[i * n_ + i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

std::vector<cplx> DenseLU::solve(std::vector<cplx> b) const {
    if (singular_) throw Error("DenseLU: singular matrix");
    const int n = n_;
    std::vector<cplx> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < i; ++c) x[i] -= lu_[i * n + c] * x[c];
    for (int i = n - 1; i >= 0; --i) {
        for (int c = i + 1; c < n; ++c) x[i] -= lu_[i * n + c] * x[c];
        x[i] /= lu_[i * n + i];
    }
    return x;
}

}  // namespace w4d
