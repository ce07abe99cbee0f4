#include "w4d/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace w4d {

namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> wavenumbers(int n, double length) {
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) {
        const int m = i <= n / 2 ? i : i - n;
        k[i] = 2 * PI * m / length;
    }
    return k;
}

fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct Spectral2D::Plans {
    fftw_plan fwd = nullptr, bwd = nullptr;
};

Spectral2D::Spectral2D(const Grid& g) : g_(g), plans_(std::make_unique<Plans>()) {
    g.validate();
    if (!g.periodic_x || !g.periodic_y) throw Error("spectral operators need a doubly periodic grid");
    kx_ = wavenumbers(g.nx, g.x_max - g.x_min);
    ky_ = wavenumbers(g.ny, g.y_max - g.y_min);
    std::lock_guard<std::mutex> lock(plan_mutex());
    // scratch arrays only serve plan creation; execution uses new-array calls
    cfield a(g.size()), b(g.size());
    plans_->fwd = fftw_plan_dft_2d(g.ny, g.nx, fc(a.data()), fc(b.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_2d(g.ny, g.nx, fc(a.data()), fc(b.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->fwd || !plans_->bwd) throw Error("FFTW plan creation failed");
}

Spectral2D::~Spectral2D() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

cfield Spectral2D::forward(const cfield& f) const {
    if (f.size() != g_.size()) throw Error("Spectral2D: field size mismatch");
    cfield in = f, out(f.size());
    fftw_execute_dft(plans_->fwd, fc(in.data()), fc(out.data()));
    return out;
}

cfield Spectral2D::backward(const cfield& fh) const {
    cfield in = fh, out(fh.size());
    fftw_execute_dft(plans_->bwd, fc(in.data()), fc(out.data()));
    const double s = 1.0 / double(g_.size());
    for (auto& v : out) v *= s;
    return out;
}

template <class S>
cfield Spectral2D::apply(const cfield& f, S&& sym) const {
    cfield fh = forward(f);
    for (int j = 0; j < g_.ny; ++j)
        for (int i = 0; i < g_.nx; ++i) fh[g_.idx(i, j)] *= sym(i, j);
    return backward(fh);
}

// d_z = (d_x - i d_y)/2 -> (i kx + ky)/2;  d_zbar -> (i kx - ky)/2.
// First-derivative symbols drop the Nyquist modes.
cfield Spectral2D::dz(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx {
        if ((g_.nx % 2 == 0 && i == g_.nx / 2) || (g_.ny % 2 == 0 && j == g_.ny / 2)) return 0.0;
        return 0.5 * cplx(ky_[j], kx_[i]);
    });
}

cfield Spectral2D::dzbar(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx {
        if ((g_.nx % 2 == 0 && i == g_.nx / 2) || (g_.ny % 2 == 0 && j == g_.ny / 2)) return 0.0;
        return 0.5 * cplx(-ky_[j], kx_[i]);
    });
}

cfield Spectral2D::dzz(const cfield& f) const {
    return apply(f, [&](int i, int j) {
        const cplx s = 0.5 * cplx(ky_[j], kx_[i]);
        return s * s;
    });
}

cfield Spectral2D::dzbzb(const cfield& f) const {
    return apply(f, [&](int i, int j) {
        const cplx s = 0.5 * cplx(-ky_[j], kx_[i]);
        return s * s;
    });
}

cfield Spectral2D::dzdzbar(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx { return -0.25 * (kx_[i] * kx_[i] + ky_[j] * ky_[j]); });
}

cfield Spectral2D::inv_dzdzbar(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx {
        const double k2 = kx_[i] * kx_[i] + ky_[j] * ky_[j];
        return k2 == 0.0 ? 0.0 : -4.0 / k2;
    });
}

// symbol (i kx - ky)/(i kx + ky); unit modulus, zero at k = 0 and Nyquist
cfield Spectral2D::zbar_over_z(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx {
        if ((g_.nx % 2 == 0 && i == g_.nx / 2) || (g_.ny % 2 == 0 && j == g_.ny / 2)) return 0.0;
        const cplx a(-ky_[j], kx_[i]), b(ky_[j], kx_[i]);
        return std::abs(b) == 0.0 ? cplx(0.0) : a / b;
    });
}

cfield Spectral2D::z_over_zbar(const cfield& f) const {
    return apply(f, [&](int i, int j) -> cplx {
        if ((g_.nx % 2 == 0 && i == g_.nx / 2) || (g_.ny % 2 == 0 && j == g_.ny / 2)) return 0.0;
        const cplx a(ky_[j], kx_[i]), b(-ky_[j], kx_[i]);
        return std::abs(b) == 0.0 ? cplx(0.0) : a / b;
    });
}

struct Spectral1D::Plans {
    fftw_plan fwd = nullptr, bwd = nullptr;
};

Spectral1D::Spectral1D(int n, double length) : n_(n), len_(length), plans_(std::make_unique<Plans>()) {
    if (n < 8) throw Error("Spectral1D: need at least 8 points");
    if (!(length > 0)) throw Error("Spectral1D: length must be positive");
    k_ = wavenumbers(n, length);
    std::lock_guard<std::mutex> lock(plan_mutex());
    cfield a(n), b(n);
    plans_->fwd = fftw_plan_dft_1d(n, fc(a.data()), fc(b.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_1d(n, fc(a.data()), fc(b.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->fwd || !plans_->bwd) throw Error("FFTW plan creation failed");
}

Spectral1D::~Spectral1D() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

cfield Spectral1D::forward(const cfield& f) const {
    if (int(f.size()) != n_) throw Error("Spectral1D: field size mismatch");
    cfield in = f, out(n_);
    fftw_execute_dft(plans_->fwd, fc(in.data()), fc(out.data()));
    return out;
}

cfield Spectral1D::backward(const cfield& fh) const {
    cfield in = fh, out(n_);
    fftw_execute_dft(plans_->bwd, fc(in.data()), fc(out.data()));
    for (auto& v : out) v /= double(n_);
    return out;
}

cfield Spectral1D::deriv(const cfield& f, int m) const {
    cfield fh = forward(f);
    for (int i = 0; i < n_; ++i) {
        if (m % 2 == 1 && n_ % 2 == 0 && i == n_ / 2) {
            fh[i] = 0.0;
            continue;
        }
        fh[i] *= std::pow(I * k_[i], m);
    }
    return backward(fh);
}

}  // namespace w4d
