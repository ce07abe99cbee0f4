// FFTW-backed Fourier operators on periodic grids.
#pragma once

#include <memory>

#include "w4d/core.hpp"

namespace w4d {

// Plans are created once (under a global lock) and executed with the
// new-array interface, so one Spectral2D may be shared across threads.
class Spectral2D {
public:
    explicit Spectral2D(const Grid& g);
    ~Spectral2D();
    Spectral2D(const Spectral2D&) = delete;
    Spectral2D& operator=(const Spectral2D&) = delete;

    const Grid& grid() const { return g_; }
    cfield forward(const cfield& f) const;
    cfield backward(const cfield& fh) const;  // normalized

    // symbol application: f -> F^-1[s(k) F f]
    cfield dz(const cfield& f) const;
    cfield dzbar(const cfield& f) const;
    cfield dzz(const cfield& f) const;
    cfield dzbzb(const cfield& f) const;
    cfield dzdzbar(const cfield& f) const;
    // inverses with the k = 0 mode set to zero (zero-mean gauge)
    cfield inv_dzdzbar(const cfield& f) const;
    // w with w_z = f_zbar  (and the mirror w_zbar = f_z)
    cfield zbar_over_z(const cfield& f) const;
    cfield z_over_zbar(const cfield& f) const;

    double kx(int i) const { return kx_[i]; }
    double ky(int j) const { return ky_[j]; }

private:
    template <class S> cfield apply(const cfield& f, S&& sym) const;
    Grid g_;
    std::vector<double> kx_, ky_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

class Spectral1D {
public:
    Spectral1D(int n, double length);
    ~Spectral1D();
    Spectral1D(const Spectral1D&) = delete;
    Spectral1D& operator=(const Spectral1D&) = delete;

    int size() const { return n_; }
    double h() const { return len_ / n_; }
    double k(int i) const { return k_[i]; }
    cfield forward(const cfield& f) const;
    cfield backward(const cfield& fh) const;
    // m-th derivative; the Nyquist mode is dropped for odd m
    cfield deriv(const cfield& f, int m) const;

private:
    int n_;
    double len_;
    std::vector<double> k_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

}  // namespace w4d
