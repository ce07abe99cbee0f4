// Tiny dense complex LU (partial pivoting) for per-point 2N x 2N systems.
#pragma once

#include <vector>

#include "w4d/core.hpp"

namespace w4d {

class DenseLU {
public:
    // a is row-major n x n; copied
    DenseLU(std::vector<cplx> a, int n);
    bool singular() const { return singular_; }
    cplx det() const;
    double log_abs_det() const;
    std::vector<cplx> solve(std::vector<cplx> b) const;
    // max|U_ii| / min|U_ii|, a cheap conditioning proxy
    double pivot_ratio() const;
    int n() const { return n_; }

private:
    std::vector<cplx> lu_;
    std::vector<int> piv_;
    int n_;
    int sign_ = 1;
    bool singular_ = false;
};

}  // namespace w4d
