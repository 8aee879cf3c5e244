#include "way/kernels.hpp"

#include <cmath>
#include <algorithm>

namespace way::kernels {

namespace {

void gemm_scalar(std::size_t n, std::size_t k, std::size_t m, const cplx* A,
                 const cplx* B, cplx* C, bool accumulate) {
    if (!accumulate) std::fill(C, C + n * m, cplx(0.0, 0.0));
    // i-k-j order keeps the inner loop contiguous over B and C rows.
    for (std::size_t i = 0; i < n; ++i) {
        cplx* Ci = C + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const cplx a = A[i * k + p];
            if (a == cplx(0.0, 0.0)) continue;
            const cplx* Bp = B + p * m;
            for (std::size_t j = 0; j < m; ++j) Ci[j] += a * Bp[j];
        }
    }
}

cplx dotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

void axpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs_diff_scalar(std::size_t n, const cplx* x, const cplx* y) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx d = y ? x[i] - y[i] : x[i];
        const double v = std::abs(d);
        if (v > best) best = v;
    }
    return best;
}

}  // namespace

const Ops scalar_ops = {gemm_scalar, dotc_scalar, axpy_scalar, max_abs_diff_scalar,
                        "scalar"};

}  // namespace way::kernels
