#include "way/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <algorithm>

// AVX2/FMA variants. Complex doubles are processed two at a time packed as
// [re0, im0, re1, im1]; a*b uses fmaddsub on the broadcast real/imag parts.

namespace way::kernels {

namespace {

inline __m256d cmul_acc(__m256d acc, __m256d a_re, __m256d a_im, __m256d b) {
    const __m256d b_swap = _mm256_permute_pd(b, 0x5);
    // (a_re*b -/+ a_im*b_swap) interleaves to complex product lanes.
    const __m256d prod = _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
    return _mm256_add_pd(acc, prod);
}

void gemm_avx2(std::size_t n, std::size_t k, std::size_t m, const cplx* A,
               const cplx* B, cplx* C, bool accumulate) {
    if (!accumulate) std::fill(C, C + n * m, cplx(0.0, 0.0));
    const double* Bd = reinterpret_cast<const double*>(B);
    double* Cd = reinterpret_cast<double*>(C);
    const std::size_t m2 = (m / 2) * 2;
    for (std::size_t i = 0; i < n; ++i) {
        double* Ci = Cd + 2 * i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const cplx a = A[i * k + p];
            if (a == cplx(0.0, 0.0)) continue;
            const __m256d a_re = _mm256_set1_pd(a.real());
            const __m256d a_im = _mm256_set1_pd(a.imag());
            const double* Bp = Bd + 2 * p * m;
            std::size_t j = 0;
            for (; j < m2; j += 2) {
                __m256d c = _mm256_loadu_pd(Ci + 2 * j);
                c = cmul_acc(c, a_re, a_im, _mm256_loadu_pd(Bp + 2 * j));
                _mm256_storeu_pd(Ci + 2 * j, c);
            }
            for (; j < m; ++j) {
                const cplx b(Bp[2 * j], Bp[2 * j + 1]);
                const cplx c = a * b;
                Ci[2 * j] += c.real();
                Ci[2 * j + 1] += c.imag();
            }
        }
    }
}

cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    const std::size_t n2 = (n / 2) * 2;
    std::size_t i = 0;
    for (; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        const __m256d y_swap = _mm256_permute_pd(yv, 0x5);
        // re lanes: xr*yr, xi*yi ; im lanes: xr*yi, xi*yr
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, y_swap, acc_im);
    }
    alignas(32) double re4[4], im4[4];
    _mm256_store_pd(re4, acc_re);
    _mm256_store_pd(im4, acc_im);
    double re = re4[0] + re4[1] + re4[2] + re4[3];
    double im = im4[0] - im4[1] + im4[2] - im4[3];
    for (; i < n; ++i) {
        const cplx xv = x[i], yv = y[i];
        re += xv.real() * yv.real() + xv.imag() * yv.imag();
        im += xv.real() * yv.imag() - xv.imag() * yv.real();
    }
    return {re, im};
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const __m256d a_re = _mm256_set1_pd(a.real());
    const __m256d a_im = _mm256_set1_pd(a.imag());
    const std::size_t n2 = (n / 2) * 2;
    std::size_t i = 0;
    for (; i < n2; i += 2) {
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        yv = cmul_acc(yv, a_re, a_im, _mm256_loadu_pd(xd + 2 * i));
        _mm256_storeu_pd(yd + 2 * i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double max_abs_diff_avx2(std::size_t n, const cplx* x, const cplx* y) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx d = y ? x[i] - y[i] : x[i];
        const double v = std::abs(d);
        if (v > best) best = v;
    }
    return best;
}

}  // namespace

const Ops avx2_ops = {gemm_avx2, dotc_avx2, axpy_avx2, max_abs_diff_avx2, "avx2"};

}  // namespace way::kernels
