#pragma once

#include <complex>
#include <cstddef>

// Low-level dense complex kernels. Scalar reference implementations plus
// AVX2 variants selected once at runtime (WAY_SIMD=scalar|avx2 overrides).
// Everything above this layer is arithmetic-path independent.

namespace way::kernels {

using cplx = std::complex<double>;

struct Ops {
    // C[n x m] (+)= A[n x k] * B[k x m], row-major.
    void (*gemm)(std::size_t n, std::size_t k, std::size_t m, const cplx* A,
                 const cplx* B, cplx* C, bool accumulate);
    // sum conj(x[i]) * y[i]
    cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
    // y += a * x
    void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // max_i |x[i] - y[i]| (y may be null: max_i |x[i]|)
    double (*max_abs_diff)(std::size_t n, const cplx* x, const cplx* y);
    const char* name;
};

// Active implementation (dispatch happens on first call).
const Ops& ops();

extern const Ops scalar_ops;
#if defined(WAY_BUILD_AVX2)
extern const Ops avx2_ops;
#endif
bool cpu_has_avx2();

inline void gemm(std::size_t n, std::size_t k, std::size_t m, const cplx* A,
                 const cplx* B, cplx* C, bool accumulate = false) {
    ops().gemm(n, k, m, A, B, C, accumulate);
}
inline cplx dotc(std::size_t n, const cplx* x, const cplx* y) { return ops().dotc(n, x, y); }
inline void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) { ops().axpy(n, a, x, y); }
inline double max_abs_diff(std::size_t n, const cplx* x, const cplx* y) {
    return ops().max_abs_diff(n, x, y);
}

}  // namespace way::kernels
