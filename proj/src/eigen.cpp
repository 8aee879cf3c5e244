#include "way/eigen.hpp"

#include <lapacke.h>

#include <cmath>

namespace way {

EigResult hermitian_eig(const Operator& A) {
    if (A.hermiticity_defect() > tol().hermitian_input)
        throw ContractError("hermitian_eig: input not Hermitian within tolerance");
    const int n = A.dim();
    EigResult r;
    r.values.resize(static_cast<std::size_t>(n));
    r.vectors = A;
    // zheev on the symmetrized copy; row-major layout handled by LAPACKE.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (r.vectors.at(i, j) + std::conj(r.vectors.at(j, i)));
            r.vectors.at(i, j) = avg;
            r.vectors.at(j, i) = std::conj(avg);
        }
    const int info = LAPACKE_zheev(
        LAPACK_ROW_MAJOR, 'V', 'U', n,
        reinterpret_cast<lapack_complex_double*>(r.vectors.data()), n,
        r.values.data());
    if (info != 0)
        throw NumericError("hermitian_eig: zheev failed to converge, info=" +
                           std::to_string(info));
    // zheev leaves eigenvectors in the rows after row-major transposition
    // handling; LAPACKE stores them as columns in row-major layout already.
    return r;
}

double max_eigenvalue(const Operator& A) {
    const int n = A.dim();
    Operator work = A;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (work.at(i, j) + std::conj(work.at(j, i)));
            work.at(i, j) = avg;
            work.at(j, i) = std::conj(avg);
        }
    std::vector<double> w(static_cast<std::size_t>(n));
    const int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', n,
                                   reinterpret_cast<lapack_complex_double*>(work.data()),
                                   n, w.data());
    if (info != 0) throw NumericError("max_eigenvalue: zheev failed");
    return w.back();
}

double min_eigenvalue(const Operator& A) {
    const int n = A.dim();
    Operator work = A;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (work.at(i, j) + std::conj(work.at(j, i)));
            work.at(i, j) = avg;
            work.at(j, i) = std::conj(avg);
        }
    std::vector<double> w(static_cast<std::size_t>(n));
    const int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', n,
                                   reinterpret_cast<lapack_complex_double*>(work.data()),
                                   n, w.data());
    if (info != 0) throw NumericError("min_eigenvalue: zheev failed");
    return w.front();
}

Operator hermitian_function(const Operator& A, const std::vector<cplx>& f_of_eigs,
                            const EigResult& eig) {
    const int n = A.dim();
    // V diag(f) V^dag with V columns = eigenvectors.
    Operator scaled(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            scaled.at(i, k) = eig.vectors.at(i, k) * f_of_eigs[static_cast<std::size_t>(k)];
    return scaled * eig.vectors.dagger();
}

Operator unitary_from_generator(const Operator& H, double t) {
    const EigResult eig = hermitian_eig(H);
    std::vector<cplx> phases(eig.values.size());
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const double arg = -eig.values[k] * t / hbar();
        phases[k] = cplx(std::cos(arg), std::sin(arg));
    }
    Operator U = hermitian_function(H, phases, eig);
    const double defect = unitarity_defect(U);
    if (defect > tol().unitary)
        throw NumericError("unitary_from_generator: result not unitary, defect=" +
                           std::to_string(defect));
    return U;
}

double unitarity_defect(const Operator& U) {
    Operator G = U.dagger() * U;
    for (int i = 0; i < G.dim(); ++i) G.at(i, i) -= 1.0;
    return G.max_abs();
}

}  // namespace way
