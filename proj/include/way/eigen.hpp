#pragma once

#include "way/matrix.hpp"

namespace way {

struct EigResult {
    std::vector<double> values;  // ascending
    Operator vectors;            // column k = eigenvector for values[k]
};

// Hermitian eigendecomposition (LAPACK zheev behind the contract).
EigResult hermitian_eig(const Operator& A);

double max_eigenvalue(const Operator& A);
double min_eigenvalue(const Operator& A);

// exp(-i H t / hbar) via Hermitian eigendecomposition.
Operator unitary_from_generator(const Operator& H, double t);

// f applied to a Hermitian operator through its spectral decomposition.
Operator hermitian_function(const Operator& A, const std::vector<cplx>& f_of_eigs,
                            const EigResult& eig);

double unitarity_defect(const Operator& U);  // ||U^dag U - 1||_max

}  // namespace way
