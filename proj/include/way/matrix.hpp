#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "way/config.hpp"
#include "way/kernels.hpp"

namespace way {

using cplx = std::complex<double>;

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Joint index convention, fixed project-wide: system-major,
// joint = s * dimP + p.
struct BipartiteDims {
    int dimS = 1;
    int dimP = 1;
    int joint() const { return dimS * dimP; }
};

// Dense square complex matrix, row-major.
class Operator {
  public:
    Operator() = default;
    explicit Operator(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
        if (dim <= 0) throw DimensionError("Operator: dim must be positive");
    }
    static Operator identity(int dim);
    static Operator diag(const std::vector<double>& d);
    static Operator zero(int dim) { return Operator(dim); }

    int dim() const { return dim_; }
    cplx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const cplx& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }

    Operator dagger() const;
    Operator transpose() const;
    Operator conj() const;

    Operator operator*(const Operator& o) const;
    Operator operator+(const Operator& o) const;
    Operator operator-(const Operator& o) const;
    Operator operator*(cplx s) const;
    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);

    std::vector<cplx> apply(const std::vector<cplx>& v) const;

    cplx trace() const;
    double max_abs() const;
    bool is_hermitian(double tolerance) const;
    double hermiticity_defect() const;  // ||A - A^dag||_max

  private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(int dim) : v_(static_cast<std::size_t>(dim)) {
        if (dim <= 0) throw DimensionError("StateVector: dim must be positive");
    }
    explicit StateVector(std::vector<cplx> v) : v_(std::move(v)) {}
    static StateVector basis(int dim, int k);

    int dim() const { return static_cast<int>(v_.size()); }
    cplx& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    const cplx& operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    cplx* data() { return v_.data(); }
    const cplx* data() const { return v_.data(); }
    const std::vector<cplx>& vec() const { return v_; }

    double norm() const;
    void normalize();
    void check_normalized() const;  // | ||psi|| - 1 | <= tol.state_norm

  private:
    std::vector<cplx> v_;
};

struct DensityOperator {
    Operator op;
    explicit DensityOperator(Operator o);  // validates hermiticity/psd/trace
    static DensityOperator pure(const StateVector& psi);
    int dim() const { return op.dim(); }
};

// --- operations -----------------------------------------------------------

Operator tensor(const Operator& A, const Operator& B);
StateVector tensor(const StateVector& a, const StateVector& b);

enum class Side { system, probe };
Operator partial_trace(const Operator& J, const BipartiteDims& dims, Side keep_side);

cplx expectation(const Operator& A, const StateVector& psi);
cplx expectation(const Operator& A, const DensityOperator& rho);
double variance(const Operator& A, const StateVector& psi);
double variance(const Operator& A, const DensityOperator& rho);
Operator commutator(const Operator& A, const Operator& B);

cplx inner(const StateVector& a, const StateVector& b);
Operator projector(const StateVector& psi);
// |a><b|
Operator outer(const StateVector& a, const StateVector& b);

double max_abs_diff(const Operator& A, const Operator& B);

}  // namespace way
