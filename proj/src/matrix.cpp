#include "way/matrix.hpp"

#include <cmath>

namespace way {

Operator Operator::identity(int dim) {
    Operator I(dim);
    for (int i = 0; i < dim; ++i) I.at(i, i) = 1.0;
    return I;
}

Operator Operator::diag(const std::vector<double>& d) {
    Operator D(static_cast<int>(d.size()));
    for (int i = 0; i < D.dim(); ++i) D.at(i, i) = d[static_cast<std::size_t>(i)];
    return D;
}

Operator Operator::dagger() const {
    Operator R(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) R.at(j, i) = std::conj(at(i, j));
    return R;
}

Operator Operator::transpose() const {
    Operator R(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) R.at(j, i) = at(i, j);
    return R;
}

Operator Operator::conj() const {
    Operator R(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) R.a_[i] = std::conj(a_[i]);
    return R;
}

Operator Operator::operator*(const Operator& o) const {
    if (dim_ != o.dim_) throw DimensionError("Operator*: dimension mismatch");
    Operator R(dim_);
    kernels::gemm(dim_, dim_, dim_, data(), o.data(), R.data(), false);
    return R;
}

Operator Operator::operator+(const Operator& o) const {
    Operator R = *this;
    R += o;
    return R;
}

Operator Operator::operator-(const Operator& o) const {
    Operator R = *this;
    R -= o;
    return R;
}

Operator Operator::operator*(cplx s) const {
    Operator R(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) R.a_[i] = a_[i] * s;
    return R;
}

Operator& Operator::operator+=(const Operator& o) {
    if (dim_ != o.dim_) throw DimensionError("Operator+=: dimension mismatch");
    kernels::axpy(a_.size(), 1.0, o.data(), data());
    return *this;
}

Operator& Operator::operator-=(const Operator& o) {
    if (dim_ != o.dim_) throw DimensionError("Operator-=: dimension mismatch");
    kernels::axpy(a_.size(), -1.0, o.data(), data());
    return *this;
}

std::vector<cplx> Operator::apply(const std::vector<cplx>& v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw DimensionError("Operator::apply: dimension mismatch");
    std::vector<cplx> r(v.size());
    kernels::gemm(dim_, dim_, 1, data(), v.data(), r.data(), false);
    return r;
}

cplx Operator::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
}

double Operator::max_abs() const {
    return kernels::max_abs_diff(a_.size(), data(), nullptr);
}

double Operator::hermiticity_defect() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            const double v = std::abs(at(i, j) - std::conj(at(j, i)));
            if (v > best) best = v;
        }
    return best;
}

bool Operator::is_hermitian(double tolerance) const {
    return hermiticity_defect() <= tolerance;
}

StateVector StateVector::basis(int dim, int k) {
    StateVector v(dim);
    v[k] = 1.0;
    return v;
}

double StateVector::norm() const {
    return std::sqrt(kernels::dotc(v_.size(), data(), data()).real());
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) throw NumericError("StateVector::normalize: zero vector");
    for (auto& c : v_) c /= n;
}

void StateVector::check_normalized() const {
    if (std::abs(norm() - 1.0) > tol().state_norm)
        throw ContractError("StateVector: not normalized");
}

DensityOperator::DensityOperator(Operator o) : op(std::move(o)) {
    if (op.hermiticity_defect() > tol().density)
        throw ContractError("DensityOperator: not Hermitian");
    if (std::abs(op.trace().real() - 1.0) > tol().density ||
        std::abs(op.trace().imag()) > tol().density)
        throw ContractError("DensityOperator: trace != 1");
    // PSD check happens where eigenvalues are available (eigen.cpp callers);
    // diagonal negativity is caught cheaply here.
    for (int i = 0; i < op.dim(); ++i)
        if (op.at(i, i).real() < -tol().density)
            throw ContractError("DensityOperator: negative diagonal");
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
    return DensityOperator(projector(psi));
}

Operator tensor(const Operator& A, const Operator& B) {
    const long long joint = static_cast<long long>(A.dim()) * B.dim();
    if (joint > config().max_joint_dim)
        throw CapacityError("tensor: joint dimension exceeds configured maximum");
    Operator R(static_cast<int>(joint));
    const int dB = B.dim();
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            const cplx a = A.at(i, j);
            if (a == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < dB; ++k)
                for (int l = 0; l < dB; ++l)
                    R.at(i * dB + k, j * dB + l) = a * B.at(k, l);
        }
    return R;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    StateVector r(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) r[i * b.dim() + j] = a[i] * b[j];
    return r;
}

Operator partial_trace(const Operator& J, const BipartiteDims& dims, Side keep_side) {
    if (J.dim() != dims.joint())
        throw DimensionError("partial_trace: joint dimension mismatch");
    const int dS = dims.dimS, dP = dims.dimP;
    if (keep_side == Side::system) {
        Operator R(dS);
        for (int i = 0; i < dS; ++i)
            for (int j = 0; j < dS; ++j) {
                cplx s = 0.0;
                for (int p = 0; p < dP; ++p) s += J.at(i * dP + p, j * dP + p);
                R.at(i, j) = s;
            }
        return R;
    }
    Operator R(dP);
    for (int p = 0; p < dP; ++p)
        for (int q = 0; q < dP; ++q) {
            cplx s = 0.0;
            for (int i = 0; i < dS; ++i) s += J.at(i * dP + p, i * dP + q);
            R.at(p, q) = s;
        }
    return R;
}

cplx expectation(const Operator& A, const StateVector& psi) {
    if (A.dim() != psi.dim()) throw DimensionError("expectation: dimension mismatch");
    const auto Apsi = A.apply(psi.vec());
    return kernels::dotc(Apsi.size(), psi.data(), Apsi.data());
}

cplx expectation(const Operator& A, const DensityOperator& rho) {
    if (A.dim() != rho.dim()) throw DimensionError("expectation: dimension mismatch");
    cplx t = 0.0;
    for (int i = 0; i < A.dim(); ++i)
        for (int k = 0; k < A.dim(); ++k) t += rho.op.at(i, k) * A.at(k, i);
    return t;
}

namespace {

double variance_impl(const Operator& A, const cplx mean, const cplx mean_sq) {
    (void)A;
    double v = mean_sq.real() - std::norm(mean);
    if (v < -tol().variance_clamp)
        throw NumericError("variance: negative beyond clamp tolerance");
    return v < 0.0 ? 0.0 : v;
}

}  // namespace

double variance(const Operator& A, const StateVector& psi) {
    if (A.hermiticity_defect() > tol().hermitian_input)
        throw ContractError("variance: operator not Hermitian");
    const auto Apsi = A.apply(psi.vec());
    const cplx mean = kernels::dotc(Apsi.size(), psi.data(), Apsi.data());
    const cplx mean_sq = kernels::dotc(Apsi.size(), Apsi.data(), Apsi.data());
    return variance_impl(A, mean, mean_sq);
}

double variance(const Operator& A, const DensityOperator& rho) {
    if (A.hermiticity_defect() > tol().hermitian_input)
        throw ContractError("variance: operator not Hermitian");
    const cplx mean = expectation(A, rho);
    const cplx mean_sq = expectation(A * A, rho);
    return variance_impl(A, mean, mean_sq);
}

Operator commutator(const Operator& A, const Operator& B) {
    if (A.dim() != B.dim()) throw DimensionError("commutator: dimension mismatch");
    Operator R(A.dim());
    kernels::gemm(A.dim(), A.dim(), A.dim(), A.data(), B.data(), R.data(), false);
    Operator BA(A.dim());
    kernels::gemm(A.dim(), A.dim(), A.dim(), B.data(), A.data(), BA.data(), false);
    R -= BA;
    return R;
}

cplx inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("inner: dimension mismatch");
    return kernels::dotc(static_cast<std::size_t>(a.dim()), a.data(), b.data());
}

Operator projector(const StateVector& psi) { return outer(psi, psi); }

Operator outer(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("outer: dimension mismatch");
    Operator R(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) R.at(i, j) = a[i] * std::conj(b[j]);
    return R;
}

double max_abs_diff(const Operator& A, const Operator& B) {
    if (A.dim() != B.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
    return kernels::max_abs_diff(static_cast<std::size_t>(A.dim()) * A.dim(),
                                 A.data(), B.data());
}

}  // namespace way
