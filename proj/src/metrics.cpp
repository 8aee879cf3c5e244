#include "way/metrics.hpp"

#include <cmath>

namespace way {

void MetricContext::validate() const {
    scheme.validate();
    if (M.dim() != scheme.dims.dimS)
        throw DimensionError("MetricContext: M dimension mismatch");
    if (M.hermiticity_defect() > tol().hermitian_input)
        throw ContractError("MetricContext: M not Hermitian");
    if (pair.L1.dim() != scheme.dims.dimS || pair.L2.dim() != scheme.dims.dimP)
        throw DimensionError("MetricContext: conserved pair dimension mismatch");
}

MetricContext MetricContext::with_probe(StateVector phi) const {
    Zf();
    Mf();
    noise_op();
    mu_op();
    Ljoint();
    yanase_applicable();
    MetricContext copy = *this;
    copy.scheme.probe = std::move(phi);
    return copy;
}

bool MetricContext::yanase_applicable() const {
    if (!yanase_ok_) {
        const double yr = yanase_residual(scheme, pair);
        const double cr = conservation_residual(scheme, pair);
        yanase_ok_ = yr <= 1e-8 && cr <= 1e-8;
    }
    return *yanase_ok_;
}

const Operator& MetricContext::Zf() const {
    if (!zf_) {
        const Operator ZJ = tensor(Operator::identity(scheme.dims.dimS), scheme.Z);
        zf_ = scheme.U.dagger() * ZJ * scheme.U;
    }
    return *zf_;
}

const Operator& MetricContext::Mf() const {
    if (!mf_) {
        const Operator MJ = tensor(M, Operator::identity(scheme.dims.dimP));
        mf_ = scheme.U.dagger() * MJ * scheme.U;
    }
    return *mf_;
}

const Operator& MetricContext::noise_op() const {
    if (!nop_) nop_ = Zf() - tensor(M, Operator::identity(scheme.dims.dimP));
    return *nop_;
}

const Operator& MetricContext::mu_op() const {
    if (!muop_) muop_ = Mf() - Zf();
    return *muop_;
}

const Operator& MetricContext::Ljoint() const {
    if (!lj_) lj_ = pair.joint(scheme.dims);
    return *lj_;
}

Operator heisenberg_pointer(const MetricContext& ctx) { return ctx.Zf(); }
Operator heisenberg_system(const MetricContext& ctx) { return ctx.Mf(); }

namespace {

StateVector joint_input(const MetricContext& ctx, const StateVector& psi) {
    psi.check_normalized();
    return tensor(psi, ctx.scheme.probe);
}

double rms_on(const Operator& A, const StateVector& joint) {
    const auto Av = A.apply(joint.vec());
    const double v = kernels::dotc(Av.size(), Av.data(), Av.data()).real();
    return std::sqrt(std::max(0.0, v));
}

// Probe-state compression of a squared joint operator onto the system factor:
// B_ij = <i x phi| A^dag A |j x phi>. sup_psi <psi x phi|A^dag A|psi x phi>
// is the top eigenvalue of B.
Operator compress_squared(const MetricContext& ctx, const Operator& A) {
    const int dS = ctx.scheme.dims.dimS;
    const int dP = ctx.scheme.dims.dimP;
    std::vector<std::vector<cplx>> cols;
    cols.reserve(static_cast<std::size_t>(dS));
    for (int i = 0; i < dS; ++i) {
        const StateVector e = tensor(StateVector::basis(dS, i), ctx.scheme.probe);
        cols.push_back(A.apply(e.vec()));
    }
    Operator B(dS);
    for (int i = 0; i < dS; ++i)
        for (int j = 0; j < dS; ++j)
            B.at(i, j) = kernels::dotc(static_cast<std::size_t>(dS) * dP,
                                       cols[static_cast<std::size_t>(i)].data(),
                                       cols[static_cast<std::size_t>(j)].data());
    return B;
}

struct RatioParts {
    double numerator;   // |<[A, L]>|^2
    double denominator; // 4 ((D_psi L1)^2 + (D_phi L2)^2)
    bool degenerate;
};

RatioParts bound_ratio(const MetricContext& ctx, const Operator& A,
                       const StateVector& psi) {
    const StateVector joint = joint_input(ctx, psi);
    // <[A, L]> evaluated as <A psi | L psi> - <L psi | A psi> to avoid
    // forming the joint commutator matrix.
    const auto Av = A.apply(joint.vec());
    const auto Lv = ctx.Ljoint().apply(joint.vec());
    const cplx al = kernels::dotc(Av.size(), Av.data(), Lv.data());
    const cplx la = kernels::dotc(Av.size(), Lv.data(), Av.data());
    const cplx comm = al - la;
    RatioParts parts;
    parts.numerator = std::norm(comm);
    double den = variance(ctx.pair.L1, psi);
    {
        StateVector phi = ctx.scheme.probe;
        den += variance(ctx.pair.L2, phi);
    }
    den *= 4.0;
    parts.degenerate = den < tol().denom_floor;
    parts.denominator = parts.degenerate ? tol().denom_floor : den;
    return parts;
}

}  // namespace

double noise(const MetricContext& ctx, const StateVector& psi) {
    return rms_on(ctx.noise_op(), joint_input(ctx, psi));
}

double global_noise(const MetricContext& ctx) {
    const Operator B = compress_squared(ctx, ctx.noise_op());
    return std::sqrt(std::max(0.0, max_eigenvalue(B)));
}

BoundValue ozawa_rhs_pointwise(const MetricContext& ctx, const StateVector& psi) {
    const RatioParts p = bound_ratio(ctx, ctx.noise_op(), psi);
    return {p.numerator / p.denominator, p.degenerate};
}

YanaseNumerator yanase_numerator(const MetricContext& ctx, const StateVector& psi) {
    YanaseNumerator out;
    out.applicable = ctx.yanase_applicable();
    const Operator c = commutator(ctx.M, ctx.pair.L1);
    out.value = std::norm(expectation(c, psi));
    return out;
}

double repeatability_noise(const MetricContext& ctx, const StateVector& psi) {
    return rms_on(ctx.mu_op(), joint_input(ctx, psi));
}

double global_repeatability_noise(const MetricContext& ctx) {
    const Operator B = compress_squared(ctx, ctx.mu_op());
    return std::sqrt(std::max(0.0, max_eigenvalue(B)));
}

BoundValue mu_rhs_pointwise(const MetricContext& ctx, const StateVector& psi) {
    const RatioParts p = bound_ratio(ctx, ctx.mu_op(), psi);
    return {p.numerator / p.denominator, p.degenerate};
}

PositionBound position_bound(const MetricContext& ctx, bool yanase_required) {
    PositionBound out;
    StateVector phi = ctx.scheme.probe;
    out.delta_pA_sq = variance(ctx.pair.L2, phi);
    if (out.delta_pA_sq < tol().denom_floor) return out;
    out.bound = hbar() * hbar() / (4.0 * out.delta_pA_sq);
    const double yr = yanase_residual(ctx.scheme, ctx.pair);
    out.applicable = !yanase_required || yr <= tol().lattice * hbar() * 10.0;
    return out;
}

BoundReport bound_report(const MetricContext& ctx, const StateVector& psi, int index) {
    BoundReport r;
    r.state_index = index;
    const double eps = noise(ctx, psi);
    r.epsilon_sq = eps * eps;
    const BoundValue rhs = ozawa_rhs_pointwise(ctx, psi);
    r.rhs_generic = rhs.value;
    r.degenerate = rhs.degenerate_denominator;
    const YanaseNumerator yn = yanase_numerator(ctx, psi);
    r.rhs_yanase = yn.value;
    const double mu = repeatability_noise(ctx, psi);
    r.mu_sq = mu * mu;
    const BoundValue mu_rhs = mu_rhs_pointwise(ctx, psi);
    r.rhs_mu = mu_rhs.value;
    r.degenerate = r.degenerate || mu_rhs.degenerate_denominator;
    r.slack_eps = r.epsilon_sq - r.rhs_generic;
    r.slack_mu = r.mu_sq - r.rhs_mu;
    return r;
}

}  // namespace way
