#pragma once

#include <optional>

#include "way/scheme.hpp"

namespace way {

// Error / repeatability metrics and the conservation-law trade-off bounds.

struct MetricContext {
    MeasurementScheme scheme;
    Operator M;          // target observable on dimS, Hermitian
    ConservedPair pair;  // (L1 on dimS, L2 on dimP)

    void validate() const;

    // Same context with a different probe preparation. The Heisenberg
    // operators do not depend on the probe state, so their caches carry over.
    MetricContext with_probe(StateVector phi) const;

    // Cached Heisenberg pictures and noise operators (joint space).
    const Operator& Zf() const;        // U^dag (1 x Z) U
    const Operator& Mf() const;        // U^dag (M x 1) U
    const Operator& noise_op() const;  // Zf - M x 1
    const Operator& mu_op() const;     // Mf - Zf
    const Operator& Ljoint() const;    // L1 x 1 + 1 x L2
    // Yanase + conservation residuals within 1e-8 (cached; probe-independent).
    bool yanase_applicable() const;

  private:
    mutable std::optional<Operator> zf_, mf_, nop_, muop_, lj_;
    mutable std::optional<bool> yanase_ok_;
};

Operator heisenberg_pointer(const MetricContext& ctx);
Operator heisenberg_system(const MetricContext& ctx);

// eps(psi): RMS of the noise operator on psi x phi.
double noise(const MetricContext& ctx, const StateVector& psi);
// eps = sup_psi eps(psi) = sqrt(lambda_max of probe-compressed N^2).
double global_noise(const MetricContext& ctx);

struct BoundValue {
    double value = 0.0;
    bool degenerate_denominator = false;  // denominator hit the floor
};

// RHS of the Ozawa inequality: |<[Zf - M, L1 + L2]>|^2 / (4 (D_psi L1)^2 + 4 (D_phi L2)^2).
BoundValue ozawa_rhs_pointwise(const MetricContext& ctx, const StateVector& psi);

struct YanaseNumerator {
    double value = 0.0;
    bool applicable = false;  // Yanase + conservation residuals within tolerance
};
YanaseNumerator yanase_numerator(const MetricContext& ctx, const StateVector& psi);

// mu(psi): RMS of Mf - Zf on psi x phi, and its global sup.
double repeatability_noise(const MetricContext& ctx, const StateVector& psi);
double global_repeatability_noise(const MetricContext& ctx);

BoundValue mu_rhs_pointwise(const MetricContext& ctx, const StateVector& psi);

// Eq. (7)-type bound hbar^2 / (4 (D_phi L2)^2); applicability flags mirror
// the position-measurement preconditions.
struct PositionBound {
    double bound = 0.0;
    double delta_pA_sq = 0.0;
    bool applicable = false;
};
PositionBound position_bound(const MetricContext& ctx, bool yanase_required = true);

struct BoundReport {
    int state_index = -1;
    double epsilon_sq = 0.0;
    double rhs_generic = 0.0;   // Eq. (5) RHS
    double rhs_yanase = 0.0;    // |<[M, L1]>|^2 variant (when applicable)
    double mu_sq = 0.0;
    double rhs_mu = 0.0;        // Eq. (8) RHS
    double slack_eps = 0.0;     // epsilon_sq - rhs_generic
    double slack_mu = 0.0;
    bool degenerate = false;
};

BoundReport bound_report(const MetricContext& ctx, const StateVector& psi, int index);

}  // namespace way
