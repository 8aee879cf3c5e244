#pragma once

#include <vector>

#include "way/metrics.hpp"
#include "way/scheme.hpp"

namespace way {

// Finite cyclic lattice realization of position/momentum. Q is diagonal in
// the site basis; P = F^dag diag(k) F with F the centered discrete Fourier
// transform. Canonical commutation holds on admissible states only.
struct Lattice {
    int N = 32;      // sites
    double a = 1.0;  // spacing

    void validate() const;  // N >= 8
    double position(int j) const { return a * (j - N / 2); }
    double momentum(int m) const;
    std::vector<double> positions() const;
    std::vector<double> momenta() const;
};

struct LatticeOps {
    Operator Q, P;      // system copy
    Operator Q_A, P_A;  // probe copy (identical construction)
    Operator F;         // centered DFT, unitary
};
LatticeOps build_lattice_ops(const Lattice& lat);

struct SmearKernel {
    std::vector<double> weights;  // e_j >= 0 on sites, sum = 1
    void validate(int N) const;   // also enforces support <= N/4
    double width() const;         // circular standard deviation in site units
};

Povm smeared_position_povm(const Lattice& lat, const SmearKernel& e,
                           const std::vector<std::vector<int>>& bins);

// Discretized Gaussian wave packets with cyclic-boundary admissibility.
struct AdmissibleStateFamily {
    Lattice lat;
    double center = 0.0;   // position offset in length units
    double k0 = 0.0;       // momentum offset
    double sigma = 2.0;    // position-space width (length units)

    StateVector make() const;
    static bool admissible(const Lattice& lat, const StateVector& psi,
                           const Operator& F, double mass_tol);
};

// Non-conserving baseline: U = exp(-i lambda Q x P_A / hbar), pointer Q_A.
MeasurementScheme preset_von_neumann(const Lattice& lat, double lambda,
                                     double probe_sigma);

// Momentum-conserving preset, pointer Q_A (Yanase violated):
// H = lambda ((Q - Q_A)(P + P_A) + h.c.)/2.
MeasurementScheme preset_conserving(const Lattice& lat, double lambda,
                                    double probe_sigma);

// Momentum-conserving, Yanase-satisfying preset: H = lambda (Q - Q_A)^2 / 2,
// pointer Z = P_A / lambda (momentum-kick readout of position).
MeasurementScheme preset_conserving_yanase(const Lattice& lat, double lambda,
                                           double probe_sigma);

double relative_position_check(const Lattice& lat,
                               const std::vector<StateVector>& joint_states);

struct KernelExtraction {
    SmearKernel kernel;
    double width = 0.0;        // standard deviation in length units
    double residual = 0.0;     // deconvolution least-squares residual
    double off_diagonal = 0.0; // off-diagonal mass of the induced effects
    bool ill_posed = false;
};
KernelExtraction kernel_extraction(const MeasurementScheme& scheme, const Lattice& lat);

// Total-variation distance between pointer outcome distributions of two
// admissible packets; the information-transfer check of the presets.
double information_transfer(const MeasurementScheme& scheme, const Lattice& lat,
                            double separation);

// Nonnegative least squares min ||A x - b||, x >= 0 (small dense problems).
std::vector<double> nnls(const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b, double* residual);

}  // namespace way
