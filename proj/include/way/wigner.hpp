#pragma once

#include <string>
#include <vector>

#include "way/scheme.hpp"

namespace way {

// Wigner's spin-1/2 model under s_z + J_z conservation. System dimension 2
// in the z basis; probe levels carry consecutive-integer J_z eigenvalues.

enum class ProbeProfile { uniform, optimize, custom };

struct WignerProbeSpec {
    int n = 1;                       // populated J_z levels
    ProbeProfile profile = ProbeProfile::uniform;
    std::vector<double> weights;     // custom only; sum of squares = 1
    int buffer = 2;                  // padding levels on each end
    int probe_dim() const { return n + 2 * buffer; }
    void validate() const;
};

struct SectorDecomposition {
    // Eigenvalue of Lambda = s_z x 1 + 1 x J_z and the joint basis indices
    // belonging to that eigenvalue (1 or 2 of them, system-major index).
    struct Sector {
        double lambda;
        std::vector<int> joint_indices;
    };
    std::vector<Sector> sectors;
};

SectorDecomposition build_sectors(int probe_dim);

struct WignerModel {
    int n = 0;
    std::vector<double> weights;   // probe amplitudes on the populated window
    Operator U;                    // joint unitary (2*probe_dim)
    StateVector pointer_plus;      // normalized; zero vector in the degenerate n=1 case
    StateVector pointer_minus;
    StateVector eta;               // unnormalized malfunction vector
    double eta_sq = 0.0;           // ||eta||^2, the paper's law quantity
    double malfunction_weight = 0.0;  // operational "?" weight of the induced POVM
    double form_residual = 0.0;       // cross-term mismatch ||B+ + B-||
    double conservation_residual = 0.0;
    double orthogonality_residual = 0.0;  // max over <eta|p+->, <p+|p->
    MeasurementScheme scheme;

    // Raw images decomposed in the system s_x basis: U(phi_pm x phi) =
    // phi_pm x A_pm + phi_mp x B_pm.
    StateVector A_plus, B_plus, A_minus, B_minus;
};

struct ConstructionError : std::runtime_error {
    double best_residual;
    ConstructionError(const std::string& what, double r)
        : std::runtime_error(what), best_residual(r) {}
};

WignerModel build_wigner_model(const WignerProbeSpec& spec);

// Minimized ||eta||^2 over per-sector unitaries (and probe weights for
// ProbeProfile::optimize), subject to the coupling-form constraints.
struct EtaMinimum {
    double eta_sq;
    double formula;              // 1/(2n-1)
    double deviation;            // eta_sq - formula
    std::vector<double> weights; // achieving profile
    double constraint_residual;
};
EtaMinimum minimal_eta_norm(const WignerProbeSpec& spec);

struct ScalingRow {
    int n;
    double eta_sq;
    double formula_value;  // 1/(2n-1)
    double ratio;
    double conservation_residual;
    double form_residual;
    bool failed = false;
    std::string error;
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    double loglog_slope;  // least-squares slope of log(eta_sq) vs log(n)
};

ScalingStudy scaling_study(int n_min, int n_max, ProbeProfile profile);

Povm effects_from_model(const WignerModel& model);

// s_x eigenstates of the system qubit, |+> and |->.
StateVector spin_x_plus();
StateVector spin_x_minus();
Operator spin_sz();  // diag(1/2, -1/2)
Operator spin_sx();
Operator probe_jz(int probe_dim, int buffer);  // consecutive integers, window-centered

}  // namespace way
