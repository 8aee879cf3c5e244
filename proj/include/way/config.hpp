#pragma once

#include <cstdint>
#include <string>

namespace way {

// Central numerics table. Every tolerance used by the library reads from
// here; the CLI can override individual entries via --tolerance key=value.
struct Tolerances {
    double hermitian = 1e-12;        // ||A - A^dag||_max for hermitian(A)
    double hermitian_input = 1e-10;  // precondition checks on Hermitian inputs
    double state_norm = 1e-10;
    double density = 1e-10;          // trace/psd slack on density operators
    double unitary = 1e-9;           // ||U^dag U - 1||_max
    double povm_complete = 1e-9;
    double effect_psd = 1e-10;
    double probability = 1e-10;
    double zero_probability = 1e-12; // below this, no normalized conditional state
    double eig_merge = 1e-8;         // pointer eigenvalue degeneracy merge
    double variance_clamp = 1e-12;
    double wigner_residual = 1e-8;
    double lattice = 1e-6;           // admissible-state checks, in units of hbar
    double admissible_mass = 1e-6;   // tail mass outside central half (see notes)
    double slack = 1e-9;             // inequality slack floor
    double denom_floor = 1e-14;      // degenerate denominators in bound ratios
};

struct Config {
    double hbar = 1.0;
    int max_joint_dim = 4096;
    std::uint64_t seed = 42;
    int threads = 1;
    bool deterministic = false;
    Tolerances tol;
};

// Process-wide configuration. Immutable in normal library use; the CLI sets
// it once at startup before any work is dispatched.
Config& config();

inline double hbar() { return config().hbar; }
inline const Tolerances& tol() { return config().tol; }

// Set one named tolerance, e.g. "unitary=1e-8". Returns false on unknown key.
bool set_tolerance(Config& cfg, const std::string& key, double value);

inline constexpr const char* kToolVersion = "way 1.0.0";

}  // namespace way
