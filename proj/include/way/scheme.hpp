#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "way/eigen.hpp"
#include "way/matrix.hpp"

namespace way {

// Pointer-value coarse graining: labels over indices into the ascending,
// degeneracy-merged eigenvalue list of Z. Index sets are disjoint and total.
struct OutcomeMap {
    struct Entry {
        std::string label;
        std::set<int> eigen_indices;
    };
    std::vector<Entry> outcomes;

    void validate(int num_eigenvalues) const;
    const Entry& find(const std::string& label) const;
};

// The measurement quintuple <K, U, phi, Z, h>.
struct MeasurementScheme {
    BipartiteDims dims;
    Operator U;          // joint unitary, system-major index convention
    StateVector probe;   // initial probe state phi on dimP
    Operator Z;          // Hermitian pointer observable on dimP
    OutcomeMap h;

    void validate() const;

    // Replace the pointer observable and outcome map together; resets the
    // cached spectrum (schemes are otherwise immutable after validation).
    void set_pointer(Operator newZ, OutcomeMap newH);

    // Ascending Z eigenvalues with near-degenerate values merged, and the
    // projector onto each merged eigenspace. Computed once, cached.
    struct PointerSpectrum {
        std::vector<double> values;
        std::vector<Operator> projectors;
    };
    const PointerSpectrum& pointer_spectrum() const;

  private:
    mutable std::optional<PointerSpectrum> spectrum_;
};

struct Povm {
    struct Effect {
        std::string label;
        Operator effect;
    };
    std::vector<Effect> effects;

    void validate() const;  // hermitian, psd, complete
    double completeness_residual() const;
    double min_effect_eigenvalue() const;
    const Operator& find(const std::string& label) const;
};

struct ConservedPair {
    Operator L1;  // on dimS
    Operator L2;  // on dimP
    Operator joint(const BipartiteDims& dims) const;  // L1 x 1 + 1 x L2
};

struct ConditionalStateReport {
    std::string label;
    Operator rho_unnormalized;  // on dimS
    double probability = 0.0;
    std::optional<DensityOperator> rho_normalized;  // absent when p ~ 0
};

// --- operations -----------------------------------------------------------

StateVector final_state(const MeasurementScheme& s, const StateVector& psi);
Operator pointer_projector(const MeasurementScheme& s, const std::string& label);
Povm induced_povm(const MeasurementScheme& s);
double reproducibility_deviation(const MeasurementScheme& s, const Povm& target,
                                 const std::vector<StateVector>& test_states);
std::vector<ConditionalStateReport> conditional_states(const MeasurementScheme& s,
                                                       const StateVector& psi);
double repeatability_deviation(const MeasurementScheme& s,
                               const std::vector<StateVector>& test_states);
double conservation_residual(const MeasurementScheme& s, const ConservedPair& pair);
double yanase_residual(const MeasurementScheme& s, const ConservedPair& pair);

// Scheme file format (consumed by `way audit`): see README / spec of the
// format in scheme.cpp. Parse errors carry 1-based line numbers.
struct SchemeFile {
    MeasurementScheme scheme;
    std::optional<Operator> L1;
    std::optional<Operator> L2;
};
SchemeFile read_scheme_file(std::istream& in);
SchemeFile read_scheme_file_path(const std::string& path);
void write_scheme_file(std::ostream& out, const MeasurementScheme& s,
                       const Operator* L1 = nullptr, const Operator* L2 = nullptr);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reference two-qubit schemes used across tests and the CLI.
MeasurementScheme make_cnot_scheme();
MeasurementScheme make_trivial_scheme(int dimS, int dimP, const StateVector& probe,
                                      const Operator& Z);

}  // namespace way
