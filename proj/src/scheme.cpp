#include "way/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace way {

void OutcomeMap::validate(int num_eigenvalues) const {
    std::set<int> seen;
    std::set<std::string> labels;
    for (const auto& o : outcomes) {
        if (!labels.insert(o.label).second)
            throw ContractError("OutcomeMap: duplicate label '" + o.label + "'");
        for (int idx : o.eigen_indices) {
            if (idx < 0 || idx >= num_eigenvalues)
                throw ContractError("OutcomeMap: eigenvalue index out of range");
            if (!seen.insert(idx).second)
                throw ContractError("OutcomeMap: index sets not disjoint");
        }
    }
    if (static_cast<int>(seen.size()) != num_eigenvalues)
        throw ContractError("OutcomeMap: index sets do not cover all eigenvalues");
}

const OutcomeMap::Entry& OutcomeMap::find(const std::string& label) const {
    for (const auto& o : outcomes)
        if (o.label == label) return o;
    throw ContractError("OutcomeMap: unknown label '" + label + "'");
}

void MeasurementScheme::set_pointer(Operator newZ, OutcomeMap newH) {
    Z = std::move(newZ);
    h = std::move(newH);
    spectrum_.reset();
}

const MeasurementScheme::PointerSpectrum& MeasurementScheme::pointer_spectrum() const {
    if (spectrum_) return *spectrum_;
    const EigResult eig = hermitian_eig(Z);
    PointerSpectrum sp;
    // Merge eigenvalues within tol().eig_merge into one index.
    std::size_t k = 0;
    while (k < eig.values.size()) {
        std::size_t j = k + 1;
        while (j < eig.values.size() && eig.values[j] - eig.values[j - 1] <= tol().eig_merge)
            ++j;
        Operator proj(Z.dim());
        double vsum = 0.0;
        for (std::size_t c = k; c < j; ++c) {
            vsum += eig.values[c];
            for (int r = 0; r < Z.dim(); ++r)
                for (int s = 0; s < Z.dim(); ++s)
                    proj.at(r, s) += eig.vectors.at(r, static_cast<int>(c)) *
                                     std::conj(eig.vectors.at(s, static_cast<int>(c)));
        }
        sp.values.push_back(vsum / static_cast<double>(j - k));
        sp.projectors.push_back(std::move(proj));
        k = j;
    }
    spectrum_ = std::move(sp);
    return *spectrum_;
}

void MeasurementScheme::validate() const {
    if (U.dim() != dims.joint())
        throw DimensionError("MeasurementScheme: U dimension != dimS*dimP");
    if (probe.dim() != dims.dimP)
        throw DimensionError("MeasurementScheme: probe dimension mismatch");
    if (Z.dim() != dims.dimP)
        throw DimensionError("MeasurementScheme: pointer dimension mismatch");
    const double ud = unitarity_defect(U);
    if (ud > tol().unitary)
        throw ContractError("MeasurementScheme: U not unitary, ||U^dag U - 1|| = " +
                            std::to_string(ud));
    if (Z.hermiticity_defect() > tol().hermitian_input)
        throw ContractError("MeasurementScheme: pointer Z not Hermitian");
    probe.check_normalized();
    h.validate(static_cast<int>(pointer_spectrum().values.size()));
}

StateVector final_state(const MeasurementScheme& s, const StateVector& psi) {
    if (psi.dim() != s.dims.dimS)
        throw DimensionError("final_state: system state dimension mismatch");
    psi.check_normalized();
    StateVector joint = tensor(psi, s.probe);
    StateVector out(joint.dim());
    kernels::gemm(static_cast<std::size_t>(s.U.dim()), static_cast<std::size_t>(s.U.dim()),
                  1, s.U.data(), joint.data(), out.data(), false);
    return out;
}

Operator pointer_projector(const MeasurementScheme& s, const std::string& label) {
    const auto& entry = s.h.find(label);
    Operator P(s.dims.dimP);
    const auto& sp = s.pointer_spectrum();
    for (int idx : entry.eigen_indices) P += sp.projectors[static_cast<std::size_t>(idx)];
    return P;
}

namespace {

// Columns of U applied to |i> x phi for each system basis vector i; every
// induced quantity is an inner product of these.
std::vector<StateVector> coupled_basis_images(const MeasurementScheme& s) {
    std::vector<StateVector> cols;
    cols.reserve(static_cast<std::size_t>(s.dims.dimS));
    for (int i = 0; i < s.dims.dimS; ++i) {
        StateVector joint = tensor(StateVector::basis(s.dims.dimS, i), s.probe);
        StateVector out(joint.dim());
        kernels::gemm(static_cast<std::size_t>(s.U.dim()),
                      static_cast<std::size_t>(s.U.dim()), 1, s.U.data(), joint.data(),
                      out.data(), false);
        cols.push_back(std::move(out));
    }
    return cols;
}

// <col_i | (1 x P) | col_j> for a probe-side operator P.
cplx compress_entry(const StateVector& ci, const StateVector& cj, const Operator& P,
                    const BipartiteDims& dims) {
    cplx acc = 0.0;
    std::vector<cplx> tmp(static_cast<std::size_t>(dims.dimP));
    for (int sblock = 0; sblock < dims.dimS; ++sblock) {
        const cplx* cjp = cj.data() + static_cast<std::size_t>(sblock) * dims.dimP;
        const cplx* cip = ci.data() + static_cast<std::size_t>(sblock) * dims.dimP;
        kernels::gemm(static_cast<std::size_t>(dims.dimP),
                      static_cast<std::size_t>(dims.dimP), 1, P.data(), cjp, tmp.data(),
                      false);
        acc += kernels::dotc(static_cast<std::size_t>(dims.dimP), cip, tmp.data());
    }
    return acc;
}

}  // namespace

Povm induced_povm(const MeasurementScheme& s) {
    s.validate();
    const auto cols = coupled_basis_images(s);
    Povm povm;
    for (const auto& outcome : s.h.outcomes) {
        Operator P = pointer_projector(s, outcome.label);
        Operator E(s.dims.dimS);
        for (int i = 0; i < s.dims.dimS; ++i)
            for (int j = 0; j < s.dims.dimS; ++j)
                E.at(i, j) = compress_entry(cols[static_cast<std::size_t>(i)],
                                            cols[static_cast<std::size_t>(j)], P, s.dims);
        povm.effects.push_back({outcome.label, std::move(E)});
    }
    povm.validate();
    return povm;
}

void Povm::validate() const {
    if (effects.empty()) throw ContractError("Povm: no effects");
    const double cr = completeness_residual();
    if (cr > tol().povm_complete)
        throw ContractError("Povm: completeness residual " + std::to_string(cr));
    for (const auto& e : effects) {
        if (e.effect.hermiticity_defect() > tol().hermitian_input)
            throw ContractError("Povm: effect '" + e.label + "' not Hermitian");
        if (min_eigenvalue(e.effect) < -tol().effect_psd)
            throw ContractError("Povm: effect '" + e.label + "' not PSD");
    }
}

double Povm::completeness_residual() const {
    Operator sum(effects.front().effect.dim());
    for (const auto& e : effects) sum += e.effect;
    for (int i = 0; i < sum.dim(); ++i) sum.at(i, i) -= 1.0;
    return sum.max_abs();
}

double Povm::min_effect_eigenvalue() const {
    double best = 0.0;
    bool first = true;
    for (const auto& e : effects) {
        const double m = min_eigenvalue(e.effect);
        if (first || m < best) best = m;
        first = false;
    }
    return best;
}

const Operator& Povm::find(const std::string& label) const {
    for (const auto& e : effects)
        if (e.label == label) return e.effect;
    throw ContractError("Povm: unknown label '" + label + "'");
}

Operator ConservedPair::joint(const BipartiteDims& dims) const {
    return tensor(L1, Operator::identity(dims.dimP)) +
           tensor(Operator::identity(dims.dimS), L2);
}

double reproducibility_deviation(const MeasurementScheme& s, const Povm& target,
                                 const std::vector<StateVector>& test_states) {
    // Labels must coincide with h.
    for (const auto& o : s.h.outcomes) target.find(o.label);
    if (target.effects.size() != s.h.outcomes.size())
        throw ContractError("reproducibility_deviation: label sets differ");
    double worst = 0.0;
    for (const auto& psi : test_states) {
        const StateVector out = final_state(s, psi);
        for (const auto& o : s.h.outcomes) {
            const Operator P = pointer_projector(s, o.label);
            // pointer probability <Psi_f | 1 x P | Psi_f>
            cplx p = 0.0;
            std::vector<cplx> tmp(static_cast<std::size_t>(s.dims.dimP));
            for (int blk = 0; blk < s.dims.dimS; ++blk) {
                const cplx* seg = out.data() + static_cast<std::size_t>(blk) * s.dims.dimP;
                kernels::gemm(static_cast<std::size_t>(s.dims.dimP),
                              static_cast<std::size_t>(s.dims.dimP), 1, P.data(), seg,
                              tmp.data(), false);
                p += kernels::dotc(static_cast<std::size_t>(s.dims.dimP), seg, tmp.data());
            }
            const cplx q = expectation(target.find(o.label), psi);
            worst = std::max(worst, std::abs(p.real() - q.real()));
        }
    }
    return worst;
}

std::vector<ConditionalStateReport> conditional_states(const MeasurementScheme& s,
                                                       const StateVector& psi) {
    const StateVector out = final_state(s, psi);
    std::vector<ConditionalStateReport> reports;
    for (const auto& o : s.h.outcomes) {
        const Operator P = pointer_projector(s, o.label);
        // Apply 1 x P to |Psi_f>, then trace out the probe of the projected
        // pure state; P idempotent makes the symmetric sandwich equal this.
        StateVector proj(out.dim());
        for (int blk = 0; blk < s.dims.dimS; ++blk) {
            kernels::gemm(static_cast<std::size_t>(s.dims.dimP),
                          static_cast<std::size_t>(s.dims.dimP), 1, P.data(),
                          out.data() + static_cast<std::size_t>(blk) * s.dims.dimP,
                          proj.data() + static_cast<std::size_t>(blk) * s.dims.dimP,
                          false);
        }
        Operator rho(s.dims.dimS);
        for (int i = 0; i < s.dims.dimS; ++i)
            for (int j = 0; j < s.dims.dimS; ++j)
                rho.at(i, j) = kernels::dotc(
                    static_cast<std::size_t>(s.dims.dimP),
                    proj.data() + static_cast<std::size_t>(j) * s.dims.dimP,
                    proj.data() + static_cast<std::size_t>(i) * s.dims.dimP);
        ConditionalStateReport rep;
        rep.label = o.label;
        rep.probability = rho.trace().real();
        rep.rho_unnormalized = rho;
        if (rep.probability > tol().zero_probability) {
            Operator normalized = rho * cplx(1.0 / rep.probability, 0.0);
            rep.rho_normalized = DensityOperator(std::move(normalized));
        }
        reports.push_back(std::move(rep));
    }
    double total = 0.0;
    for (const auto& r : reports) total += r.probability;
    if (std::abs(total - 1.0) > tol().povm_complete)
        throw ContractError("conditional_states: probabilities sum to " +
                            std::to_string(total));
    return reports;
}

double repeatability_deviation(const MeasurementScheme& s,
                               const std::vector<StateVector>& test_states) {
    const Povm povm = induced_povm(s);
    double worst = 0.0;
    for (const auto& psi : test_states) {
        const auto reports = conditional_states(s, psi);
        for (const auto& r : reports) {
            if (r.probability <= 1e-9 || !r.rho_normalized) continue;
            const cplx v = expectation(povm.find(r.label), *r.rho_normalized);
            worst = std::max(worst, std::abs(v.real() - 1.0));
        }
    }
    return worst;
}

double conservation_residual(const MeasurementScheme& s, const ConservedPair& pair) {
    const Operator L = pair.joint(s.dims);
    const Operator moved = s.U.dagger() * L * s.U;
    return max_abs_diff(moved, L);
}

double yanase_residual(const MeasurementScheme& s, const ConservedPair& pair) {
    if (pair.L2.dim() != s.dims.dimP)
        throw DimensionError("yanase_residual: L2 dimension mismatch");
    return commutator(s.Z, pair.L2).max_abs();
}

// --- reference schemes ------------------------------------------------------

MeasurementScheme make_cnot_scheme() {
    MeasurementScheme s;
    s.dims = {2, 2};
    s.U = Operator(4);
    // CNOT, control = system (z basis), target = probe.
    s.U.at(0, 0) = 1.0;
    s.U.at(1, 1) = 1.0;
    s.U.at(2, 3) = 1.0;
    s.U.at(3, 2) = 1.0;
    s.probe = StateVector::basis(2, 0);
    s.Z = Operator(2);
    s.Z.at(0, 0) = 1.0;
    s.Z.at(1, 1) = -1.0;  // sigma_z pointer
    // ascending merged eigenvalues: index 0 -> -1 (|1>), index 1 -> +1 (|0>)
    s.h.outcomes = {{"1", {0}}, {"0", {1}}};
    return s;
}

MeasurementScheme make_trivial_scheme(int dimS, int dimP, const StateVector& probe,
                                      const Operator& Z) {
    MeasurementScheme s;
    s.dims = {dimS, dimP};
    s.U = Operator::identity(dimS * dimP);
    s.probe = probe;
    s.Z = Z;
    // one label per merged eigenvalue
    const auto& sp = s.pointer_spectrum();
    for (std::size_t k = 0; k < sp.values.size(); ++k) {
        std::ostringstream lab;
        lab << "z" << k;
        s.h.outcomes.push_back({lab.str(), {static_cast<int>(k)}});
    }
    return s;
}

// --- scheme file I/O --------------------------------------------------------

namespace {

struct TokenReader {
    std::istream& in;
    int line = 0;
    std::istringstream cur;

    explicit TokenReader(std::istream& s) : in(s) {}

    bool next_line() {
        std::string text;
        while (std::getline(in, text)) {
            ++line;
            if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            if (!text.empty() && text.back() == '\r') text.pop_back();
            cur.clear();
            cur.str(text);
            return true;
        }
        return false;
    }

    double read_double(const char* what) {
        double v;
        while (!(cur >> v)) {
            if (!cur.eof())
                throw ParseError("line " + std::to_string(line) + ": expected " + what);
            if (!next_line())
                throw ParseError("line " + std::to_string(line) +
                                 ": unexpected end of file reading " + what);
        }
        return v;
    }
};

Operator read_matrix_block(TokenReader& tr, int dim) {
    Operator M(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double re = tr.read_double("matrix entry (re)");
            const double im = tr.read_double("matrix entry (im)");
            M.at(i, j) = cplx(re, im);
        }
    return M;
}

}  // namespace

SchemeFile read_scheme_file(std::istream& in) {
    TokenReader tr(in);
    if (!tr.next_line()) throw ParseError("empty scheme file");
    std::string kw;
    tr.cur >> kw;
    if (kw != "dims") throw ParseError("line 1: expected 'dims <dimS> <dimP>'");
    int dimS = 0, dimP = 0;
    if (!(tr.cur >> dimS >> dimP) || dimS <= 0 || dimP <= 0)
        throw ParseError("line 1: bad dims");

    SchemeFile file;
    file.scheme.dims = {dimS, dimP};
    bool have_u = false, have_phi = false, have_z = false, have_h = false;

    while (tr.next_line()) {
        std::string key;
        tr.cur >> key;
        if (key == "U") {
            file.scheme.U = read_matrix_block(tr, dimS * dimP);
            have_u = true;
        } else if (key == "phi") {
            StateVector phi(dimP);
            for (int i = 0; i < dimP; ++i) {
                const double re = tr.read_double("phi entry (re)");
                const double im = tr.read_double("phi entry (im)");
                phi[i] = cplx(re, im);
            }
            file.scheme.probe = std::move(phi);
            have_phi = true;
        } else if (key == "Z") {
            file.scheme.Z = read_matrix_block(tr, dimP);
            have_z = true;
        } else if (key == "L1") {
            file.L1 = read_matrix_block(tr, dimS);
        } else if (key == "L2") {
            file.L2 = read_matrix_block(tr, dimP);
        } else if (key == "h") {
            while (tr.next_line()) {
                std::string label;
                tr.cur >> label;
                if (label.empty()) continue;
                if (label.back() != ':')
                    throw ParseError("line " + std::to_string(tr.line) +
                                     ": expected '<label>:' in h block");
                label.pop_back();
                OutcomeMap::Entry e;
                e.label = label;
                int idx;
                while (tr.cur >> idx) e.eigen_indices.insert(idx);
                file.scheme.h.outcomes.push_back(std::move(e));
            }
            have_h = true;
        } else {
            throw ParseError("line " + std::to_string(tr.line) + ": unknown block '" +
                             key + "'");
        }
    }
    if (!have_u || !have_phi || !have_z || !have_h)
        throw ParseError("scheme file missing required block (U, phi, Z, h)");
    return file;
}

SchemeFile read_scheme_file_path(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open scheme file: " + path);
    return read_scheme_file(f);
}

void write_scheme_file(std::ostream& out, const MeasurementScheme& s,
                       const Operator* L1, const Operator* L2) {
    auto put = [&out](cplx v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
        out << buf;
    };
    out << "dims " << s.dims.dimS << " " << s.dims.dimP << "\n";
    out << "U\n";
    const int J = s.dims.joint();
    for (int i = 0; i < J; ++i) {
        for (int j = 0; j < J; ++j) {
            if (j) out << " ";
            put(s.U.at(i, j));
        }
        out << "\n";
    }
    out << "phi\n";
    for (int i = 0; i < s.dims.dimP; ++i) {
        if (i) out << " ";
        put(s.probe[i]);
    }
    out << "\n";
    out << "Z\n";
    for (int i = 0; i < s.dims.dimP; ++i) {
        for (int j = 0; j < s.dims.dimP; ++j) {
            if (j) out << " ";
            put(s.Z.at(i, j));
        }
        out << "\n";
    }
    auto emit = [&](const char* name, const Operator& M) {
        out << name << "\n";
        for (int i = 0; i < M.dim(); ++i) {
            for (int j = 0; j < M.dim(); ++j) {
                if (j) out << " ";
                put(M.at(i, j));
            }
            out << "\n";
        }
    };
    if (L1) emit("L1", *L1);
    if (L2) emit("L2", *L2);
    out << "h\n";
    for (const auto& o : s.h.outcomes) {
        out << o.label << ":";
        for (int idx : o.eigen_indices) out << " " << idx;
        out << "\n";
    }
}

}  // namespace way
