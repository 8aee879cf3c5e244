#include "way/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace way {

void Lattice::validate() const {
    if (N < 8) throw ContractError("Lattice: N >= 8 required");
    if (a <= 0.0) throw ContractError("Lattice: spacing must be positive");
}

double Lattice::momentum(int m) const {
    return (2.0 * M_PI * hbar() / (N * a)) * (m - N / 2);
}

std::vector<double> Lattice::positions() const {
    std::vector<double> x(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) x[static_cast<std::size_t>(j)] = position(j);
    return x;
}

std::vector<double> Lattice::momenta() const {
    std::vector<double> k(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) k[static_cast<std::size_t>(m)] = momentum(m);
    return k;
}

LatticeOps build_lattice_ops(const Lattice& lat) {
    lat.validate();
    const int N = lat.N;
    LatticeOps ops;
    ops.Q = Operator::diag(lat.positions());
    ops.F = Operator(N);
    const auto x = lat.positions();
    const auto k = lat.momenta();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(N));
    for (int m = 0; m < N; ++m)
        for (int j = 0; j < N; ++j) {
            const double arg = -k[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(j)] / hbar();
            ops.F.at(m, j) = cplx(std::cos(arg), std::sin(arg)) * inv_sqrt;
        }
    // P = F^dag diag(k) F
    Operator DK = Operator::diag(k);
    ops.P = ops.F.dagger() * DK * ops.F;
    // clean the numerically-zero anti-Hermitian part
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            const cplx avg = 0.5 * (ops.P.at(i, j) + std::conj(ops.P.at(j, i)));
            ops.P.at(i, j) = avg;
            ops.P.at(j, i) = std::conj(avg);
        }
    ops.Q_A = ops.Q;
    ops.P_A = ops.P;
    return ops;
}

void SmearKernel::validate(int N) const {
    if (static_cast<int>(weights.size()) != N)
        throw ContractError("SmearKernel: size mismatch");
    double sum = 0.0;
    int support = 0;
    for (double w : weights) {
        if (w < 0.0) throw ContractError("SmearKernel: negative weight");
        if (w > 0.0) ++support;
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ContractError("SmearKernel: weights do not sum to 1");
    if (support > N / 4)
        throw ContractError("SmearKernel: support exceeds N/4 (wrap-around risk)");
}

double SmearKernel::width() const {
    const int N = static_cast<int>(weights.size());
    double mean = 0.0, m2 = 0.0;
    for (int j = 0; j < N; ++j) {
        const int off = ((j + N / 2) % N) - N / 2;  // signed circular offset
        mean += weights[static_cast<std::size_t>(j)] * off;
    }
    for (int j = 0; j < N; ++j) {
        const int off = ((j + N / 2) % N) - N / 2;
        m2 += weights[static_cast<std::size_t>(j)] * (off - mean) * (off - mean);
    }
    return std::sqrt(std::max(0.0, m2));
}

Povm smeared_position_povm(const Lattice& lat, const SmearKernel& e,
                           const std::vector<std::vector<int>>& bins) {
    lat.validate();
    e.validate(lat.N);
    const int N = lat.N;
    std::vector<bool> seen(static_cast<std::size_t>(N), false);
    for (const auto& bin : bins)
        for (int m : bin) {
            if (m < 0 || m >= N) throw ContractError("smeared_position_povm: bad site");
            if (seen[static_cast<std::size_t>(m)])
                throw ContractError("smeared_position_povm: bins overlap");
            seen[static_cast<std::size_t>(m)] = true;
        }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw ContractError("smeared_position_povm: bins do not cover all sites");

    Povm povm;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        Operator E(N);
        for (int j = 0; j < N; ++j) {
            double v = 0.0;
            for (int m : bins[b]) v += e.weights[static_cast<std::size_t>(((j - m) % N + N) % N)];
            E.at(j, j) = v;
        }
        povm.effects.push_back({"bin" + std::to_string(b), std::move(E)});
    }
    povm.validate();
    return povm;
}

StateVector AdmissibleStateFamily::make() const {
    lat.validate();
    StateVector psi(lat.N);
    for (int j = 0; j < lat.N; ++j) {
        const double x = lat.position(j);
        const double amp = std::exp(-(x - center) * (x - center) / (4.0 * sigma * sigma));
        const double phase = k0 * x / hbar();
        psi[j] = amp * cplx(std::cos(phase), std::sin(phase));
    }
    psi.normalize();
    return psi;
}

bool AdmissibleStateFamily::admissible(const Lattice& lat, const StateVector& psi,
                                       const Operator& F, double mass_tol) {
    const double half_x = lat.N * lat.a / 4.0;
    double pos_tail = 0.0;
    for (int j = 0; j < lat.N; ++j)
        if (std::abs(lat.position(j)) > half_x) pos_tail += std::norm(psi[j]);
    if (pos_tail > mass_tol) return false;
    const auto tilde = F.apply(psi.vec());
    const double half_k = M_PI * hbar() / (2.0 * lat.a);
    double mom_tail = 0.0;
    for (int m = 0; m < lat.N; ++m)
        if (std::abs(lat.momentum(m)) > half_k) mom_tail += std::norm(tilde[static_cast<std::size_t>(m)]);
    return mom_tail <= mass_tol;
}

namespace {

// Relative coordinate on the cyclic lattice: equals x_j - x_p on the bulk,
// wraps symmetrically, and tapers to zero near the wrap seam so that the
// generated dynamics respects the lattice translation structure. On
// admissible states it is indistinguishable from Q - Q_A.
double cyclic_relative(const Lattice& lat, int j, int p) {
    const int N = lat.N;
    const int w = ((j - p + N / 2) % N + N) % N - N / 2;
    const double bulk = N / 2.0 - 6.0;
    const double edge = N / 2.0;
    const double aw = std::abs(static_cast<double>(w));
    if (aw <= bulk) return lat.a * w;
    if (aw >= edge) return 0.0;
    const double t = (aw - bulk) / (edge - bulk);
    return lat.a * w * 0.5 * (1.0 + std::cos(M_PI * t));
}

OutcomeMap site_outcomes(int count, const char* prefix) {
    OutcomeMap h;
    for (int i = 0; i < count; ++i)
        h.outcomes.push_back({prefix + std::to_string(i), {i}});
    return h;
}

StateVector gaussian_probe(const Lattice& lat, double sigma) {
    AdmissibleStateFamily fam;
    fam.lat = lat;
    fam.sigma = sigma;
    return fam.make();
}

}  // namespace

MeasurementScheme preset_von_neumann(const Lattice& lat, double lambda,
                                     double probe_sigma) {
    lat.validate();
    if (lambda <= 0.0) throw ContractError("preset_von_neumann: lambda > 0 required");
    const int N = lat.N;
    const LatticeOps ops = build_lattice_ops(lat);
    // U = exp(-i lambda Q x P_A / hbar) is block diagonal over system sites:
    // for site j, the probe factor is F^dag diag(exp(-i lambda x_j k / hbar)) F.
    MeasurementScheme s;
    s.dims = {N, N};
    s.U = Operator(N * N);
    const auto x = lat.positions();
    const auto k = lat.momenta();
    for (int j = 0; j < N; ++j) {
        Operator D(N);
        for (int m = 0; m < N; ++m) {
            const double arg = -lambda * x[static_cast<std::size_t>(j)] *
                               k[static_cast<std::size_t>(m)] / hbar();
            D.at(m, m) = cplx(std::cos(arg), std::sin(arg));
        }
        const Operator W = ops.F.dagger() * D * ops.F;
        for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q) s.U.at(j * N + p, j * N + q) = W.at(p, q);
    }
    s.probe = gaussian_probe(lat, probe_sigma);
    s.Z = ops.Q_A;
    s.h = site_outcomes(N, "s");
    return s;
}

MeasurementScheme preset_conserving(const Lattice& lat, double lambda,
                                    double probe_sigma) {
    lat.validate();
    if (lambda <= 0.0) throw ContractError("preset_conserving: lambda > 0 required");
    const int N = lat.N;
    const LatticeOps ops = build_lattice_ops(lat);
    // H = lambda ((Q - Q_A)(P + P_A) + h.c.)/2 with the relative coordinate
    // realized cyclically (bulk-identical to Q - Q_A). The diagonal factor
    // makes both products row/column scalings of P + P_A.
    Operator Ptot = tensor(ops.P, Operator::identity(N)) +
                    tensor(Operator::identity(N), ops.P_A);
    std::vector<double> qrel(static_cast<std::size_t>(N) * N);
    for (int j = 0; j < N; ++j)
        for (int p = 0; p < N; ++p)
            qrel[static_cast<std::size_t>(j) * N + p] = cyclic_relative(lat, j, p);
    Operator H(N * N);
    for (int r = 0; r < N * N; ++r)
        for (int c = 0; c < N * N; ++c)
            H.at(r, c) = 0.5 * lambda *
                         (qrel[static_cast<std::size_t>(r)] + qrel[static_cast<std::size_t>(c)]) *
                         Ptot.at(r, c);
    MeasurementScheme s;
    s.dims = {N, N};
    s.U = unitary_from_generator(H, 1.0);
    s.probe = gaussian_probe(lat, probe_sigma);
    s.Z = ops.Q_A;
    s.h = site_outcomes(N, "s");
    return s;
}

MeasurementScheme preset_conserving_yanase(const Lattice& lat, double lambda,
                                           double probe_sigma) {
    lat.validate();
    if (lambda <= 0.0)
        throw ContractError("preset_conserving_yanase: lambda > 0 required");
    const int N = lat.N;
    const LatticeOps ops = build_lattice_ops(lat);
    // H = lambda (Q - Q_A)^2 / 2 is diagonal in the joint site basis; the
    // pointer momentum picks up a kick lambda (Q - Q_A). The relative
    // coordinate is the cyclic one (bulk-identical).
    MeasurementScheme s;
    s.dims = {N, N};
    s.U = Operator(N * N);
    for (int j = 0; j < N; ++j)
        for (int p = 0; p < N; ++p) {
            const double d = cyclic_relative(lat, j, p);
            const double arg = -lambda * d * d / (2.0 * hbar());
            s.U.at(j * N + p, j * N + p) = cplx(std::cos(arg), std::sin(arg));
        }
    s.probe = gaussian_probe(lat, probe_sigma);
    s.Z = ops.P_A * cplx(1.0 / lambda, 0.0);
    s.h = site_outcomes(N, "k");
    return s;
}

double relative_position_check(const Lattice& lat,
                               const std::vector<StateVector>& joint_states) {
    const int N = lat.N;
    const LatticeOps ops = build_lattice_ops(lat);
    // A = Q x 1 - 1 x Q_A (diagonal), B = P x 1 + 1 x P_A applied blockwise.
    double worst = 0.0;
    for (const auto& psi : joint_states) {
        if (psi.dim() != N * N)
            throw DimensionError("relative_position_check: joint state expected");
        std::vector<cplx> Apsi(psi.vec());
        for (int j = 0; j < N; ++j)
            for (int p = 0; p < N; ++p)
                Apsi[static_cast<std::size_t>(j) * N + p] *=
                    lat.position(j) - lat.position(p);
        // B psi: (P x 1) psi + (1 x P_A) psi via row/column matrix products
        std::vector<cplx> Bpsi(static_cast<std::size_t>(N) * N, cplx(0.0));
        // (1 x P_A): each system block times P_A^T on the right <=> P_A row-apply
        for (int j = 0; j < N; ++j)
            kernels::gemm(static_cast<std::size_t>(N), static_cast<std::size_t>(N), 1,
                          ops.P_A.data(), psi.data() + static_cast<std::size_t>(j) * N,
                          Bpsi.data() + static_cast<std::size_t>(j) * N, false);
        // (P x 1): mix system blocks
        for (int j = 0; j < N; ++j)
            for (int jp = 0; jp < N; ++jp)
                kernels::axpy(static_cast<std::size_t>(N), ops.P.at(j, jp),
                              psi.data() + static_cast<std::size_t>(jp) * N,
                              Bpsi.data() + static_cast<std::size_t>(j) * N);
        const cplx ab = kernels::dotc(Apsi.size(), Apsi.data(), Bpsi.data());
        const cplx ba = kernels::dotc(Apsi.size(), Bpsi.data(), Apsi.data());
        worst = std::max(worst, std::abs(ab - ba));
    }
    return worst;
}

double information_transfer(const MeasurementScheme& scheme, const Lattice& lat,
                            double separation) {
    AdmissibleStateFamily fam;
    fam.lat = lat;
    fam.sigma = 1.6 * lat.a;
    fam.center = -separation / 2.0;
    const StateVector psi1 = fam.make();
    fam.center = +separation / 2.0;
    const StateVector psi2 = fam.make();
    const auto p_of = [&](const StateVector& psi) {
        std::vector<double> p;
        const StateVector out = final_state(scheme, psi);
        for (const auto& o : scheme.h.outcomes) {
            const Operator P = pointer_projector(scheme, o.label);
            double val = 0.0;
            std::vector<cplx> tmp(static_cast<std::size_t>(scheme.dims.dimP));
            for (int blk = 0; blk < scheme.dims.dimS; ++blk) {
                const cplx* seg = out.data() + static_cast<std::size_t>(blk) * scheme.dims.dimP;
                kernels::gemm(static_cast<std::size_t>(scheme.dims.dimP),
                              static_cast<std::size_t>(scheme.dims.dimP), 1, P.data(),
                              seg, tmp.data(), false);
                val += kernels::dotc(static_cast<std::size_t>(scheme.dims.dimP), seg,
                                     tmp.data())
                           .real();
            }
            p.push_back(val);
        }
        return p;
    };
    const auto p1 = p_of(psi1), p2 = p_of(psi2);
    double tv = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) tv += std::abs(p1[i] - p2[i]);
    return 0.5 * tv;
}

std::vector<double> nnls(const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b, double* residual) {
    // Lawson-Hanson active set; problems here are small and well-scaled.
    const std::size_t rows = A.size();
    const std::size_t cols = rows ? A.front().size() : 0;
    std::vector<double> x(cols, 0.0);
    std::vector<bool> passive(cols, false);

    auto solve_passive = [&](std::vector<double>& z) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < cols; ++j)
            if (passive[j]) idx.push_back(j);
        const std::size_t k = idx.size();
        std::fill(z.begin(), z.end(), 0.0);
        if (k == 0) return;
        // normal equations (A_P^T A_P) y = A_P^T b, Cholesky-free Gaussian
        std::vector<std::vector<double>> M(k, std::vector<double>(k + 1, 0.0));
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < rows; ++i) s += A[i][idx[r]] * A[i][idx[c]];
                M[r][c] = s;
            }
            double s = 0.0;
            for (std::size_t i = 0; i < rows; ++i) s += A[i][idx[r]] * b[i];
            M[r][k] = s;
        }
        for (std::size_t p = 0; p < k; ++p) {
            std::size_t piv = p;
            for (std::size_t r = p + 1; r < k; ++r)
                if (std::abs(M[r][p]) > std::abs(M[piv][p])) piv = r;
            std::swap(M[p], M[piv]);
            const double diag = M[p][p];
            if (std::abs(diag) < 1e-12) continue;
            for (std::size_t r = 0; r < k; ++r) {
                if (r == p) continue;
                const double f = M[r][p] / diag;
                for (std::size_t c = p; c <= k; ++c) M[r][c] -= f * M[p][c];
            }
        }
        for (std::size_t p = 0; p < k; ++p)
            z[idx[p]] = std::abs(M[p][p]) < 1e-12 ? 0.0 : M[p][k] / M[p][p];
    };

    std::vector<double> w(cols), z(cols);
    for (int iter = 0; iter < 4 * static_cast<int>(cols) + 16; ++iter) {
        // gradient w = A^T (b - A x)
        std::vector<double> r(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < cols; ++j) s -= A[i][j] * x[j];
            r[i] = s;
        }
        double wmax = 0.0;
        std::size_t arg = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (passive[j]) continue;
            double s = 0.0;
            for (std::size_t i = 0; i < rows; ++i) s += A[i][j] * r[i];
            w[j] = s;
            if (s > wmax) {
                wmax = s;
                arg = j;
            }
        }
        if (arg == cols || wmax <= 1e-12) break;
        passive[arg] = true;
        solve_passive(z);
        while (true) {
            double alpha = 1.0;
            bool clipped = false;
            for (std::size_t j = 0; j < cols; ++j) {
                if (!passive[j] || z[j] > 0.0) continue;
                const double denom = x[j] - z[j];
                if (denom > 1e-300) {
                    alpha = std::min(alpha, x[j] / denom);
                    clipped = true;
                }
            }
            if (!clipped) {
                x = z;
                break;
            }
            for (std::size_t j = 0; j < cols; ++j)
                if (passive[j]) x[j] += alpha * (z[j] - x[j]);
            for (std::size_t j = 0; j < cols; ++j)
                if (passive[j] && x[j] <= 1e-12) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            solve_passive(z);
        }
    }
    if (residual) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            double ri = b[i];
            for (std::size_t j = 0; j < cols; ++j) ri -= A[i][j] * x[j];
            s += ri * ri;
        }
        *residual = std::sqrt(s);
    }
    return x;
}

KernelExtraction kernel_extraction(const MeasurementScheme& scheme, const Lattice& lat) {
    const int N = lat.N;
    if (scheme.dims.dimS != N)
        throw DimensionError("kernel_extraction: scheme system dimension != N");
    const Povm povm = induced_povm(scheme);
    KernelExtraction out;

    double offdiag = 0.0;
    for (const auto& e : povm.effects)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (i != j) offdiag = std::max(offdiag, std::abs(e.effect.at(i, j)));
    out.off_diagonal = offdiag;
    if (offdiag > 0.05) {
        out.ill_posed = true;
    }

    // d_X(j) = sum_{m in X} e[(j - m) mod N]; one row per (effect, site).
    std::vector<std::vector<double>> Amat;
    std::vector<double> bvec;
    for (std::size_t xi = 0; xi < povm.effects.size(); ++xi) {
        const auto& entry = scheme.h.outcomes[xi];
        // recover bin sites from the pointer eigenvalues of the outcome:
        // for the site/momentum presets each label holds one merged index,
        // and the bin is that index set interpreted on the lattice.
        std::vector<int> bin(entry.eigen_indices.begin(), entry.eigen_indices.end());
        for (int j = 0; j < N; ++j) {
            std::vector<double> row(static_cast<std::size_t>(N), 0.0);
            for (int m : bin) row[static_cast<std::size_t>(((j - m) % N + N) % N)] += 1.0;
            Amat.push_back(std::move(row));
            bvec.push_back(povm.effects[xi].effect.at(j, j).real());
        }
    }
    std::vector<double> e = nnls(Amat, bvec, &out.residual);
    double sum = std::accumulate(e.begin(), e.end(), 0.0);
    if (sum <= 1e-9) {
        out.ill_posed = true;
        sum = 1.0;
    }
    for (auto& v : e) v /= sum;
    out.kernel.weights = std::move(e);
    // width in length units from the circular second moment
    out.width = out.kernel.width() * lat.a;
    if (out.residual > 0.1) out.ill_posed = true;
    return out;
}

}  // namespace way
