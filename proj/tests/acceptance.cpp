// Acceptance suite: runs every headline requirement at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exits with the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "way/csv.hpp"
#include "way/lattice.hpp"
#include "way/metrics.hpp"
#include "way/rng.hpp"
#include "way/scheme.hpp"
#include "way/wigner.hpp"

using namespace way;

namespace {

struct Criterion {
    int id;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Criterion> results;

template <typename Fn>
void run_criterion(int id, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    c.id = id;
    try {
        std::ostringstream detail;
        c.pass = fn(detail);
        c.detail = detail.str();
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(c));
}

double law(int n) { return 1.0 / (2.0 * n - 1.0); }

StateVector gauss(const Lattice& lat, double center, double sigma) {
    AdmissibleStateFamily fam;
    fam.lat = lat;
    fam.center = center;
    fam.sigma = sigma;
    return fam.make();
}

// ---- criterion 1: uniform-probe law -----------------------------------

bool criterion1(std::ostringstream& out) {
    bool ok = true;
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
        WignerProbeSpec spec;
        spec.n = n;
        const EtaMinimum m = minimal_eta_norm(spec);
        const double dev = std::abs(m.eta_sq - law(n));
        worst = std::max(worst, dev);
        if (dev > 1e-5) ok = false;
    }
    out << "max |eta_sq - 1/(2n-1)| = " << worst << " over n=1..8 (tol 1e-5)";
    return ok;
}

// ---- criterion 2: optimized-probe scaling ------------------------------

bool criterion2(std::ostringstream& out) {
    const ScalingStudy s = scaling_study(2, 16, ProbeProfile::optimize);
    for (const auto& r : s.rows)
        if (r.failed) {
            out << "row n=" << r.n << " failed: " << r.error;
            return false;
        }
    // odd-n subsequence slope: the even-n optima coincide with the preceding
    // odd value (pairwise plateaus), which flattens the all-n fit
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : s.rows) {
        if (r.n % 2 == 0) continue;
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(r.eta_sq);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    const double odd_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    out << "loglog slope = " << s.loglog_slope
        << " (require <= -1.6); odd-n subsequence slope = " << odd_slope;
    return s.loglog_slope <= -1.6;
}

// ---- criterion 3: three-effect structure -------------------------------

bool criterion3(std::ostringstream& out) {
    bool ok = true;
    out << "\n";
    for (int n = 1; n <= 8; ++n) {
        WignerProbeSpec spec;
        spec.n = n;
        const WignerModel m = build_wigner_model(spec);
        const Povm induced = induced_povm(m.scheme);
        // closed form with the coupling malfunction norm (the law quantity)
        Povm closed;
        closed.effects.push_back(
            {"-", projector(spin_x_minus()) * cplx(1.0 - m.eta_sq)});
        closed.effects.push_back(
            {"?", Operator::identity(2) * cplx(m.eta_sq)});
        closed.effects.push_back(
            {"+", projector(spin_x_plus()) * cplx(1.0 - m.eta_sq)});
        double mismatch = 0.0;
        for (const auto& e : closed.effects)
            mismatch = std::max(mismatch, max_abs_diff(e.effect, induced.find(e.label)));
        // structural check at the scheme's actual trivial weight
        double structural = 0.0;
        const double q = m.malfunction_weight;
        structural = std::max(structural,
                              max_abs_diff(induced.find("?"),
                                           Operator::identity(2) * cplx(q)));
        structural = std::max(structural,
                              max_abs_diff(induced.find("+"),
                                           projector(spin_x_plus()) * cplx(1.0 - q)));
        structural = std::max(structural,
                              max_abs_diff(induced.find("-"),
                                           projector(spin_x_minus()) * cplx(1.0 - q)));
        const bool n_ok = mismatch <= 1e-8;
        if (!n_ok) ok = false;
        out << "    n=" << n << ": closed-vs-induced " << mismatch
            << (n_ok ? " PASS" : " FAIL") << " (three-effect structural residual "
            << structural << ", ? weight " << q << " vs eta_sq " << m.eta_sq << ")\n";
    }
    // large-n limit at n = 10
    {
        WignerProbeSpec spec;
        spec.n = 10;
        const WignerModel m = build_wigner_model(spec);
        const Povm closed = effects_from_model(m);
        const double d =
            std::max(max_abs_diff(closed.find("+"), projector(spin_x_plus())),
                     max_abs_diff(closed.find("-"), projector(spin_x_minus())));
        const bool n10 = d <= 2.0 / 19.0;
        if (!n10) ok = false;
        out << "    n=10: ||E+- - P|| = " << d << " <= 2/19 "
            << (n10 ? "PASS" : "FAIL") << "\n";
    }
    if (!ok)
        out << "    note: with exact conservation, the uniform even-n coupling "
               "cannot satisfy <eta|pointer> = 0 (parity obstruction); the "
               "induced trivial weight exceeds eta_sq by 2(n-1)/(n(2n-1)). "
               "Odd n matches exactly.";
    return ok;
}

// ---- criterion 4: conservation / orthogonality invariants ---------------

bool criterion4(std::ostringstream& out) {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
        WignerProbeSpec spec;
        spec.n = n;
        const WignerModel m = build_wigner_model(spec);
        worst = std::max({worst, m.conservation_residual, m.orthogonality_residual,
                          m.form_residual});
    }
    out << "max residual over built models = " << worst << " (tol 1e-8)";
    return worst <= 1e-8;
}

// ---- criterion 5: Ozawa / mu inequalities over 1000 draws ---------------

bool criterion5(std::ostringstream& out) {
    Rng rng(config().seed);
    std::vector<std::pair<std::string, MetricContext>> ctxs;

    {
        MetricContext c;
        c.scheme = make_cnot_scheme();
        c.M = Operator::diag({1.0, -1.0});
        c.pair = {Operator::diag({1.0, -1.0}), Operator::zero(2)};
        c.validate();
        ctxs.emplace_back("cnot", std::move(c));
    }
    {
        MetricContext c;
        c.scheme = make_cnot_scheme();
        c.scheme.U = Operator::identity(4);
        c.M = Operator::diag({1.0, -1.0});
        c.pair = {Operator::diag({1.0, -1.0}), Operator::zero(2)};
        c.validate();
        ctxs.emplace_back("trivial", std::move(c));
    }
    for (int n : {2, 3, 5}) {
        WignerProbeSpec spec;
        spec.n = n;
        const WignerModel m = build_wigner_model(spec);
        MetricContext c;
        c.scheme = m.scheme;
        c.M = spin_sx();
        c.pair = {spin_sz(), probe_jz(spec.probe_dim(), spec.buffer)};
        c.validate();
        ctxs.emplace_back("wigner" + std::to_string(n), std::move(c));
    }
    {
        const Lattice lat{32, 1.0};
        const LatticeOps ops = build_lattice_ops(lat);
        MetricContext c;
        c.scheme = preset_von_neumann(lat, 1.0, 1.6);
        c.M = ops.Q;
        c.pair = {ops.P, ops.P_A};
        c.validate();
        ctxs.emplace_back("von-neumann", std::move(c));
        MetricContext c2;
        c2.scheme = preset_conserving(lat, 0.8, 1.75);
        c2.M = ops.Q;
        c2.pair = {ops.P, ops.P_A};
        c2.validate();
        ctxs.emplace_back("conserving", std::move(c2));
        MetricContext c3;
        c3.scheme = preset_conserving_yanase(lat, 0.12, 1.6);
        c3.M = ops.Q;
        c3.pair = {ops.P, ops.P_A};
        c3.validate();
        ctxs.emplace_back("conserving-yanase", std::move(c3));
    }

    const int per = 125;
    int draws = 0;
    double worst_eps = 1e300, worst_mu = 1e300;
    for (auto& [name, ctx] : ctxs) {
        for (int i = 0; i < per; ++i) {
            const StateVector psi = random_state(rng, ctx.scheme.dims.dimS);
            const BoundReport r = bound_report(ctx, psi, draws++);
            worst_eps = std::min(worst_eps, r.slack_eps);
            worst_mu = std::min(worst_mu, r.slack_mu);
        }
    }
    out << draws << " draws across " << ctxs.size()
        << " schemes; min slack eps = " << worst_eps << ", mu = " << worst_mu
        << " (tol -1e-9)";
    return draws >= 1000 && worst_eps >= -1e-9 && worst_mu >= -1e-9;
}

// ---- criterion 6: Eq. (7) position bound on the Yanase-satisfying preset

bool criterion6(std::ostringstream& out) {
    const Lattice lat{32, 1.0};
    const LatticeOps ops = build_lattice_ops(lat);
    MetricContext ctx;
    ctx.scheme = preset_conserving_yanase(lat, 0.12, 1.6);
    ctx.M = ops.Q;
    ctx.pair = {ops.P, ops.P_A};
    ctx.validate();
    const double yr = yanase_residual(ctx.scheme, ctx.pair);
    if (yr > 1e-10) {
        out << "yanase residual unexpectedly large: " << yr;
        return false;
    }
    std::vector<StateVector> sys = {gauss(lat, -2.0, 1.6), gauss(lat, 0.0, 1.6),
                                    gauss(lat, 2.0, 1.6)};
    double worst_eps = 1e300, worst_mu = 1e300;
    for (double w : {1.2, 1.4, 1.6, 1.9, 2.2, 2.6}) {
        MetricContext c2 = ctx.with_probe(gauss(lat, 0.0, w));
        StateVector phi = c2.scheme.probe;
        const double dp2 = variance(ops.P_A, phi);
        const double scale = 4.0 * dp2 / (hbar() * hbar());
        for (const auto& psi : sys) {
            const double e = noise(c2, psi);
            const double m = repeatability_noise(c2, psi);
            worst_eps = std::min(worst_eps, e * e * scale);
            worst_mu = std::min(worst_mu, m * m * scale);
        }
    }
    out << "min eps^2*4Dp^2/hbar^2 = " << worst_eps << ", mu analog = " << worst_mu
        << " over 6-width sweep (require >= 1 - 1e-6)";
    return worst_eps >= 1.0 - 1e-6 && worst_mu >= 1.0 - 1e-6;
}

// ---- criterion 7: zero-numerator Yanase-violating case ------------------

bool criterion7(std::ostringstream& out) {
    const Lattice lat{32, 1.0};
    const LatticeOps ops = build_lattice_ops(lat);
    MetricContext ctx;
    ctx.scheme = preset_conserving(lat, 0.8, 1.75);
    ctx.M = ops.Q;
    ctx.pair = {ops.P, ops.P_A};
    ctx.validate();
    std::vector<StateVector> sys = {gauss(lat, -1.5, 1.75), gauss(lat, 0.0, 1.75),
                                    gauss(lat, 1.5, 1.75)};
    double worst_num = 0.0;
    for (const auto& psi : sys) {
        const StateVector joint = tensor(psi, ctx.scheme.probe);
        const auto nv = ctx.noise_op().apply(joint.vec());
        const auto lv = ctx.Ljoint().apply(joint.vec());
        const cplx comm = kernels::dotc(nv.size(), nv.data(), lv.data()) -
                          kernels::dotc(nv.size(), lv.data(), nv.data());
        worst_num = std::max(worst_num, std::abs(comm));
    }
    std::vector<StateVector> joints;
    joints.push_back(tensor(gauss(lat, -1.0, 1.6), gauss(lat, 1.0, 1.6)));
    joints.push_back(tensor(gauss(lat, 0.0, 2.0), gauss(lat, 0.0, 1.4)));
    const double rel = relative_position_check(lat, joints);
    out << "max |<[Zf - M, P+P_A]>| = " << worst_num << ", relative-position = "
        << rel << " (tol 1e-6 hbar)";
    return worst_num <= 1e-6 * hbar() && rel <= 1e-6 * hbar();
}

// ---- criterion 8: smeared-position identity -----------------------------

bool criterion8(std::ostringstream& out) {
    const Lattice lat{32, 1.0};
    Rng rng(config().seed + 8);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        SmearKernel e;
        e.weights.assign(32, 0.0);
        const int support = 1 + static_cast<int>(rng.next_u64() % 7);
        double total = 0.0;
        for (int i = 0; i < support; ++i) {
            const double w = rng.uniform() + 0.01;
            e.weights[static_cast<std::size_t>((32 + i - support / 2) % 32)] += w;
            total += w;
        }
        for (auto& w : e.weights) w /= total;
        std::vector<std::vector<int>> bins;
        for (int j = 0; j < 32; j += 2) bins.push_back({j, j + 1});
        const Povm povm = smeared_position_povm(lat, e, bins);
        const StateVector phi = random_state(rng, 32);
        for (std::size_t b = 0; b < bins.size(); ++b) {
            double oracle = 0.0;
            for (int j = 0; j < 32; ++j) {
                double conv = 0.0;
                for (int m : bins[b])
                    conv += e.weights[static_cast<std::size_t>(((j - m) % 32 + 32) % 32)];
                oracle += std::norm(phi[j]) * conv;
            }
            const double p = expectation(povm.effects[b].effect, phi).real();
            worst = std::max(worst, std::abs(p - oracle));
        }
    }
    // point-mass kernel reproduces sharp position exactly
    SmearKernel delta;
    delta.weights.assign(32, 0.0);
    delta.weights[0] = 1.0;
    std::vector<std::vector<int>> bins;
    for (int j = 0; j < 32; ++j) bins.push_back({j});
    const Povm sharp = smeared_position_povm(lat, delta, bins);
    double sharp_dev = 0.0;
    for (int j = 0; j < 32; ++j) {
        Operator expect(32);
        expect.at(j, j) = 1.0;
        sharp_dev = std::max(
            sharp_dev, max_abs_diff(sharp.effects[static_cast<std::size_t>(j)].effect,
                                    expect));
    }
    out << "max |povm - double-sum oracle| = " << worst
        << " over 50 kernel/state pairs (tol 1e-12); sharp deviation = " << sharp_dev;
    return worst <= 1e-12 && sharp_dev == 0.0;
}

// ---- criterion 9: repeatability semantics -------------------------------

bool criterion9(std::ostringstream& out) {
    const MeasurementScheme s = make_cnot_scheme();
    StateVector plus(2);
    plus[0] = plus[1] = std::sqrt(0.5);
    std::vector<StateVector> states = {StateVector::basis(2, 0),
                                       StateVector::basis(2, 1), plus};
    const double rep = repeatability_deviation(s, states);

    Rng rng(config().seed + 9);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        MeasurementScheme r;
        r.dims = {2, 2};
        r.U = unitary_from_generator(random_hermitian(rng, 4), 0.8);
        r.probe = random_state(rng, 2);
        r.Z = random_hermitian(rng, 2);
        const auto& sp = r.pointer_spectrum();
        for (std::size_t k = 0; k < sp.values.size(); ++k)
            r.h.outcomes.push_back({"o" + std::to_string(k), {static_cast<int>(k)}});
        const Povm povm = induced_povm(r);
        const StateVector psi = random_state(rng, 2);
        for (const auto& cs : conditional_states(r, psi)) {
            const double q = expectation(povm.find(cs.label), psi).real();
            worst = std::max(worst, std::abs(cs.probability - q));
        }
    }
    out << "cnot repeatability deviation = " << rep
        << " (tol 1e-9); conditional-vs-induced probability gap = " << worst
        << " (tol 1e-10)";
    return rep <= 1e-9 && worst <= 1e-10;
}

// ---- criterion 10: CSV determinism --------------------------------------

bool criterion10(std::ostringstream& out) {
    auto make = []() {
        CsvReport r({"n", "eta_sq", "ratio"}, 42, /*deterministic=*/true);
        for (int n = 2; n <= 6; ++n) {
            WignerProbeSpec spec;
            spec.n = n;
            const WignerModel m = build_wigner_model(spec);
            r.row({static_cast<double>(n), m.eta_sq, m.eta_sq * (2.0 * n - 1.0)});
        }
        std::ostringstream s;
        r.write(s);
        return s.str();
    };
    const std::string a = make();
    const std::string b = make();
    out << "two in-process runs produced " << a.size() << " bytes, byte-identical = "
        << (a == b ? "yes" : "no");
    return a == b && !a.empty();
}

}  // namespace

int main() {
    run_criterion(1, criterion1);
    run_criterion(2, criterion2);
    run_criterion(3, criterion3);
    run_criterion(4, criterion4);
    run_criterion(5, criterion5);
    run_criterion(6, criterion6);
    run_criterion(7, criterion7);
    run_criterion(8, criterion8);
    run_criterion(9, criterion9);
    run_criterion(10, criterion10);

    // stated runtime budgets (seconds)
    const std::map<int, double> budget = {{1, 60.0}, {2, 300.0}, {5, 300.0}, {6, 600.0}};
    int failures = 0;
    for (auto& c : results) {
        const auto b = budget.find(c.id);
        if (b != budget.end() && c.seconds > b->second) {
            c.pass = false;
            c.detail += " [runtime budget exceeded]";
        }
        std::printf("CRITERION %2d: %s  [%.1fs]  %s\n", c.id,
                    c.pass ? "PASS" : "FAIL", c.seconds, c.detail.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("SUMMARY: %d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}
