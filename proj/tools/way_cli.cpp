// Command-line runner: scenario sweeps and scheme audits with deterministic
// CSV output. See README for the file formats.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "way/config.hpp"
#include "way/csv.hpp"
#include "way/lattice.hpp"
#include "way/metrics.hpp"
#include "way/rng.hpp"
#include "way/scheme.hpp"
#include "way/wigner.hpp"

namespace {

using namespace way;

constexpr int kExitCriterion = 1;
constexpr int kExitUsage = 2;

// Deterministic row-parallel map: results land by index, so the output is
// independent of the worker count.
template <typename Fn>
void parallel_rows(int count, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

int run_wigner_scan(int n_min, int n_max, const std::string& profile,
                    const std::string& out_path, int threads) {
    if (n_min < 1 || n_min > n_max || n_max > 24) {
        std::cerr << "wigner-scan: require 1 <= n-min <= n-max <= 24\n";
        return kExitUsage;
    }
    const ProbeProfile prof =
        profile == "optimize" ? ProbeProfile::optimize : ProbeProfile::uniform;
    const int count = n_max - n_min + 1;
    std::vector<ScalingRow> rows(static_cast<std::size_t>(count));
    parallel_rows(count, threads, [&](int i) {
        const int n = n_min + i;
        ScalingStudy one = scaling_study(n, n + 1, prof);
        rows[static_cast<std::size_t>(i)] = one.rows.front();
    });

    CsvReport report({"n", "eta_sq", "formula", "ratio", "conservation_residual",
                      "form_residual"},
                     config().seed, config().deterministic);
    report.comment("command wigner-scan profile=" + profile);
    bool any_failed = false;
    std::ostringstream diag;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : rows) {
        report.row({static_cast<double>(r.n), r.eta_sq, r.formula_value, r.ratio,
                    r.conservation_residual, r.form_residual});
        if (r.failed) {
            any_failed = true;
            diag << "n=" << r.n << ": " << r.error << "\n";
        } else if (r.eta_sq > 0.0) {
            const double x = std::log(static_cast<double>(r.n));
            const double y = std::log(r.eta_sq);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
    }
    const double slope =
        cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : std::nan("");
    report.footer("loglog_slope " + CsvReport::format(slope));
    report.write_file(out_path);
    if (any_failed) {
        std::ofstream d(out_path + ".diag");
        d << diag.str();
        std::cerr << "wigner-scan: some rows failed, see " << out_path << ".diag\n";
        return kExitCriterion;
    }
    return 0;
}

struct LatticeRow {
    std::string preset;
    double lambda, width, delta_pA, eps_sq, bound, slack_eps, mu_sq, bound_mu,
        slack_mu, yanase, conservation, kernel_width;
};

double admissible_conservation_residual(const MeasurementScheme& s, const Operator& Ptot,
                                        const std::vector<StateVector>& states) {
    // max |<a| U^dag Ptot U - Ptot |b>| over admissible joint product states
    const Operator moved = s.U.dagger() * Ptot * s.U;
    const Operator diff = moved - Ptot;
    double worst = 0.0;
    for (const auto& a : states) {
        const auto da = diff.apply(a.vec());
        for (const auto& b : states) {
            const cplx v = kernels::dotc(da.size(), b.data(), da.data());
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

int run_lattice_scan(int N, const std::string& preset,
                     const std::vector<double>& lambdas,
                     const std::vector<double>& widths, const std::string& out_path,
                     int threads) {
    if (lambdas.empty() || widths.empty()) {
        std::cerr << "lattice-scan: empty lambda or probe-width list\n";
        return kExitUsage;
    }
    Lattice lat{N, 1.0};
    lat.validate();
    const LatticeOps ops = build_lattice_ops(lat);
    const Operator Ptot = tensor(ops.P, Operator::identity(N)) +
                          tensor(Operator::identity(N), ops.P_A);

    // Admissible sample family: centered packets plus two displaced ones.
    std::vector<StateVector> sys_states;
    for (double c : {0.0, -2.0, 2.0}) {
        AdmissibleStateFamily fam;
        fam.lat = lat;
        fam.center = c;
        fam.sigma = 1.6 * lat.a;
        sys_states.push_back(fam.make());
    }
    std::vector<LatticeRow> rows(lambdas.size() * widths.size());
    std::vector<std::string> row_errors(rows.size());
    std::vector<double> full_norm_residual(lambdas.size(), std::nan(""));

    parallel_rows(static_cast<int>(lambdas.size()), threads, [&](int li) {
        const double lambda = lambdas[static_cast<std::size_t>(li)];
        MeasurementScheme base;
        try {
            if (preset == "von-neumann")
                base = preset_von_neumann(lat, lambda, 1.6 * lat.a);
            else if (preset == "conserving-yanase")
                base = preset_conserving_yanase(lat, lambda, 1.6 * lat.a);
            else
                base = preset_conserving(lat, lambda, 1.6 * lat.a);
        } catch (const std::exception& e) {
            for (std::size_t wi = 0; wi < widths.size(); ++wi)
                row_errors[static_cast<std::size_t>(li) * widths.size() + wi] = e.what();
            return;
        }
        full_norm_residual[static_cast<std::size_t>(li)] =
            conservation_residual(base, {ops.P, ops.P_A});
        MetricContext ctx;
        ctx.scheme = base;
        ctx.M = ops.Q;
        ctx.pair = {ops.P, ops.P_A};
        ctx.validate();
        for (std::size_t wi = 0; wi < widths.size(); ++wi) {
            LatticeRow& row = rows[static_cast<std::size_t>(li) * widths.size() + wi];
            row.preset = preset;
            row.lambda = lambda;
            row.width = widths[wi];
            try {
                AdmissibleStateFamily fam;
                fam.lat = lat;
                fam.sigma = widths[wi];
                MetricContext c2 = ctx.with_probe(fam.make());
                StateVector phi = c2.scheme.probe;
                const double var_pA = variance(ops.P_A, phi);
                row.delta_pA = std::sqrt(var_pA);
                // epsilon/mu restricted to the admissible system family
                double eps_sq = 0.0, mu_sq = 0.0, min_slack_eps = 1e300,
                       min_slack_mu = 1e300;
                for (const auto& psi : sys_states) {
                    const double e = noise(c2, psi);
                    const double m = repeatability_noise(c2, psi);
                    eps_sq = std::max(eps_sq, e * e);
                    mu_sq = std::max(mu_sq, m * m);
                    const BoundReport br = bound_report(c2, psi, -1);
                    min_slack_eps = std::min(min_slack_eps, br.slack_eps);
                    min_slack_mu = std::min(min_slack_mu, br.slack_mu);
                }
                row.eps_sq = eps_sq;
                row.mu_sq = mu_sq;
                const double h2 = hbar() * hbar();
                row.bound = h2 / (4.0 * var_pA);
                row.bound_mu = row.bound;
                row.slack_eps = eps_sq - row.bound;
                row.slack_mu = mu_sq - row.bound;
                row.yanase = yanase_residual(c2.scheme, ctx.pair);
                std::vector<StateVector> joint_states;
                for (const auto& s : sys_states) joint_states.push_back(tensor(s, phi));
                row.conservation =
                    admissible_conservation_residual(c2.scheme, Ptot, joint_states);
                if (preset != "conserving-yanase") {
                    const KernelExtraction k = kernel_extraction(c2.scheme, lat);
                    row.kernel_width = k.ill_posed ? std::nan("") : k.width;
                } else {
                    row.kernel_width = std::nan("");
                }
            } catch (const std::exception& e) {
                row_errors[static_cast<std::size_t>(li) * widths.size() + wi] = e.what();
            }
        }
    });

    CsvReport report({"preset", "lambda", "probe_width", "delta_pA", "epsilon_sq",
                      "bound_eq7", "slack_eps", "mu_sq", "bound_mu", "slack_mu",
                      "yanase_residual", "conservation_residual", "kernel_width"},
                     config().seed, config().deterministic);
    report.comment("command lattice-scan N=" + std::to_string(N));
    bool any_failed = false;
    std::ostringstream diag;
    bool slack_violation = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!row_errors[i].empty()) {
            any_failed = true;
            diag << "row " << i << ": " << row_errors[i] << "\n";
            report.row_mixed({preset, "NaN", "NaN", "NaN", "NaN", "NaN", "NaN", "NaN",
                              "NaN", "NaN", "NaN", "NaN", "NaN"});
            continue;
        }
        report.row_mixed({r.preset, CsvReport::format(r.lambda),
                          CsvReport::format(r.width), CsvReport::format(r.delta_pA),
                          CsvReport::format(r.eps_sq), CsvReport::format(r.bound),
                          CsvReport::format(r.slack_eps), CsvReport::format(r.mu_sq),
                          CsvReport::format(r.bound_mu), CsvReport::format(r.slack_mu),
                          CsvReport::format(r.yanase), CsvReport::format(r.conservation),
                          CsvReport::format(r.kernel_width)});
        if (preset == "conserving-yanase" &&
            (r.slack_eps < -1e-6 || r.slack_mu < -1e-6))
            slack_violation = true;
    }
    // Spearman rank correlation of (delta_pA, kernel_width) over rows where
    // the deconvolution was well-posed.
    {
        std::vector<double> dps, kws;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!row_errors[i].empty() || std::isnan(rows[i].kernel_width)) continue;
            dps.push_back(rows[i].delta_pA);
            kws.push_back(rows[i].kernel_width);
        }
        double coeff = std::nan("");
        if (dps.size() >= 3) {
            auto rank_of = [](const std::vector<double>& v) {
                std::vector<double> r(v.size(), 0.0);
                for (std::size_t i = 0; i < v.size(); ++i)
                    for (std::size_t j = 0; j < v.size(); ++j)
                        if (v[j] < v[i]) r[i] += 1.0;
                return r;
            };
            const auto ra = rank_of(dps), rb = rank_of(kws);
            double num = 0.0;
            for (std::size_t i = 0; i < ra.size(); ++i)
                num += (ra[i] - rb[i]) * (ra[i] - rb[i]);
            const double n = static_cast<double>(ra.size());
            coeff = 1.0 - 6.0 * num / (n * (n * n - 1.0));
        }
        report.footer("kernel_width_delta_pA_spearman " + CsvReport::format(coeff));
    }
    for (std::size_t li = 0; li < lambdas.size(); ++li)
        report.footer("full_norm_conservation_residual lambda=" +
                      CsvReport::format(lambdas[li]) + " " +
                      CsvReport::format(full_norm_residual[li]));
    report.write_file(out_path);
    if (any_failed) {
        std::ofstream d(out_path + ".diag");
        d << diag.str();
        std::cerr << "lattice-scan: some rows failed, see " << out_path << ".diag\n";
        return kExitCriterion;
    }
    if (slack_violation) {
        std::cerr << "lattice-scan: Eq. (7) slack violation detected\n";
        return kExitCriterion;
    }
    return 0;
}

int run_audit(const std::string& in_path, const std::string& out_path, int n_states) {
    SchemeFile file;
    try {
        file = read_scheme_file_path(in_path);
    } catch (const ParseError& e) {
        std::cerr << "audit: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        file.scheme.validate();
    } catch (const std::exception& e) {
        std::cerr << "audit: validation failed: " << e.what() << "\n";
        return kExitCriterion;
    }

    const Povm povm = induced_povm(file.scheme);
    const double completeness = povm.completeness_residual();
    const double min_eig = povm.min_effect_eigenvalue();

    double conservation = std::nan(""), yanase = std::nan("");
    double eps = std::nan(""), mu = std::nan(""), min_slack = std::nan("");
    if (file.L1 && file.L2) {
        ConservedPair pair{*file.L1, *file.L2};
        conservation = conservation_residual(file.scheme, pair);
        yanase = yanase_residual(file.scheme, pair);
        // Target observable: pointer-value first moment of the induced POVM.
        Operator M(file.scheme.dims.dimS);
        const auto& sp = file.scheme.pointer_spectrum();
        for (std::size_t xi = 0; xi < povm.effects.size(); ++xi) {
            const auto& entry = file.scheme.h.outcomes[xi];
            double v = 0.0;
            if (!entry.eigen_indices.empty()) {
                for (int idx : entry.eigen_indices)
                    v += sp.values[static_cast<std::size_t>(idx)];
                v /= static_cast<double>(entry.eigen_indices.size());
            }
            M += povm.effects[xi].effect * cplx(v, 0.0);
        }
        MetricContext ctx;
        ctx.scheme = file.scheme;
        ctx.M = M;
        ctx.pair = pair;
        ctx.validate();
        eps = global_noise(ctx);
        mu = global_repeatability_noise(ctx);
        Rng rng(config().seed);
        min_slack = 1e300;
        for (int i = 0; i < n_states; ++i) {
            const StateVector psi = random_state(rng, file.scheme.dims.dimS);
            const BoundReport r = bound_report(ctx, psi, i);
            min_slack = std::min(min_slack, r.slack_eps);
        }
    }

    CsvReport report({"povm_completeness", "min_effect_eigenvalue",
                      "conservation_residual", "yanase_residual", "epsilon", "mu",
                      "eq5_min_slack"},
                     config().seed, config().deterministic);
    report.comment("command audit in=" + in_path);
    report.row({completeness, min_eig, conservation, yanase, eps, mu, min_slack});
    report.write_file(out_path);
    const bool violation = completeness > tol().povm_complete ||
                           min_eig < -tol().effect_psd ||
                           (!std::isnan(min_slack) && min_slack < -tol().slack);
    return violation ? kExitCriterion : 0;
}

int run_povm_dump(const std::string& scenario, int n, int N, double kernel_width,
                  const std::string& out_path) {
    Povm povm;
    if (scenario == "wigner") {
        WignerProbeSpec spec;
        spec.n = n;
        const WignerModel model = build_wigner_model(spec);
        povm = effects_from_model(model);
    } else if (scenario == "cnot") {
        povm = induced_povm(make_cnot_scheme());
    } else if (scenario == "smeared") {
        Lattice lat{N, 1.0};
        SmearKernel e;
        e.weights.assign(static_cast<std::size_t>(N), 0.0);
        const int w = std::max(1, static_cast<int>(kernel_width));
        for (int i = 0; i < w; ++i)
            e.weights[static_cast<std::size_t>(((i - w / 2) % N + N) % N)] = 1.0 / w;
        std::vector<std::vector<int>> bins;
        for (int j = 0; j < N; ++j) bins.push_back({j});
        povm = smeared_position_povm(lat, e, bins);
    } else {
        std::cerr << "povm-dump: unknown scenario '" << scenario << "'\n";
        return kExitUsage;
    }
    CsvReport report({"label", "row", "col", "re", "im"}, config().seed,
                     config().deterministic);
    report.comment("command povm-dump scenario=" + scenario);
    for (const auto& e : povm.effects)
        for (int i = 0; i < e.effect.dim(); ++i)
            for (int j = 0; j < e.effect.dim(); ++j)
                report.row_mixed({e.label, std::to_string(i), std::to_string(j),
                                  CsvReport::format(e.effect.at(i, j).real()),
                                  CsvReport::format(e.effect.at(i, j).imag())});
    report.footer("completeness_residual " +
                  CsvReport::format(povm.completeness_residual()));
    report.write_file(out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WAY-theorem measurement simulator"};
    app.set_config("--config");

    std::string out = "report.csv";
    std::uint64_t seed = 42;
    int threads = 1;
    bool deterministic = false;
    std::vector<std::string> tol_overrides;
    app.add_option("--out", out, "output CSV path");
    app.add_option("--seed", seed, "random seed recorded in the report");
    app.add_option("--threads", threads, "worker threads (results are identical)");
    app.add_flag("--deterministic", deterministic,
                 "suppress the timestamp comment for byte-identical output");
    app.add_option("--tolerance", tol_overrides, "override tolerance, key=value");
    double hbar_value = 1.0;
    app.add_option("--hbar", hbar_value, "value of hbar (default 1)");

    auto* wigner = app.add_subcommand("wigner-scan", "Wigner model scaling study");
    int n_min = 1, n_max = 8;
    std::string profile = "uniform";
    wigner->add_option("--n-min", n_min);
    wigner->add_option("--n-max", n_max);
    wigner->add_option("--profile", profile, "uniform|optimize");

    auto* lattice = app.add_subcommand("lattice-scan", "position/momentum bound sweep");
    int N = 32;
    std::string preset = "conserving";
    std::string lambdas_csv = "0.8";
    std::string widths_csv = "1.2,1.4,1.6,1.9,2.2,2.6";
    lattice->add_option("--N", N);
    lattice->add_option("--preset", preset,
                        "conserving|von-neumann|conserving-yanase");
    lattice->add_option("--lambdas", lambdas_csv, "comma-separated coupling list");
    lattice->add_option("--probe-widths", widths_csv, "comma-separated sigma list");

    auto* audit = app.add_subcommand("audit", "audit a scheme file");
    std::string in_path;
    int n_states = 100;
    audit->add_option("--in", in_path)->required();
    audit->add_option("--states", n_states, "sampled states for bound checks");

    auto* dump = app.add_subcommand("povm-dump", "serialize a scenario POVM");
    std::string scenario = "wigner";
    int dump_n = 3;
    int dump_N = 32;
    double dump_kernel_width = 1.0;
    dump->add_option("--scenario", scenario, "wigner|cnot|smeared");
    dump->add_option("--n", dump_n, "wigner probe size");
    dump->add_option("--N", dump_N, "lattice sites for smeared scenario");
    dump->add_option("--kernel-width", dump_kernel_width, "smeared kernel site count");

    for (auto* sub : {wigner, lattice, audit, dump}) sub->fallthrough();
    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitUsage;
    }

    way::Config& cfg = way::config();
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.deterministic = deterministic;
    cfg.hbar = hbar_value;
    for (const auto& kv : tol_overrides) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos ||
            !way::set_tolerance(cfg, kv.substr(0, pos), std::stod(kv.substr(pos + 1)))) {
            std::cerr << "unknown tolerance override: " << kv << "\n";
            return kExitUsage;
        }
    }

    try {
        if (wigner->parsed())
            return run_wigner_scan(n_min, n_max, profile, out, threads);
        if (lattice->parsed())
            return run_lattice_scan(N, preset, parse_list(lambdas_csv),
                                    parse_list(widths_csv), out, threads);
        if (audit->parsed()) return run_audit(in_path, out, n_states);
        if (dump->parsed())
            return run_povm_dump(scenario, dump_n, dump_N, dump_kernel_width, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCriterion;
    }
    return kExitUsage;
}
