// Reproducible experiment runner: every checker is a subcommand. Exit codes:
// 0 = run completed with the expected verdicts, 1 = unexpected verdicts,
// 2 = invalid configuration, 3 = numerical diagnostic failure.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ubl/artifacts.hpp"
#include "ubl/battery.hpp"
#include "ubl/counterexamples.hpp"
#include "ubl/inequalities.hpp"
#include "ubl/muckenhoupt.hpp"

using namespace ubl;
using nlohmann::json;

namespace {

struct Common {
    std::string out_dir;
    std::uint64_t seed = 1;
    std::size_t n = 100000;
    int threads = 1;
    std::uint64_t suite_seed = 424242;
    int schema_version = 1;
};

std::string default_out() {
    const char* env = std::getenv("UBL_OUT_DIR");
    return env ? env : "ubl_out";
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_dir, "output directory (default $UBL_OUT_DIR or ./ubl_out)");
    sub->add_option("--seed", c.seed, "RNG seed for the sampler");
    sub->add_option("--n", c.n, "Monte Carlo sample count");
    sub->add_option("--threads", c.threads, "internal parallelism over suite functions");
    sub->add_option("--suite-seed", c.suite_seed, "seed for the test-function suite");
}

struct Runner {
    Common& common;
    RunManifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    std::string dir() {
        std::string d = common.out_dir.empty() ? default_out() : common.out_dir;
        return ensure_dir(d);
    }
    void finish(const std::string& config_desc) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(config_desc));
        manifest.config_hash = buf;
        manifest.seed = common.seed;
        manifest.wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        write_manifest(manifest, dir() + "/manifest.json");
    }
    void csv(const std::vector<InequalityReport>& reports, const std::string& name) {
        std::string path = dir() + "/" + name;
        write_reports_csv(reports, path);
        add_artifact(manifest, path);
    }
    void put_summary(const ReportSummary& s, const std::string& name) {
        std::string path = dir() + "/" + name;
        std::ofstream out(path);
        out << summary_json(s) << "\n";
        out.close();
        add_artifact(manifest, path);
        std::cout << summary_json(s) << "\n";
    }
};

MeasureSpec build_measure(const std::string& name, double w_amp, double v_amp) {
    auto m = measure_by_name(name);
    if (w_amp != 0.0) {
        if (m.pot.kind != PotentialSpec::Kind::Power)
            throw InputError("W perturbation requires a power-potential measure");
        m.pot.W.kind = WSpec::Kind::CosOscillation;
        m.pot.W.amplitude = w_amp;
        m.id += "_w";
    }
    if (v_amp != 0.0) {
        m.pot.V.kind = VSpec::Kind::GaussBump;
        m.pot.V.c = v_amp;
        m.id += "_v";
    }
    return m;
}

int expect_exit(const std::vector<InequalityReport>& reports, const std::string& expect) {
    int n_viol = 0, n_holds = 0;
    for (const auto& r : reports) {
        if (r.verdict == Verdict::VIOLATED) ++n_viol;
        if (r.verdict == Verdict::HOLDS) ++n_holds;
    }
    if (expect == "holds") return n_viol == 0 ? 0 : 1;
    return n_viol > 0 ? 0 : 1;  // expect == "violated"
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ubl: numerical laboratory for coercive inequalities on metric measure spaces\n"
        "Artifacts are CSV tables plus JSON summaries and a manifest "
        "(config hash, seed, wall time, artifact hashes)."};
    app.require_subcommand(1);
    // one config file per run: top-level keys plus one [subcommand] section;
    // unknown keys are rejected and the schema version is pinned
    app.set_config("--config", "", "key=value configuration file (see [subcommand] sections)");
    app.allow_config_extras(false);
    int schema_version = 1;
    app.add_option("--schema-version,--schema_version", schema_version, "config schema version (must be 1)")
        ->check(CLI::IsMember({1}));

    // ---- distance ----
    auto* sc_dist = app.add_subcommand(
        "distance",
        "CC distance closed form vs trajectory oracle.\n"
        "CSV columns: x1,x2,z,closed_form,oracle,rel_gap");
    Common c_dist;
    add_common(sc_dist, c_dist);
    int dist_points = 20, dist_segments = 64;
    double dist_tol = 1e-3;
    sc_dist->add_option("--points", dist_points, "number of random points");
    sc_dist->add_option("--segments", dist_segments, "oracle control segments");
    sc_dist->add_option("--tol", dist_tol, "relative tolerance");

    // ---- constants ----
    auto* sc_const = app.add_subcommand("constants", "print theorem constants as JSON");
    double cb = 1.0, cp = 2.0, csigma = 1.0, ceps = 0.0, cK = 0.0, cq = 0.0, cdelta = -1.0,
           cgamma = 0.0, coscv = 0.0;
    sc_const->add_option("--beta", cb, "potential coefficient")->required();
    sc_const->add_option("--p", cp, "potential exponent")->required();
    sc_const->add_option("--sigma", csigma, "eikonal lower-bound parameter");
    sc_const->add_option("--eps", ceps, "Laplacian comparison slack");
    sc_const->add_option("--K", cK, "Laplacian bound constant");
    sc_const->add_option("--q", cq, "also derive the q-version constants");
    sc_const->add_option("--delta", cdelta, "perturbation slope (enables the perturbed constants)");
    sc_const->add_option("--gamma", cgamma, "perturbation offset");
    sc_const->add_option("--oscv", coscv, "oscillation of the bounded perturbation");

    // ---- check ----
    auto* sc_check = app.add_subcommand(
        "check",
        "Poincare / LS_q / phi-entropy checks over the default suite.\n"
        "CSV columns: kind,function,lhs,lhs_se,rhs,rhs_se,margin,margin_se,margin_sigmas,verdict,C,D");
    Common c_check;
    add_common(sc_check, c_check);
    std::string check_measure = "gauss1d", check_kind = "poincare", check_expect = "holds";
    double check_q = 2.0, check_theta = 1.5, check_const = 0.0, check_M = 0.0, check_c = 0.0;
    bool check_search = false;
    sc_check->add_option("--measure", check_measure, "measure name (gauss1d, quartic1d, subq1d, slowtail3d, h1gauss, h1kaplan, hksurrogate)");
    sc_check->add_option("--kind", check_kind, "poincare | lsq | phi")
        ->check(CLI::IsMember({"poincare", "lsq", "phi"}));
    sc_check->add_option("--q", check_q, "integrability exponent");
    sc_check->add_option("--theta", check_theta, "phi-entropy theta in [1,2]");
    sc_check->add_option("--constant", check_const, "candidate constant");
    sc_check->add_option("--M", check_M, "alias for --constant (Poincare)");
    sc_check->add_option("--c", check_c, "alias for --constant (LS/phi)");
    sc_check->add_flag("--search", check_search, "search-then-margin the candidate constant");
    sc_check->add_option("--expect", check_expect, "holds | violated")
        ->check(CLI::IsMember({"holds", "violated"}));

    // ---- ubound ----
    auto* sc_ub = app.add_subcommand(
        "ubound",
        "U-bound checks (forms 2z, 2ap, 2ap_bis, 2xa, converse).\n"
        "CSV columns: kind,function,lhs,lhs_se,rhs,rhs_se,margin,margin_se,margin_sigmas,verdict,C,D");
    Common c_ub;
    add_common(sc_ub, c_ub);
    std::string ub_measure = "gauss1d", ub_form = "2z", ub_constants = "thm", ub_expect = "holds";
    double ub_q = 1.0, ub_C = 0.0, ub_D = 0.0, ub_W = 0.0, ub_a = 4.0, ub_b = 0.0, ub_cls = 1.0;
    sc_ub->add_option("--measure", ub_measure, "measure name");
    sc_ub->add_option("--form", ub_form, "2z | 2ap | 2ap_bis | 2xa | converse")
        ->check(CLI::IsMember({"2z", "2ap", "2ap_bis", "2xa", "converse"}));
    sc_ub->add_option("--q", ub_q, "exponent q");
    sc_ub->add_option("--constants-from", ub_constants, "thm | search | manual")
        ->check(CLI::IsMember({"thm", "search", "manual"}));
    sc_ub->add_option("--C", ub_C, "manual constant C");
    sc_ub->add_option("--D", ub_D, "manual constant D");
    sc_ub->add_option("--w-amplitude", ub_W, "cosine perturbation amplitude (theorem 2.6 route)");
    sc_ub->add_option("--a", ub_a, "converse: |grad U|^q <= a U + b");
    sc_ub->add_option("--b", ub_b, "converse: offset b");
    sc_ub->add_option("--cls", ub_cls, "converse: LS_q constant of the measure");
    sc_ub->add_option("--expect", ub_expect, "holds | violated")
        ->check(CLI::IsMember({"holds", "violated"}));

    // ---- muckenhoupt ----
    auto* sc_mk = app.add_subcommand(
        "muckenhoupt",
        "Muckenhoupt criterion table for the oscillating counterexample.\n"
        "CSV columns: n,r,logB,log_lower_bound");
    Common c_mk;
    add_common(sc_mk, c_mk);
    std::string mk_family = "oscillating";
    double mk_beta = 1.0, mk_p = 2.0, mk_eps = 0.5, mk_q = 2.0;
    int mk_nmax = 4;
    sc_mk->add_option("--family", mk_family, "oscillating | power")
        ->check(CLI::IsMember({"oscillating", "power"}));
    sc_mk->add_option("--beta", mk_beta, "potential coefficient");
    sc_mk->add_option("--p", mk_p, "potential exponent");
    sc_mk->add_option("--eps", mk_eps, "oscillation amplitude");
    sc_mk->add_option("--q", mk_q, "Poincare exponent");
    sc_mk->add_option("--nmax", mk_nmax, "table rows (r_n = 2 n pi + pi/2)");

    // ---- nols ----
    auto* sc_nols = app.add_subcommand(
        "nols",
        "No-LS_q counterexample for the smooth homogeneous norm.\n"
        "CSV columns: norm,t,r,valid,log_entropy,log_energy,ratio,ratio_se,ess");
    Common c_nols;
    add_common(sc_nols, c_nols);
    double nols_beta = 1.0, nols_p = 2.0, nols_q = 2.0;
    bool nols_contrast = false;
    sc_nols->add_option("--beta", nols_beta, "potential coefficient");
    sc_nols->add_option("--p", nols_p, "potential exponent");
    sc_nols->add_option("--q", nols_q, "LS exponent in (1,2]");
    sc_nols->add_flag("--contrast", nols_contrast, "also run the CC-norm control column");

    // ---- expbound ----
    auto* sc_exp = app.add_subcommand(
        "expbound",
        "Exponential moment bound mu e^{(1-delta) t f} <= exp(t mu f + C t^q).\n"
        "CSV columns: t,delta,log_lhs,log_rhs,se,verdict");
    Common c_exp;
    add_common(sc_exp, c_exp);
    std::string exp_measure = "gauss1d", exp_f = "x";
    double exp_q = 2.0, exp_a = 0.0, exp_b = 1.0, exp_cls = 1.0, exp_eps = 0.5;
    std::vector<double> exp_grid = {0.25, 0.5, 1.0, 2.0};
    sc_exp->add_option("--measure", exp_measure, "measure name");
    sc_exp->add_option("--f", exp_f, "test function: x | d")->check(CLI::IsMember({"x", "d"}));
    sc_exp->add_option("--q", exp_q, "exponent q in (1,2]");
    sc_exp->add_option("--a", exp_a, "gradient growth: |grad f|^q <= a f + b");
    sc_exp->add_option("--b", exp_b, "gradient growth offset");
    sc_exp->add_option("--cls", exp_cls, "LS_q constant");
    sc_exp->add_option("--eps", exp_eps, "admissibility margin in (0,1)");
    sc_exp->add_option("--tgrid", exp_grid, "t grid");

    // ---- suite ----
    auto* sc_suite = app.add_subcommand("suite", "full acceptance battery (11 criteria)");
    Common c_suite;
    add_common(sc_suite, c_suite);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*sc_dist) {
            set_parallel_threads(c_dist.threads);
            Runner run{c_dist};
            Rng rng(c_dist.seed);
            OracleOptions oopt;
            oopt.seed = derive_seed(c_dist.seed, 11);
            std::string path = run.dir() + "/distance_crosscheck.csv";
            std::ofstream csv(path);
            csv << "x1,x2,z,closed_form,oracle,rel_gap\n";
            double worst = 0.0;
            int done = 0;
            Space h1 = Space::heisenberg(1);
            while (done < dist_points) {
                GroupPoint g{h1, {}, 1.2 * rng.normal()};
                g.x[0] = 1.2 * rng.normal();
                g.x[1] = 1.2 * rng.normal();
                double d = cc_distance(g);
                if (d < 0.4 || d > 6.0) continue;
                ++done;
                auto orc = cc_distance_oracle(g, dist_segments, oopt);
                double rel = std::abs(orc.length - d) / d;
                worst = std::max(worst, rel);
                char buf[256];
                std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.12g,%.12g,%.3e\n", g.x[0], g.x[1],
                              g.z, d, orc.length, rel);
                csv << buf;
            }
            GroupPoint axis{h1, {}, 1.0};
            auto orc = cc_distance_oracle(axis, dist_segments, oopt);
            double arel = std::abs(orc.length - cc_distance(axis)) / cc_distance(axis);
            worst = std::max(worst, arel);
            char buf[256];
            std::snprintf(buf, sizeof buf, "0,0,1,%.12g,%.12g,%.3e\n", cc_distance(axis), orc.length,
                          arel);
            csv << buf;
            csv.close();
            add_artifact(run.manifest, path);
            json j{{"worst_rel_gap", worst}, {"tol", dist_tol}, {"points", dist_points + 1}};
            std::cout << j.dump() << "\n";
            run.finish("distance");
            return worst <= dist_tol ? 0 : 1;
        }

        if (*sc_const) {
            auto base = constants_thm2_5(cb, cp, csigma, ceps, cK);
            json j{{"thm2_5", {{"C", base.C}, {"D", base.D}}}};
            if (cdelta >= 0.0) {
                auto pert = constants_thm2_6(base, cdelta, cgamma, coscv);
                j["thm2_6"] = {{"C", pert.C}, {"D", pert.D}};
                base = pert;
            }
            if (cq > 0.0) {
                auto qc = constants_thm2_5p(base, cq, cp);
                j["thm2_5p"] = {{"C", qc.C}, {"D", qc.D}, {"q", cq}};
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*sc_check) {
            set_parallel_threads(c_check.threads);
            Runner run{c_check};
            auto m = build_measure(check_measure, 0.0, 0.0);
            auto ss = sample(m, c_check.n, c_check.seed);
            auto suite = default_suite(m.space, {40, 30, 20, 10, c_check.suite_seed});
            double constant = check_const > 0.0 ? check_const : (check_M > 0.0 ? check_M : check_c);
            if (check_search || constant <= 0.0) {
                auto train = sample(m, std::max<std::size_t>(c_check.n / 4, 5000),
                                    derive_seed(c_check.seed, 9));
                RatioKind rk = check_kind == "poincare"
                                   ? RatioKind::Poincare
                                   : (check_kind == "lsq" ? RatioKind::LSq : RatioKind::PhiEntropy);
                double qq = check_kind == "phi" ? check_theta : check_q;
                auto sr = best_constant_search(m, train, rk, qq, tilt_family(m.space), 600,
                                               derive_seed(c_check.seed, 10));
                double ratio = 1.1 * std::max(sr.ratio, suite_max_ratio(m, train, rk, qq, suite));
                constant = check_kind == "poincare" ? 1.0 / ratio : ratio;
                std::cout << "searched constant: " << constant << "\n";
            }
            std::vector<InequalityReport> reports;
            if (check_kind == "poincare")
                reports = check_poincare(m, ss, check_q, constant, suite);
            else if (check_kind == "lsq")
                reports = check_lsq(m, ss, check_q, constant, suite);
            else
                reports = check_phi_entropy(m, ss, check_theta, constant, suite);
            run.csv(reports, "check_" + check_kind + ".csv");
            run.put_summary(summarize(check_kind, reports), "check_" + check_kind + "_summary.json");
            run.finish("check|" + check_measure + "|" + check_kind);
            return expect_exit(reports, check_expect);
        }

        if (*sc_ub) {
            set_parallel_threads(c_ub.threads);
            Runner run{c_ub};
            auto m = build_measure(ub_measure, ub_W, 0.0);
            auto ss = sample(m, c_ub.n, c_ub.seed);
            auto suite = default_suite(m.space, {40, 30, 20, 10, c_ub.suite_seed});
            std::vector<InequalityReport> reports;
            if (ub_form == "converse") {
                normalize(m);
                auto conv = check_converse_ubound(m, ss, ub_q, ub_a, ub_b, ub_cls, suite);
                std::cout << "eps_hat=" << conv.eps_hat << " log_mu_expU=" << conv.log_mu_expU << "\n";
                reports = conv.reports;
            } else {
                UboundForm form = ub_form == "2z"
                                      ? UboundForm::WeightDp1
                                      : (ub_form == "2ap" ? UboundForm::WeightDqp
                                                          : (ub_form == "2ap_bis" ? UboundForm::WeightDpConj
                                                                                  : UboundForm::WeightDtheta));
                TheoremConstants cst{ub_C, ub_D, Provenance::Manual};
                if (ub_constants == "thm") {
                    auto base = constants_thm2_5(m.pot.beta, m.pot.p, 1.0, 0.0,
                                                 m.space.heisenberg_like() ? 4.0 : 0.0);
                    if (ub_W != 0.0) {
                        double delta = 2.0 * ub_W;
                        base = constants_thm2_6(base, delta, m.pot.W.gamma_for(delta, m.pot.p), 0.0);
                    }
                    cst = ub_q == 1.0 ? base : constants_thm2_5p(base, ub_q, m.pot.p);
                } else if (ub_constants == "search") {
                    auto train = sample(m, std::max<std::size_t>(c_ub.n / 4, 5000),
                                        derive_seed(c_ub.seed, 9));
                    double p = m.pot.p, q = ub_q;
                    auto wfun = [form, p, q](double d) {
                        switch (form) {
                            case UboundForm::WeightDp1:
                                return std::pow(d, p - 1.0);
                            case UboundForm::WeightDqp:
                                return std::pow(d, q * (p - 1.0));
                            case UboundForm::WeightDpConj:
                                return std::pow(d, p);
                            default:
                                return std::pow(d, 2.0 * (p - 1.0));
                        }
                    };
                    cst = search_ubound_constants(m, train, ub_q, wfun, {}, suite);
                }
                std::cout << "constants: C=" << cst.C << " D=" << cst.D << "\n";
                reports = check_ubound(m, ss, ub_q, form, cst, suite);
            }
            run.csv(reports, "ubound_" + ub_form + ".csv");
            run.put_summary(summarize("ubound_" + ub_form, reports),
                            "ubound_" + ub_form + "_summary.json");
            run.finish("ubound|" + ub_measure + "|" + ub_form);
            return expect_exit(reports, ub_expect);
        }

        if (*sc_mk) {
            Runner run{c_mk};
            if (mk_family == "oscillating") {
                auto rows = counterexample_series(mk_beta, mk_p, mk_eps, mk_q, mk_nmax);
                std::string path = run.dir() + "/muckenhoupt_series.csv";
                write_counterexample_csv(rows, path);
                add_artifact(run.manifest, path);
                bool increasing = true, dominates = true;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    if (i > 0 && rows[i].log_b <= rows[i - 1].log_b) increasing = false;
                    if (rows[i].log_b < rows[i].log_lower_bound) dominates = false;
                }
                json j{{"increasing", increasing}, {"dominates_chain", dominates}};
                std::cout << j.dump() << "\n";
                run.finish("muckenhoupt");
                return increasing && dominates ? 0 : 1;
            }
            // gapped family: the column must stay bounded
            auto m = OneDimMeasure::power(mk_beta, mk_p);
            std::string path = run.dir() + "/muckenhoupt_series.csv";
            std::ofstream csv(path);
            csv << "n,r,logB,log_lower_bound\n";
            double first = 0.0, last = 0.0;
            for (int n = 1; n <= mk_nmax; ++n) {
                double r = 2.0 * n * M_PI + 0.5 * M_PI;
                double b = log_b_plus(m, r, mk_q);
                if (n == 1) first = b;
                last = b;
                char buf[128];
                std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,nan\n", n, r, b);
                csv << buf;
            }
            csv.close();
            add_artifact(run.manifest, path);
            run.finish("muckenhoupt");
            return last < first + 1.0 ? 0 : 1;
        }

        if (*sc_nols) {
            Runner run{c_nols};
            NoLSExperiment exp;
            exp.beta = nols_beta;
            exp.p = nols_p;
            exp.q = nols_q;
            exp.seed = c_nols.seed;
            exp.n_samples = std::max<std::size_t>(c_nols.n / 2, 10000);
            auto table = no_ls_run(exp, nols_contrast);
            std::string pk = run.dir() + "/nols_kaplan.csv";
            write_nols_csv(table.kaplan, "kaplan", pk);
            add_artifact(run.manifest, pk);
            bool increasing = true;
            double first = 0.0, last = 0.0;
            for (const auto& row : table.kaplan) {
                if (!row.valid) continue;
                if (first == 0.0) first = row.ratio;
                if (last != 0.0 && row.ratio <= last) increasing = false;
                last = row.ratio;
            }
            bool band_ok = true;
            if (nols_contrast) {
                std::string pc = run.dir() + "/nols_cc.csv";
                write_nols_csv(table.cc, "cc", pc);
                add_artifact(run.manifest, pc);
                double lo = 1e300, hi = 0.0;
                for (const auto& row : table.cc)
                    if (row.valid) {
                        lo = std::min(lo, row.ratio);
                        hi = std::max(hi, row.ratio);
                    }
                band_ok = hi / lo < 5.0;
            }
            json j{{"increasing", increasing},
                   {"growth", last / std::max(first, 1e-300)},
                   {"cc_band_ok", band_ok}};
            std::cout << j.dump() << "\n";
            run.finish("nols");
            return increasing && band_ok ? 0 : 1;
        }

        if (*sc_exp) {
            Runner run{c_exp};
            auto m = build_measure(exp_measure, 0.0, 0.0);
            auto ss = sample(m, c_exp.n, c_exp.seed);
            TestFunction f = exp_f == "x" ? coordinate_fn(m.space, 0) : radial_power_fn(m.space, 1.0, 1.0);
            auto res = check_exp_bound(m, ss, f, exp_a, exp_b, exp_cls, exp_q, exp_grid, exp_eps);
            std::string path = run.dir() + "/expbound.csv";
            std::ofstream csv(path);
            csv << "t,delta,log_lhs,log_rhs,se,verdict\n";
            for (const auto& pt : res.points) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.12g,%.12g,%.12g,%s\n", pt.t, pt.delta,
                              pt.log_lhs, pt.log_rhs, pt.se, verdict_name(pt.verdict));
                csv << buf;
            }
            csv.close();
            add_artifact(run.manifest, path);
            json j{{"all_hold", res.all_hold},
                   {"g_monotone", res.g_monotone},
                   {"C", res.C},
                   {"g_limit_gap", res.g_limit_gap}};
            std::cout << j.dump() << "\n";
            run.finish("expbound");
            return res.all_hold && res.g_monotone ? 0 : 1;
        }

        if (*sc_suite) {
            set_parallel_threads(c_suite.threads);
            Runner run{c_suite};
            BatteryOptions opt;
            opt.out_dir = run.dir();
            opt.seed = c_suite.seed == 1 ? 20240901 : c_suite.seed;
            opt.n_mc = c_suite.n;
            auto results = run_acceptance_battery(opt, std::cout);
            int failed = 0;
            for (const auto& r : results)
                if (!r.pass) ++failed;
            std::printf("acceptance: %zu criteria, %d failed\n", results.size(), failed);
            return failed == 0 ? 0 : 1;
        }
    } catch (const InputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DiagnosticError& e) {
        std::cerr << "numerical diagnostic: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
