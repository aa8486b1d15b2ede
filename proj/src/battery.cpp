#include "ubl/battery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ubl/artifacts.hpp"
#include "ubl/counterexamples.hpp"
#include "ubl/inequalities.hpp"
#include "ubl/muckenhoupt.hpp"

namespace ubl {

namespace {

struct Ctx {
    const BatteryOptions& opt;
    std::ostream& log;
    RunManifest manifest;

    void note(const std::string& s) {
        if (opt.log_progress) log << "  " << s << "\n" << std::flush;
    }
    void artifact_csv(const std::vector<InequalityReport>& reports, const std::string& name) {
        if (opt.out_dir.empty()) return;
        std::string path = opt.out_dir + "/" + name;
        write_reports_csv(reports, path);
        add_artifact(manifest, path);
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int violated(const std::vector<InequalityReport>& reports) {
    int v = 0;
    for (const auto& r : reports)
        if (r.verdict == Verdict::VIOLATED) ++v;
    return v;
}

double min_margin(const std::vector<InequalityReport>& reports) {
    double m = 1e300;
    for (const auto& r : reports) m = std::min(m, r.margin_sigmas);
    return m;
}

GroupPoint random_h1_point(Rng& rng, double scale) {
    GroupPoint g{Space::heisenberg(1), {}, scale * rng.normal()};
    g.x[0] = scale * rng.normal();
    g.x[1] = scale * rng.normal();
    return g;
}

// ---- criterion 1: geometry ----

CriterionResult criterion_geometry(Ctx& c) {
    CriterionResult res{1, "geometry suite", true, ""};
    Rng rng(derive_seed(c.opt.seed, 1));
    const Space h1 = Space::heisenberg(1);

    double assoc_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto a = random_h1_point(rng, 2.0), b = random_h1_point(rng, 2.0), g = random_h1_point(rng, 2.0);
        auto lhs = group_mul(group_mul(a, b), g), rhs = group_mul(a, group_mul(b, g));
        assoc_err = std::max(assoc_err, std::abs(lhs.z - rhs.z));
        for (int j = 0; j < 2; ++j) assoc_err = std::max(assoc_err, std::abs(lhs.x[j] - rhs.x[j]));
    }
    bool assoc_ok = assoc_err < 1e-12;

    double auto_err = 0.0, hom_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto a = random_h1_point(rng, 1.5), b = random_h1_point(rng, 1.5);
        double s = std::exp(rng.normal());
        auto l = dilate(s, group_mul(a, b)), r = group_mul(dilate(s, a), dilate(s, b));
        auto_err = std::max(auto_err, std::abs(l.z - r.z));
        hom_err = std::max(hom_err,
                           std::abs(cc_distance(dilate(s, a)) - s * cc_distance(a)) /
                               std::max(1.0, s * cc_distance(a)));
    }
    bool auto_ok = auto_err < 1e-10, hom_ok = hom_err < 1e-6;

    double eik_err = 0.0;
    int eik_n = 0;
    while (eik_n < 100) {
        auto g = random_h1_point(rng, 1.5);
        if (g.xnorm() < 0.1) continue;
        ++eik_n;
        double gn = horizontal_gradient_norm([](const GroupPoint& p) { return cc_distance(p); }, g,
                                             fd_step_first(g));
        eik_err = std::max(eik_err, std::abs(gn - 1.0));
    }
    bool eik_ok = eik_err < 1e-3;

    double gap_max = 0.0;
    std::ostringstream dist_csv;
    dist_csv << "x1,x2,z,closed_form,oracle,rel_gap\n";
    OracleOptions oopt;
    oopt.seed = derive_seed(c.opt.seed, 11);
    int done = 0;
    while (done < 20) {
        auto g = random_h1_point(rng, 1.2);
        double d = cc_distance(g);
        if (d < 0.4 || d > 6.0) continue;
        ++done;
        auto orc = cc_distance_oracle(g, 64, oopt);
        double rel = std::abs(orc.length - d) / d;
        gap_max = std::max(gap_max, rel);
        dist_csv << fmt("%.10g,%.10g,%.10g,%.12g,%.12g,%.3e\n", g.x[0], g.x[1], g.z, d, orc.length, rel);
    }
    GroupPoint axis{h1, {}, 1.0};
    auto orc = cc_distance_oracle(axis, 64, oopt);
    double axis_rel = std::abs(orc.length - cc_distance(axis)) / cc_distance(axis);
    gap_max = std::max(gap_max, axis_rel);
    dist_csv << fmt("0,0,1,%.12g,%.12g,%.3e\n", cc_distance(axis), orc.length, axis_rel);
    bool oracle_ok = gap_max <= 1e-3;
    if (!c.opt.out_dir.empty()) {
        std::string path = c.opt.out_dir + "/distance_crosscheck.csv";
        std::ofstream out(path);
        out << dist_csv.str();
        out.close();
        add_artifact(c.manifest, path);
    }

    res.pass = assoc_ok && auto_ok && hom_ok && eik_ok && oracle_ok;
    res.detail = fmt("assoc=%.1e auto=%.1e hom=%.1e eikonal=%.1e oracle_rel=%.2e", assoc_err, auto_err,
                     hom_err, eik_err, gap_max);
    return res;
}

// ---- criterion 2: Kohn Laplacian bound for the cc distance ----

CriterionResult criterion_laplacian(Ctx& c) {
    CriterionResult res{2, "Kohn Laplacian of d bounded on the shell", true, ""};
    Rng rng(derive_seed(c.opt.seed, 2));
    ScalarField dist = [](const GroupPoint& p) { return cc_distance(p); };
    std::vector<GroupPoint> pts;
    while (pts.size() < 500) {
        auto g = random_h1_point(rng, 1.6);
        double d = cc_distance(g);
        if (d < 1.0 || d > 5.0 || g.xnorm() < 5e-2) continue;
        pts.push_back(g);
    }
    double max_h = -1e300, max_h2 = -1e300;
    for (const auto& g : pts) {
        double h = fd_step_second(g);
        max_h = std::max(max_h, kohn_laplacian(dist, g, h));
        max_h2 = std::max(max_h2, kohn_laplacian(dist, g, 0.5 * h));
    }
    bool finite_ok = std::isfinite(max_h) && std::isfinite(max_h2) && max_h > 0.0;
    double drift = std::abs(max_h - max_h2) / std::abs(max_h);
    bool stable_ok = drift <= 0.05;

    double hom_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        GroupPoint g = random_h1_point(rng, 1.0);
        if (g.xnorm() < 0.3) {
            --i;
            continue;
        }
        g = dilate(1.0 / cc_distance(g), g);
        double s = 1.0 + 2.0 * rng.uniform();
        double l1 = kohn_laplacian(dist, g, 2e-4);
        double ls = kohn_laplacian(dist, dilate(s, g), 2e-4);
        hom_err = std::max(hom_err, std::abs(ls - l1 / s) / std::abs(l1 / s));
    }
    bool hom_ok = hom_err <= 0.01;

    res.pass = finite_ok && stable_ok && hom_ok;
    res.detail = fmt("max=%.4f halved=%.4f drift=%.2f%% hom_err=%.2e", max_h, max_h2, 100.0 * drift,
                     hom_err);
    return res;
}

// ---- criterion 3: u-bound chain ----

CriterionResult criterion_ubound_chain(Ctx& c) {
    CriterionResult res{3, "u-bound chain 2.z -> 2.ap", true, ""};
    std::ostringstream detail;
    std::size_t n = c.opt.n_mc;

    int total_violated = 0;
    for (double p : {2.0, 4.0}) {
        auto m = power_measure(Space::euclidean(1), 1.0, p);
        m.id = p == 2.0 ? "gauss1d" : "quartic1d";
        auto ss = sample(m, n, derive_seed(c.opt.seed, 30 + (int)p));
        auto suite = default_suite(m.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 40)});

        auto cst1 = constants_thm2_5(1.0, p, 1.0, 0.0, 0.0);
        auto rep1 = check_ubound(m, ss, 1.0, UboundForm::WeightDp1, cst1, suite);
        total_violated += violated(rep1);
        c.artifact_csv(rep1, fmt("ubound_2z_p%g.csv", p));

        double qc = p / (p - 1.0);
        auto cstq = constants_thm2_5p(cst1, qc, p);
        auto repq = check_ubound(m, ss, qc, UboundForm::WeightDpConj, cstq, suite);
        total_violated += violated(repq);
        c.artifact_csv(repq, fmt("ubound_2ap_p%g.csv", p));
        detail << fmt("p=%g: 2z min_sig=%.1f, 2ap(q=%.3g) min_sig=%.1f; ", p, min_margin(rep1), qc,
                      min_margin(repq));

        // perturbed measure W = 0.1 d^{p-1} cos d through theorem 2.6
        WSpec w;
        w.kind = WSpec::Kind::CosOscillation;
        w.amplitude = 0.1;
        auto mw = power_measure(Space::euclidean(1), 1.0, p, HomogeneousNormKind::CarnotCaratheodory, w);
        mw.id = m.id + "_w";
        double delta = 0.2;
        double gamma = w.gamma_for(delta, p);
        auto cstw = constants_thm2_6(cst1, delta, gamma, 0.0);
        auto ssw = sample(mw, n, derive_seed(c.opt.seed, 50 + (int)p));
        auto repw = check_ubound(mw, ssw, 1.0, UboundForm::WeightDp1, cstw, suite);
        total_violated += violated(repw);
        c.artifact_csv(repw, fmt("ubound_2z_perturbed_p%g.csv", p));
        detail << fmt("perturbed p=%g min_sig=%.1f; ", p, min_margin(repw));
    }

    // H_1 with (beta, p) = (1, 2), q = 2: searched-then-margined constants
    auto mh = power_measure(Space::heisenberg(1), 1.0, 2.0);
    mh.id = "h1gauss";
    auto train = sample(mh, n / 4, derive_seed(c.opt.seed, 60));
    auto eval = sample(mh, n, derive_seed(c.opt.seed, 61));
    auto suite_h = default_suite(mh.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 62)});
    // empirical Delta d bound on the shell feeds the theorem constants
    Rng rng(derive_seed(c.opt.seed, 63));
    double Khat = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto g = random_h1_point(rng, 1.6);
        double d = cc_distance(g);
        if (d < 1.0 || d > 5.0 || g.xnorm() < 5e-2) {
            --i;
            continue;
        }
        Khat = std::max(Khat, kohn_laplacian([](const GroupPoint& p) { return cc_distance(p); }, g,
                                             fd_step_second(g)));
    }
    auto base_h = constants_thm2_5(1.0, 2.0, 1.0, 0.0, Khat);
    auto cst_h = constants_thm2_5p(base_h, 2.0, 2.0);
    // margin the D constant on the training sample
    double Dmax = cst_h.D;
    for (const auto& f : suite_h) {
        auto cols = evaluate_columns(f, train, true);
        double lhs = 0, grad = 0, mass = 0;
        for (std::size_t i = 0; i < cols.n; ++i) {
            double a = cols.f[i] * cols.f[i];
            lhs += std::pow(train.d[i], 2.0) * a;
            grad += cols.gnorm[i] * cols.gnorm[i];
            mass += a;
        }
        if (mass > 1e-12) Dmax = std::max(Dmax, 1.1 * (lhs - cst_h.C * grad) / mass);
    }
    TheoremConstants cst_margined{cst_h.C, Dmax, Provenance::Manual};
    auto rep_h = check_ubound(mh, eval, 2.0, UboundForm::WeightDqp, cst_margined, suite_h);
    total_violated += violated(rep_h);
    c.artifact_csv(rep_h, "ubound_h1.csv");
    detail << fmt("H1 q=2 (K=%.2f C=%.2f D=%.1f) min_sig=%.1f", Khat, cst_margined.C, cst_margined.D,
                  min_margin(rep_h));

    res.pass = total_violated == 0;
    res.detail = fmt("violated=%d | ", total_violated) + detail.str();
    return res;
}

// ---- criterion 4: Poincare and LS_q ----

CriterionResult criterion_poincare_ls(Ctx& c) {
    CriterionResult res{4, "Poincare + LS_q sharp values and quartic LS", true, ""};
    auto m = power_measure(Space::euclidean(1), 1.0, 2.0);
    m.id = "gauss1d";
    auto ss = sample(m, c.opt.n_mc / 2, derive_seed(c.opt.seed, 70));
    // the searched witness is re-scored on an independent set: the search
    // maximises over noise, the fresh evaluation removes the selection bias
    auto ss_eval = sample(m, c.opt.n_mc, derive_seed(c.opt.seed, 77));

    auto pc = best_constant_search(m, ss, RatioKind::Poincare, 2.0, fourier_family(m.space, 2), 2500,
                                   derive_seed(c.opt.seed, 71));
    auto pf = fourier_family(m.space, 2);
    double pc_ratio = suite_max_ratio(m, ss_eval, RatioKind::Poincare, 2.0, {pf.make(pc.params)});
    bool gap_ok = std::abs(pc_ratio - 0.5) <= 0.01;  // gap^{-1} = 0.5 within 2%

    auto ls = best_constant_search(m, ss, RatioKind::LSq, 2.0, tilt_family(m.space), 800,
                                   derive_seed(c.opt.seed, 72));
    auto tf = tilt_family(m.space);
    double ls_ratio = suite_max_ratio(m, ss_eval, RatioKind::LSq, 2.0, {tf.make(ls.params)});
    bool ls_ok = std::abs(ls_ratio - 1.0) <= 0.05;

    // quartic measure, q = 4/3, search-then-margin
    auto m4 = power_measure(Space::euclidean(1), 1.0, 4.0);
    m4.id = "quartic1d";
    double q = 4.0 / 3.0;
    auto train = sample(m4, c.opt.n_mc / 4, derive_seed(c.opt.seed, 73));
    auto eval = sample(m4, c.opt.n_mc, derive_seed(c.opt.seed, 74));
    auto suite = default_suite(m4.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 75)});
    auto s1 = best_constant_search(m4, train, RatioKind::LSq, q, tilt_family(m4.space), 600,
                                   derive_seed(c.opt.seed, 76));
    double candidate = 1.1 * std::max(s1.ratio, suite_max_ratio(m4, train, RatioKind::LSq, q, suite));
    auto rep = check_lsq(m4, eval, q, candidate, suite);
    bool quartic_ok = violated(rep) == 0;
    c.artifact_csv(rep, "lsq_quartic.csv");

    res.pass = gap_ok && ls_ok && quartic_ok;
    res.detail = fmt("poincare_ratio=%.4f ls_ratio=%.4f quartic c=%.3f violated=%d min_sig=%.1f",
                     pc_ratio, ls_ratio, candidate, violated(rep), min_margin(rep));
    return res;
}

// ---- criterion 5: sub-quadratic phi entropy ----

CriterionResult criterion_phi_entropy(Ctx& c) {
    CriterionResult res{5, "phi-entropy at theta = 1.5 and the theta = 1 degeneracy", true, ""};
    auto m = power_measure(Space::euclidean(1), 1.0, 1.5);
    m.id = "subq1d";
    auto train = sample(m, c.opt.n_mc / 4, derive_seed(c.opt.seed, 80));
    auto eval = sample(m, c.opt.n_mc, derive_seed(c.opt.seed, 81));
    auto suite = default_suite(m.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 82)});

    auto s = best_constant_search(m, train, RatioKind::PhiEntropy, 1.5, tilt_family(m.space), 600,
                                  derive_seed(c.opt.seed, 83));
    double candidate =
        1.1 * std::max(s.ratio, suite_max_ratio(m, train, RatioKind::PhiEntropy, 1.5, suite));
    auto rep = check_phi_entropy(m, eval, 1.5, candidate, suite);
    bool holds_ok = violated(rep) == 0;
    c.artifact_csv(rep, "phi_entropy_theta15.csv");

    auto rep1 = check_phi_entropy(m, eval, 1.0, 0.1, suite);
    double max_lhs = 0.0;
    for (const auto& r : rep1) max_lhs = std::max(max_lhs, std::abs(r.lhs.value));
    bool degenerate_ok = max_lhs < 1e-12;

    res.pass = holds_ok && degenerate_ok;
    res.detail = fmt("c=%.3f violated=%d min_sig=%.1f theta1_max_lhs=%.1e", candidate, violated(rep),
                     min_margin(rep), max_lhs);
    return res;
}

// ---- criterion 6: converse u-bound and exp-bound ----

CriterionResult criterion_converse_exp(Ctx& c) {
    CriterionResult res{6, "converse u-bound + exp-bound on the Gaussian", true, ""};
    auto m = power_measure(Space::euclidean(1), 1.0, 2.0);
    m.id = "gauss1d";
    normalize(m);
    auto ss = sample(m, c.opt.n_mc, derive_seed(c.opt.seed, 90));
    auto suite = default_suite(m.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 91)});

    bool preflight_ok = true, converse_ok = true;
    double eps_hat = 0.0;
    int conv_viol = 0;
    try {
        auto conv = check_converse_ubound(m, ss, 2.0, 4.0, 1e-9, 1.0, suite);
        eps_hat = conv.eps_hat;
        conv_viol = violated(conv.reports);
        converse_ok = conv_viol == 0;
        c.artifact_csv(conv.reports, "converse_ubound.csv");
    } catch (const DiagnosticError&) {
        preflight_ok = false;
    }

    auto xfn = coordinate_fn(m.space, 0);
    auto ex = check_exp_bound(m, ss, xfn, 0.0, 1.0, 1.0, 2.0, {0.25, 0.5, 1.0, 2.0});
    bool exp_x_ok = ex.all_hold && ex.g_monotone;
    // Gaussian closed form: log mu e^{t x} = t^2/4
    double closed_err = 0.0;
    for (const auto& pt : ex.points)
        closed_err = std::max(closed_err,
                              (std::abs(pt.log_lhs - pt.t * pt.t / 4.0) - 3.0 * pt.se) / (1.0 + pt.t));
    bool closed_ok = closed_err <= 0.02;

    TestFunction dfn = radial_power_fn(m.space, 1.0, 1.0);  // f = d = |x|
    auto ed = check_exp_bound(m, ss, dfn, 0.0, 1.0, 1.0, 2.0, {0.25, 0.5, 1.0, 2.0});
    bool exp_d_ok = ed.all_hold;

    res.pass = preflight_ok && converse_ok && exp_x_ok && closed_ok && exp_d_ok;
    res.detail = fmt("preflight(a=4,b=0)=%s eps=%.3g conv_violated=%d exp_x=%s exp_d=%s closed_err=%.3f",
                     preflight_ok ? "pass" : "fail", eps_hat, conv_viol, exp_x_ok ? "holds" : "fails",
                     exp_d_ok ? "holds" : "fails", closed_err);
    return res;
}

// ---- criterion 7: weighted inequalities ----

CriterionResult criterion_weighted(Ctx& c) {
    CriterionResult res{7, "weighted u-bound (p=4) and slow-tail case (ii)", true, ""};
    auto m4 = power_measure(Space::euclidean(1), 1.0, 4.0);
    m4.id = "quartic1d";
    auto train = sample(m4, c.opt.n_mc / 4, derive_seed(c.opt.seed, 100));
    auto eval = sample(m4, c.opt.n_mc, derive_seed(c.opt.seed, 101));
    auto suite = default_suite(m4.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 102)});
    auto cst = search_ubound_constants(
        m4, train, 2.0, [](double d) { return std::pow(d, 4.0); },
        [](double d) { return 1.0 / (1.0 + d * d); }, suite);
    auto rep = check_weighted(m4, eval, WeightedKind::Thm4_4_1, 2.0, cst, suite);
    bool w_ok = violated(rep) == 0;
    c.artifact_csv(rep, "weighted_thm441.csv");

    auto slow = slow_tail_measure(Space::euclidean(3), 40.0);
    slow.id = "slowtail3d";
    auto strain = sample(slow, c.opt.n_mc / 4, derive_seed(c.opt.seed, 103));
    auto seval = sample(slow, c.opt.n_mc / 2, derive_seed(c.opt.seed, 104));
    auto ssuite = default_suite(slow.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 105)});
    double c1 = 40.0 / 37.0;
    double b1 = 0.0;
    for (const auto& f : ssuite) {
        auto cols = evaluate_columns(f, strain, true);
        double lhs = 0, grad = 0, mass = 0;
        for (std::size_t i = 0; i < cols.n; ++i) {
            double a = std::abs(cols.f[i]);
            lhs += 40.0 * std::log1p(strain.d[i]) * a;
            grad += strain.d[i] * std::log1p(strain.d[i]) * cols.gnorm[i];
            mass += a;
        }
        if (mass > 1e-12) b1 = std::max(b1, (lhs - c1 * grad) / mass);
    }
    auto scst = constants_thm4_5ii1(40.0, 3, 1.1 * b1 + 0.01);
    auto srep = check_weighted(slow, seval, WeightedKind::SlowTailIIq1, 1.0, scst, ssuite);
    bool s_ok = violated(srep) == 0;
    c.artifact_csv(srep, "weighted_slowtail_ii.csv");

    res.pass = w_ok && s_ok;
    res.detail = fmt("thm441: C=%.2f D=%.2f violated=%d; slowtail: c1=%.4f b1=%.3f violated=%d", cst.C,
                     cst.D, violated(rep), scst.C, scst.D, violated(srep));
    return res;
}

// ---- criterion 8: Muckenhoupt counterexample ----

CriterionResult criterion_muckenhoupt(Ctx& c) {
    CriterionResult res{8, "Muckenhoupt counterexample + spectral oracle", true, ""};
    auto rows = counterexample_series(1.0, 2.0, 0.5, 2.0, 4);
    bool increasing = true, dominates = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].log_b <= rows[i - 1].log_b) increasing = false;
        if (rows[i].log_b < rows[i].log_lower_bound) dominates = false;
    }
    // fitted slope of the explicit lower-bound chain against (2 n pi)^2; the
    // printed asymptotic exp{beta (2 n pi)^p (eps + o(1/n)) / q} is a statement
    // about this chain
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        mx += std::pow(2.0 * r.n * M_PI, 2.0);
        my += r.log_lower_bound;
    }
    mx /= rows.size();
    my /= rows.size();
    for (const auto& r : rows) {
        double x = std::pow(2.0 * r.n * M_PI, 2.0);
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (r.log_lower_bound - my);
    }
    double slope = sxy / sxx;
    bool slope_ok = std::abs(slope - 0.25) <= 0.05;  // eps/q within 20%

    if (!c.opt.out_dir.empty()) {
        std::string path = c.opt.out_dir + "/muckenhoupt_series.csv";
        write_counterexample_csv(rows, path);
        add_artifact(c.manifest, path);
    }

    auto osc = OneDimMeasure::oscillating(1.0, 2.0, 0.5);
    bool osc_decreasing = true;
    double prev = 1e300;
    for (double R : {4.0 * M_PI, 6.0 * M_PI, 8.0 * M_PI, 10.0 * M_PI}) {
        double g = fd_spectral_gap(osc, R, 2048);
        if (!(g < prev || g < 1e-300)) osc_decreasing = false;
        prev = std::min(prev, g);
    }
    double ggap = fd_spectral_gap(OneDimMeasure::power(1.0, 2.0), 8.0, 2048);
    bool gauss_ok = std::abs(ggap - 2.0) <= 0.01;

    res.pass = increasing && dominates && slope_ok && osc_decreasing && gauss_ok;
    res.detail = fmt("logB=[%.1f %.1f %.1f %.1f] chain_slope=%.4f osc_gap_dec=%d gauss_gap=%.4f",
                     rows[0].log_b, rows[1].log_b, rows[2].log_b, rows[3].log_b, slope,
                     osc_decreasing ? 1 : 0, ggap);
    return res;
}

// ---- criterion 9: no-LS counterexample ----

CriterionResult criterion_nols(Ctx& c) {
    CriterionResult res{9, "no-LS divergence for the smooth norm", true, ""};
    NoLSExperiment exp;
    exp.seed = derive_seed(c.opt.seed, 120);
    exp.n_samples = 40000;
    auto table = no_ls_run(exp, true);

    double first = 0.0, last = 0.0;
    bool increasing = true;
    std::vector<double> lt, lent, lr, lene;
    for (const auto& row : table.kaplan) {
        if (!row.valid) continue;
        if (first == 0.0) first = row.ratio;
        if (last != 0.0 && row.ratio <= last) increasing = false;
        last = row.ratio;
        lt.push_back(exp.p * std::log(row.t));
        lent.push_back(row.log_entropy - row.log_mass);
        lr.push_back(-exp.q * std::log(row.r));
        lene.push_back(row.log_energy - row.log_mass);
    }
    bool tenfold = last >= 10.0 * first;

    auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
        double mx = 0, my = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= x.size();
        my /= x.size();
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        return sxy / sxx;
    };
    double s_ent = slope(lt, lent), s_ene = slope(lr, lene);
    bool slopes_ok = s_ent >= 0.8 && s_ent <= 1.2 && s_ene >= 0.8 && s_ene <= 1.2;

    double lo = 1e300, hi = 0.0;
    for (const auto& row : table.cc) {
        if (!row.valid) continue;
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    bool band_ok = hi / lo < 5.0;

    if (!c.opt.out_dir.empty()) {
        std::string pk = c.opt.out_dir + "/nols_kaplan.csv";
        write_nols_csv(table.kaplan, "kaplan", pk);
        add_artifact(c.manifest, pk);
        std::string pc = c.opt.out_dir + "/nols_cc.csv";
        write_nols_csv(table.cc, "cc", pc);
        add_artifact(c.manifest, pc);
    }

    res.pass = increasing && tenfold && slopes_ok && band_ok;
    res.detail = fmt("ratio %.2f -> %.2f (x%.1f) slopes ent=%.2f ene=%.2f cc_band=%.2f", first, last,
                     last / std::max(first, 1e-300), s_ent, s_ene, hi / lo);
    return res;
}

// ---- criterion 10: heat-kernel surrogate ----

CriterionResult criterion_surrogate(Ctx& c) {
    CriterionResult res{10, "heat-kernel surrogate u-bound + Poincare", true, ""};
    auto m = heat_kernel_surrogate_measure();
    auto train = sample(m, c.opt.n_mc / 4, derive_seed(c.opt.seed, 130));
    auto eval = sample(m, c.opt.n_mc / 2, derive_seed(c.opt.seed, 131));
    auto suite = default_suite(m.space, {40, 30, 20, 10, derive_seed(c.opt.seed, 132)});

    auto cst = search_ubound_constants(
        m, train, 2.0, [](double d) { return d * d; }, {}, suite);
    auto rep = check_ubound(m, eval, 2.0, UboundForm::WeightDqp, cst, suite);
    bool ub_ok = violated(rep) == 0;
    c.artifact_csv(rep, "surrogate_ubound.csv");

    auto ps = best_constant_search(m, train, RatioKind::Poincare, 2.0, fourier_family(m.space, 2), 1500,
                                   derive_seed(c.opt.seed, 133));
    double ratio = std::max(ps.ratio, suite_max_ratio(m, train, RatioKind::Poincare, 2.0, suite));
    double M = 1.0 / (1.1 * ratio);
    auto prep = check_poincare(m, eval, 2.0, M, suite);
    bool p_ok = violated(prep) == 0;
    c.artifact_csv(prep, "surrogate_poincare.csv");

    // |grad W|^2 <= eps^2 d^2 + 1 pointwise for W = -1/2 log(1 + eps |x| d)
    double worst = -1e300;
    std::size_t checked = 0;
    const double epsw = 1.0;
    for (std::size_t i = 0; i < eval.size() && checked < 10000; ++i) {
        const GroupPoint& g = eval.points[i];
        if (!cc_differentiable(g)) continue;
        ++checked;
        double gn = horizontal_gradient_norm(
            [epsw](const GroupPoint& p) { return -0.5 * std::log1p(epsw * p.xnorm() * cc_distance(p)); },
            g, fd_step_first(g));
        double bound = epsw * epsw * eval.d[i] * eval.d[i] + 1.0;
        worst = std::max(worst, gn * gn - bound);
    }
    bool grad_ok = worst <= 1e-3 && checked == 10000;

    res.pass = ub_ok && p_ok && grad_ok;
    res.detail = fmt("ubound C=%.2f D=%.2f violated=%d; poincare M=%.4f violated=%d; gradW slack=%.2e",
                     cst.C, cst.D, violated(rep), M, violated(prep), worst);
    return res;
}

// ---- criterion 11: reproducibility ----

CriterionResult criterion_reproducibility(Ctx& c) {
    CriterionResult res{11, "byte-identical artifacts on re-run", true, ""};
    std::string base = c.opt.out_dir.empty() ? std::string("/tmp/ubl_repro") : c.opt.out_dir + "/repro";
    auto run_once = [&](const std::string& dir) {
        ensure_dir(dir);
        auto rows = counterexample_series(1.0, 2.0, 0.5, 2.0, 3);
        write_counterexample_csv(rows, dir + "/muck.csv");
        auto m = power_measure(Space::euclidean(1), 1.0, 2.0);
        auto ss = sample(m, 20000, derive_seed(c.opt.seed, 140));
        write_csv(ss, dir + "/samples.csv");
        auto suite = default_suite(m.space, {8, 6, 4, 2, derive_seed(c.opt.seed, 141)});
        auto rep = check_poincare(m, ss, 2.0, 2.0, suite);
        write_reports_csv(rep, dir + "/poincare.csv");
        NoLSExperiment exp;
        exp.t_grid = {4.0, 8.0};
        exp.n_samples = 8000;
        exp.seed = derive_seed(c.opt.seed, 142);
        auto tab = no_ls_run(exp, false);
        write_nols_csv(tab.kaplan, "kaplan", dir + "/nols.csv");
    };
    run_once(base + "_a");
    run_once(base + "_b");
    bool all_equal = true;
    std::string mism;
    for (const char* f : {"muck.csv", "samples.csv", "poincare.csv", "nols.csv"}) {
        auto ha = file_hash_hex(base + "_a/" + f);
        auto hb = file_hash_hex(base + "_b/" + f);
        if (ha != hb) {
            all_equal = false;
            mism += f;
            mism += " ";
        }
    }
    res.pass = all_equal;
    res.detail = all_equal ? "4 artifact kinds byte-identical across re-runs"
                           : ("mismatch in: " + mism);
    return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_battery(const BatteryOptions& opt, std::ostream& log) {
    Ctx ctx{opt, log, {}};
    if (!opt.out_dir.empty()) ensure_dir(opt.out_dir);
    ctx.manifest.seed = opt.seed;
    ctx.manifest.config_hash =
        fmt("%016llx", (unsigned long long)fnv1a(fmt("battery|seed=%llu|n=%zu",
                                                     (unsigned long long)opt.seed, opt.n_mc)));
    std::vector<CriterionResult> out;
    using Fn = CriterionResult (*)(Ctx&);
    const Fn criteria[] = {criterion_geometry,   criterion_laplacian, criterion_ubound_chain,
                           criterion_poincare_ls, criterion_phi_entropy, criterion_converse_exp,
                           criterion_weighted,   criterion_muckenhoupt, criterion_nols,
                           criterion_surrogate,  criterion_reproducibility};
    for (Fn f : criteria) {
        auto r = f(ctx);
        if (opt.log_progress)
            log << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.index << ": " << r.name
                << " -- " << r.detail << "\n"
                << std::flush;
        out.push_back(std::move(r));
    }
    if (!opt.out_dir.empty()) write_manifest(ctx.manifest, opt.out_dir + "/manifest.json");
    return out;
}

}  // namespace ubl
