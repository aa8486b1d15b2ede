#include "ubl/inequalities.hpp"

#include <cmath>

#include "doctest.h"
#include "ubl/common.hpp"

using namespace ubl;

namespace {

struct Fixture {
    MeasureSpec gauss = power_measure(Space::euclidean(1), 1.0, 2.0);
    SampleSet ss;
    std::vector<TestFunction> suite;
    Fixture() {
        normalize(gauss);
        ss = sample(gauss, 20000, 101);
        suite = default_suite(gauss.space, {10, 8, 5, 3, 7});
    }
};

Fixture& fix() {
    static Fixture f;
    return f;
}

int count_violated(const std::vector<InequalityReport>& reports) {
    int v = 0;
    for (const auto& r : reports)
        if (r.verdict == Verdict::VIOLATED) ++v;
    return v;
}

}  // namespace

TEST_CASE("theorem 2.5 constants") {
    auto c = constants_thm2_5(1.0, 2.0, 1.0, 0.0, 0.0);
    CHECK(c.C == doctest::Approx(0.5));
    CHECK(c.D == doctest::Approx(2.5));

    CHECK(constants_thm2_5(2.0, 2.0, 1.0, 0.0, 0.0).C == doctest::Approx(0.25));

    // C blows up monotonically as eps -> 1/sigma^2
    double prev = 0.0;
    for (double eps : {0.0, 0.5, 0.9, 0.99}) {
        double C = constants_thm2_5(1.0, 2.0, 1.0, eps, 0.0).C;
        CHECK(C > prev);
        prev = C;
    }
    CHECK_THROWS_AS(constants_thm2_5(1.0, 2.0, 1.0, 1.0, 0.0), InputError);
}

TEST_CASE("theorem 2.6 constants") {
    TheoremConstants base{0.5, 2.5, Provenance::Thm2_5};
    auto same = constants_thm2_6(base, 0.0, 0.0, 0.0);
    CHECK(same.C == doctest::Approx(0.5));
    CHECK(same.D == doctest::Approx(2.5));

    auto c = constants_thm2_6(base, 1.0, 1.0, 0.0);
    CHECK(c.C == doctest::Approx(1.0));
    CHECK(c.D == doctest::Approx(7.0));

    auto s = constants_thm2_6(base, 0.0, 0.0, std::log(2.0));
    CHECK(s.C == doctest::Approx(4.0 * 0.5));
    CHECK(s.D == doctest::Approx(4.0 * 2.5));

    CHECK_THROWS_AS(constants_thm2_6(base, 3.0, 1.0, 0.0), InputError);
}

TEST_CASE("theorem 2.5p constants") {
    TheoremConstants base{0.5, 2.5, Provenance::Thm2_5};
    auto q1 = constants_thm2_5p(base, 1.0, 2.0);
    CHECK(q1.C == doctest::Approx(0.5));
    CHECK(q1.D == doctest::Approx(0.5 + 2.5 + 1.0));

    auto q2 = constants_thm2_5p(base, 2.0, 2.0);
    CHECK(q2.C > 0.0);
    CHECK(q2.D > 0.0);
    CHECK(std::isfinite(q2.C));
    // monotone in the input constants
    auto q2big = constants_thm2_5p({1.0, 2.5, Provenance::Thm2_5}, 2.0, 2.0);
    CHECK(q2big.C > q2.C);

    auto q33 = constants_thm2_5p(base, 3.0, 3.0);  // (q-1)(p-1) = 4 > 1 branch
    CHECK(q33.C > 0.0);
    CHECK(std::isfinite(q33.D));
}

TEST_CASE("u-bound checks on the Gaussian with theorem constants") {
    auto& f = fix();
    auto cst = constants_thm2_5(1.0, 2.0, 1.0, 0.0, 0.0);
    auto reports = check_ubound(f.gauss, f.ss, 1.0, UboundForm::WeightDp1, cst, f.suite);
    CHECK(count_violated(reports) == 0);

    // constant function: lhs = mu d^{p-1} must sit below D
    auto rep1 = check_ubound(f.gauss, f.ss, 1.0, UboundForm::WeightDp1, cst, {constant_fn(1.0)});
    CHECK(rep1[0].lhs.value < cst.D);
    CHECK(rep1[0].verdict == Verdict::HOLDS);

    // q = 2 with d^2 weight: f(x) = x has lhs = E x^4 = 0.75
    auto cst2 = constants_thm2_5p(cst, 2.0, 2.0);
    auto rep2 = check_ubound(f.gauss, f.ss, 2.0, UboundForm::WeightDqp, cst2,
                             {coordinate_fn(f.gauss.space, 0)});
    CHECK(std::abs(rep2[0].lhs.value - 0.75) < 3.0 * rep2[0].lhs.std_error + 0.02);
    CHECK(rep2[0].verdict == Verdict::HOLDS);

    auto full2 = check_ubound(f.gauss, f.ss, 2.0, UboundForm::WeightDqp, cst2, f.suite);
    CHECK(count_violated(full2) == 0);

    CHECK_THROWS_AS(check_ubound(f.gauss, f.ss, 3.0, UboundForm::WeightDpConj, cst2, f.suite),
                    InputError);
}

TEST_CASE("poincare check: Gaussian gap is exactly 2") {
    auto& f = fix();
    auto hold = check_poincare(f.gauss, f.ss, 2.0, 2.0, f.suite);
    CHECK(count_violated(hold) == 0);

    // M = 2.2 must be falsified by the linear witness
    auto viol = check_poincare(f.gauss, f.ss, 2.0, 2.2, {coordinate_fn(f.gauss.space, 0)});
    CHECK(viol[0].verdict == Verdict::VIOLATED);

    auto cst = check_poincare(f.gauss, f.ss, 2.0, 2.0, {constant_fn(1.0)});
    CHECK(cst[0].verdict == Verdict::HOLDS);
}

TEST_CASE("ls_2 on the Gaussian: exponential tilts sit at ratio 1 (quadrature)") {
    auto& f = fix();
    for (double t : {0.3, 0.7, 1.2}) {
        auto tilt = exp_tilt_fn(f.gauss.space, t, 0);
        double ent = entropy_q_quad(f.gauss, tilt, 2.0, 1e-10).value;
        double dir = dirichlet_q_quad(f.gauss, tilt, 2.0, {}, 1e-10).value;
        CHECK(ent / dir == doctest::Approx(1.0).epsilon(1e-6));
    }
    auto rep = check_lsq(f.gauss, f.ss, 2.0, 1.05, f.suite);
    CHECK(count_violated(rep) == 0);
}

TEST_CASE("phi entropy check degenerates at theta = 1") {
    auto& f = fix();
    auto rep = check_phi_entropy(f.gauss, f.ss, 1.0, 0.5, f.suite);
    for (const auto& r : rep) {
        CHECK(r.lhs.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(r.verdict == Verdict::HOLDS);
    }
}

TEST_CASE("best constant search recovers the Gaussian gap and LS constant") {
    auto& f = fix();
    auto pc = best_constant_search(f.gauss, f.ss, RatioKind::Poincare, 2.0,
                                   fourier_family(f.gauss.space, 2), 2500, 1234);
    CHECK(pc.ratio == doctest::Approx(0.5).epsilon(0.02));

    auto ls = best_constant_search(f.gauss, f.ss, RatioKind::LSq, 2.0, tilt_family(f.gauss.space), 800,
                                   77);
    CHECK(ls.ratio == doctest::Approx(1.0).epsilon(0.05));

    auto zero = best_constant_search(f.gauss, f.ss, RatioKind::Poincare, 2.0, constant_family(), 200, 5);
    CHECK(zero.ratio == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("converse u-bound on the Gaussian") {
    auto& f = fix();
    auto res = check_converse_ubound(f.gauss, f.ss, 2.0, 4.0, 1e-9, 1.0, f.suite);
    CHECK(res.eps_hat == doctest::Approx(0.5));
    // mu e^{U/2} = sqrt(2)
    CHECK(res.log_mu_expU == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-6));
    CHECK(count_violated(res.reports) == 0);

    // a potential growing faster than the claimed bound trips the pre-flight
    CHECK_THROWS_AS(check_converse_ubound(f.gauss, f.ss, 2.0, 0.5, 0.01, 1.0, f.suite),
                    DiagnosticError);
}

TEST_CASE("exp bound on the Gaussian linear function") {
    auto& f = fix();
    auto xfn = coordinate_fn(f.gauss.space, 0);
    auto res = check_exp_bound(f.gauss, f.ss, xfn, 0.0, 1.0, 1.0, 2.0, {0.25, 0.5, 1.0, 2.0});
    CHECK(res.all_hold);
    CHECK(res.g_monotone);
    CHECK(res.g_limit_gap < 3.0);
    // closed form: log lhs = t^2/4 (delta = 0 since a = 0)
    for (const auto& pt : res.points) {
        CHECK(pt.delta == 0.0);
        CHECK(std::abs(pt.log_lhs - pt.t * pt.t / 4.0) < 3.0 * pt.se + 0.05);
    }

    // constant functions satisfy the bound trivially
    auto cres = check_exp_bound(f.gauss, f.ss, constant_fn(1.3), 0.0, 1e-6, 1.0, 2.0, {0.5, 1.0});
    CHECK(cres.all_hold);
}

TEST_CASE("report invariances: scaling a function never flips a verdict") {
    auto& f = fix();
    auto plat = plateau_fn(GroupPoint::identity(f.gauss.space), 0.5, 1.5);
    auto r1 = check_lsq(f.gauss, f.ss, 2.0, 1.05, {plat});
    TestFunction scaled = plat;
    auto base_eval = plat.eval;
    auto base_grad = plat.grad_norm;
    scaled.eval = [base_eval](const GroupPoint& g) { return -3.0 * base_eval(g); };
    scaled.grad_norm = [base_grad](const GroupPoint& g) { return 3.0 * base_grad(g); };
    auto r2 = check_lsq(f.gauss, f.ss, 2.0, 1.05, {scaled});
    CHECK(r1[0].verdict == r2[0].verdict);
    CHECK(r2[0].lhs.value == doctest::Approx(9.0 * r1[0].lhs.value).epsilon(1e-10));

    // enlarging constants can only help
    auto cst = constants_thm2_5(1.0, 2.0, 1.0, 0.0, 0.0);
    auto a = check_ubound(f.gauss, f.ss, 1.0, UboundForm::WeightDp1, cst, f.suite);
    TheoremConstants bigger{2.0 * cst.C, 2.0 * cst.D, Provenance::Manual};
    auto b = check_ubound(f.gauss, f.ss, 1.0, UboundForm::WeightDp1, bigger, f.suite);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].verdict == Verdict::HOLDS) CHECK(b[i].verdict == Verdict::HOLDS);
    }
}

TEST_CASE("weighted forms: constant function floors and slow-tail constants") {
    auto& f = fix();

    auto slow = slow_tail_measure(Space::euclidean(3), 40.0);
    normalize(slow);
    auto sss = sample(slow, 20000, 55);
    auto ssuite = default_suite(slow.space, {8, 6, 4, 2, 13});
    auto c1 = constants_thm4_5ii1(40.0, 3, 0.0);
    CHECK(c1.C == doctest::Approx(40.0 / 37.0));
    // search b1 on the training sample, then verify with margin
    auto lhs_w = [](double d) { return 40.0 * std::log1p(d); };
    auto grad_w = [](double d) { return d * std::log1p(d); };
    double b1 = 0.0;
    for (const auto& fn : ssuite) {
        auto cols = evaluate_columns(fn, sss, true);
        double lhs = 0, grad = 0, mass = 0;
        for (std::size_t i = 0; i < cols.n; ++i) {
            double a = std::abs(cols.f[i]);
            lhs += lhs_w(sss.d[i]) * a;
            grad += grad_w(sss.d[i]) * cols.gnorm[i];
            mass += a;
        }
        if (mass > 1e-12) b1 = std::max(b1, (lhs - c1.C * grad) / mass);
    }
    auto cst = constants_thm4_5ii1(40.0, 3, 1.1 * b1 + 0.01);
    auto rep = check_weighted(slow, sss, WeightedKind::SlowTailIIq1, 1.0, cst, ssuite);
    CHECK(count_violated(rep) == 0);

    CHECK_THROWS_AS(constants_thm4_5ii1(2.0, 3, 0.0), InputError);

    // Thm 4.4.1 on the quartic measure with searched constants; the unweighted
    // form with the same constants also holds since <d>^{2-p} <= 1
    auto quart = power_measure(Space::euclidean(1), 1.0, 4.0);
    normalize(quart);
    auto qss = sample(quart, 20000, 66);
    auto qsuite = default_suite(quart.space, {8, 6, 4, 2, 19});
    auto wcst = search_ubound_constants(
        quart, qss, 2.0, [](double d) { return std::pow(d, 4.0); },
        [](double d) { return std::pow(1.0 + d * d, -1.0); }, qsuite);
    auto wrep = check_weighted(quart, qss, WeightedKind::Thm4_4_1, 2.0, wcst, qsuite);
    CHECK(count_violated(wrep) == 0);
    // same constants with the unweighted Dirichlet form (<d>^{2-p} <= 1 for
    // p > 2, so the right side only grows): kappa = 2 makes the SlowTailI
    // gradient weight d^{2 kappa - 4} identically 1 and the lhs weight U = d^4
    WeightedParams unw;
    unw.kappa = 2.0;
    auto plain = check_weighted(quart, qss, WeightedKind::SlowTailI, 2.0, wcst, qsuite, unw);
    CHECK(count_violated(plain) == 0);
}

TEST_CASE("summaries and csv output") {
    auto& f = fix();
    auto cst = constants_thm2_5(1.0, 2.0, 1.0, 0.0, 0.0);
    auto reports = check_ubound(f.gauss, f.ss, 1.0, UboundForm::WeightDp1, cst, f.suite);
    auto s = summarize("ubound_2z", reports);
    CHECK(s.n_holds + s.n_violated + s.n_inconclusive == static_cast<int>(reports.size()));
    write_reports_csv(reports, "/tmp/ubl_test_reports.csv");
    auto j = summary_json(s);
    CHECK(j.find("\"n_violated\"") != std::string::npos);
}

TEST_CASE("slow-tail weighted Poincare and LS with the log weight") {
    // the slow-tail measure has no unweighted gap; the (1+d)^q log(e+d)
    // weight restores both the Poincare and the LS_q forms
    auto slow = slow_tail_measure(Space::euclidean(3), 40.0);
    auto train = sample(slow, 15000, 81);
    auto eval = sample(slow, 30000, 82);
    auto suite = default_suite(slow.space, {10, 8, 5, 3, 83});
    auto wlog = [](double d) { return std::pow(1.0 + d, 2.0) * std::log(M_E + d); };

    double max_p = 0.0, max_l = 0.0;
    for (const auto& f : suite) {
        auto cols = evaluate_columns(f, train, true);
        auto wd = dirichlet_q(cols, train, 2.0, wlog);
        if (!(wd.value > 10.0 * wd.std_error)) continue;
        try {
            max_p = std::max(max_p, variance_q(cols, 2.0).value / wd.value);
            max_l = std::max(max_l, entropy_q(cols, 2.0).value / wd.value);
        } catch (const InputError&) {
            continue;
        }
    }
    TheoremConstants Mc{1.0 / (1.1 * max_p), 0.0, Provenance::Manual};
    auto prep = check_weighted(slow, eval, WeightedKind::WPoincareLog, 2.0, Mc, suite);
    TheoremConstants Lc{1.1 * max_l, 0.0, Provenance::Manual};
    auto lrep = check_weighted(slow, eval, WeightedKind::WLSLog, 2.0, Lc, suite);
    CHECK(count_violated(prep) == 0);
    CHECK(count_violated(lrep) == 0);

    // constant functions: the weighted u-bound lhs floor mu U <= D
    auto c1 = constants_thm4_5ii1(40.0, 3, 60.0);
    auto crep = check_weighted(slow, eval, WeightedKind::SlowTailIIq1, 1.0, c1, {constant_fn(1.0)});
    CHECK(crep[0].lhs.value < c1.D);
    CHECK(crep[0].verdict == Verdict::HOLDS);
}

TEST_CASE("theorem chain closes: quartic measure Poincare with searched constant") {
    auto m4 = power_measure(Space::euclidean(1), 1.0, 4.0);
    auto train = sample(m4, 15000, 91);
    auto eval = sample(m4, 30000, 92);
    auto suite = default_suite(m4.space, {10, 8, 5, 3, 93});
    auto sr = best_constant_search(m4, train, RatioKind::Poincare, 2.0, fourier_family(m4.space, 2),
                                   1200, 94);
    double ratio = std::max(sr.ratio, suite_max_ratio(m4, train, RatioKind::Poincare, 2.0, suite));
    auto rep = check_poincare(m4, eval, 2.0, 1.0 / (1.1 * ratio), suite);
    CHECK(count_violated(rep) == 0);
}
