#include "ubl/counterexamples.hpp"
#include <fstream>

#include <cmath>

#include "doctest.h"
#include "ubl/common.hpp"

using namespace ubl;

namespace {

struct Fixture {
    NoLSExperiment exp;
    NoLSTable table;
    Fixture() {
        exp.t_grid = {2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
        exp.n_samples = 20000;
        table = no_ls_run(exp, true);
    }
};

Fixture& fix() {
    static Fixture f;
    return f;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("validity flag enforces the ball-separation precondition") {
    auto& f = fix();
    CHECK_FALSE(f.table.kaplan[0].valid);  // t = 2: t < 4 r = 4 t^{-1/2}
    for (std::size_t i = 1; i < f.table.kaplan.size(); ++i) CHECK(f.table.kaplan[i].valid);
}

TEST_CASE("Kaplan-norm ratio diverges across the grid") {
    auto& f = fix();
    const auto& rows = f.table.kaplan;
    double first = 0.0, last = 0.0;
    double prev = -1e300;
    for (const auto& row : rows) {
        if (!row.valid) continue;
        if (first == 0.0) first = row.ratio;
        CHECK(row.ratio > prev);
        prev = row.ratio;
        last = row.ratio;
        CHECK(row.ess >= 1000.0);
    }
    CHECK(last > 10.0 * first);
}

TEST_CASE("entropy tracks t^p and energy tracks r^{-q} on the valid rows") {
    auto& f = fix();
    std::vector<double> lt, lent, lr, lene;
    for (const auto& row : f.table.kaplan) {
        if (!row.valid) continue;
        lt.push_back(std::log(std::pow(row.t, f.exp.p)));
        lent.push_back(row.log_entropy - row.log_mass);
        lr.push_back(std::log(std::pow(row.r, -f.exp.q)));
        lene.push_back(row.log_energy - row.log_mass);
    }
    double s1 = loglog_slope(lt, lent);
    CHECK(s1 >= 0.8);
    CHECK(s1 <= 1.2);
    double s2 = loglog_slope(lr, lene);
    CHECK(s2 >= 0.8);
    CHECK(s2 <= 1.2);
}

TEST_CASE("exponential factor is comparable to a constant on the support") {
    auto& f = fix();
    for (const auto& row : f.table.kaplan) {
        if (!row.valid) continue;
        CHECK(row.exp_factor_span < 10.0);
    }
    // and the plateau gradient bound |grad f| <= 1/r holds on samples
    for (const auto& row : f.table.kaplan)
        if (row.valid) CHECK(row.grad_bound_max <= 1.01);
}

TEST_CASE("CC-norm control column stays within a bounded band") {
    auto& f = fix();
    double lo = 1e300, hi = -1e300;
    for (const auto& row : f.table.cc) {
        if (!row.valid) continue;
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
        CHECK(row.ess >= 1000.0);
    }
    CHECK(hi / lo < 5.0);
}

TEST_CASE("the table certifies VIOLATED verdicts for any LS_q candidate") {
    auto& f = fix();
    double first_ratio = 0.0;
    for (const auto& row : f.table.kaplan)
        if (row.valid) {
            first_ratio = row.ratio;
            break;
        }
    for (double c : {0.5 * first_ratio, 2.0 * first_ratio, 10.0 * first_ratio}) {
        auto reports = no_ls_lsq_reports(f.table.kaplan, c);
        int violated = 0;
        for (const auto& r : reports)
            if (r.verdict == Verdict::VIOLATED) ++violated;
        CHECK(violated >= 1);
    }
}

TEST_CASE("csv artifact") {
    auto& f = fix();
    write_nols_csv(f.table.kaplan, "kaplan", "/tmp/ubl_test_nols.csv");
    std::ifstream in("/tmp/ubl_test_nols.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "norm,t,r,valid,log_entropy,log_energy,ratio,ratio_se,ess");
}
