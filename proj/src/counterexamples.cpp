#include "ubl/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ubl {

namespace {

// inverse-CDF table for the radial proposal density s e^{kappa s} on [0, smax]
struct RadialProposal {
    double smax;
    double kappa;
    std::vector<double> grid, cdf;
    double total = 0.0;

    RadialProposal(double smax_, double kappa_) : smax(smax_), kappa(kappa_) {
        const int cells = 512;
        grid.resize(cells + 1);
        cdf.assign(cells + 1, 0.0);
        for (int i = 0; i <= cells; ++i) grid[i] = smax * i / cells;
        for (int i = 0; i < cells; ++i) {
            // trapezoid on the cell; integrand s e^{kappa (s - smax)} scaled
            double a = grid[i], b = grid[i + 1];
            double fa = a * std::exp(kappa * (a - smax));
            double fb = b * std::exp(kappa * (b - smax));
            cdf[i + 1] = cdf[i] + 0.5 * (fa + fb) * (b - a);
        }
        total = cdf.back();
    }

    double sample(double u) const {
        double target = u * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        int i = std::clamp(static_cast<int>(it - cdf.begin()) - 1, 0,
                           static_cast<int>(grid.size()) - 2);
        double frac = (target - cdf[i]) / std::max(cdf[i + 1] - cdf[i], 1e-300);
        return grid[i] + frac * (grid[i + 1] - grid[i]);
    }

    // log density at s (normalized over the disc x z-slab jointly elsewhere)
    double log_density(double s) const {
        return std::log(std::max(s, 1e-300)) + kappa * (s - smax) - std::log(total);
    }
};

}  // namespace

NoLSPoint no_ls_ratio(const NoLSExperiment& exp, double t, HomogeneousNormKind norm, double logZ,
                      std::uint64_t seed) {
    const Space h1 = Space::heisenberg(1);
    if (!(exp.q > 1.0) || exp.q > 2.0) throw InputError("no_ls_ratio: q in (1,2]");
    if (!(exp.p >= 1.0)) throw InputError("no_ls_ratio: p >= 1");

    NoLSPoint out;
    out.t = t;
    out.r = std::pow(t, 0.5 * (1.0 - exp.p));
    double phi_x0 = kaplan_norm(exp.x0);
    out.valid = t * phi_x0 > 4.0 * out.r;

    const GroupPoint center = dilate(t, exp.x0);
    const double r = out.r;
    const double ball = 2.0 * r;
    const double zb = ball * ball / (4.0 * M_PI) * 1.05;
    const double A = exp.beta * std::pow(homogeneous_norm(norm, center), exp.p);

    // CC boundary layer: density varies like e^{beta p d0^{p-1} s} across the
    // ball because |grad d| = 1 there (no gradient zero at the center)
    double kappa = 0.0;
    if (norm == HomogeneousNormKind::CarnotCaratheodory)
        kappa = exp.beta * exp.p * std::pow(cc_distance(center), exp.p - 1.0);
    RadialProposal prop(ball, kappa);

    const double q = exp.q;
    std::size_t M = exp.n_samples;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Rng rng(derive_seed(seed, 1000 + attempt));
        std::vector<double> wlog(M), col_mass(M), col_ent(M), col_energy(M);
        double span_lo = 1e300, span_hi = -1e300, grad_max = 0.0;
        std::size_t in_ball = 0;
        for (std::size_t j = 0; j < M; ++j) {
            double s = prop.sample(rng.uniform());
            double th = rng.uniform(0.0, 2.0 * M_PI);
            double uz = rng.uniform(-zb, zb);
            GroupPoint u{h1, {}, uz};
            u.x[0] = s * std::cos(th);
            u.x[1] = s * std::sin(th);
            double du = cc_distance(u);
            col_mass[j] = col_ent[j] = col_energy[j] = wlog[j] = 0.0;
            if (du > ball) continue;
            ++in_ball;
            GroupPoint x = group_mul(center, u);
            double dU = exp.beta * std::pow(homogeneous_norm(norm, x), exp.p) - A;
            span_lo = std::min(span_lo, dU);
            span_hi = std::max(span_hi, dU);
            // proposal log density in cartesian coordinates
            double lprop = prop.log_density(s) - std::log(std::max(s, 1e-300)) -
                           std::log(2.0 * M_PI) - std::log(2.0 * zb);
            double w = std::exp(-dU - lprop);
            double f = std::clamp(2.0 - du / r, 0.0, 1.0);
            double fq = std::pow(f, q);
            wlog[j] = w * (fq > 0.0 ? 1.0 : 0.0);
            col_mass[j] = w * fq;
            col_ent[j] = w * (fq > 0.0 ? fq * std::log(fq) : 0.0);
            col_energy[j] = w * (du > r && du < ball ? std::pow(1.0 / r, q) : 0.0);
            // spot-check |grad f| <= 1/r by finite differences on the annulus
            if (du > 1.2 * r && du < 0.9 * ball && j % 997 == 0 && cc_differentiable(u)) {
                ScalarField fball = [&center, r](const GroupPoint& y) {
                    double dy = cc_distance(group_mul(group_inverse(center), y));
                    return std::clamp(2.0 - dy / r, 0.0, 1.0);
                };
                double gn = horizontal_gradient_norm(fball, x, 1e-5 * r);
                grad_max = std::max(grad_max, gn * r);
            }
        }
        (void)in_ball;

        double sw = pairwise_sum(wlog), sw2 = 0.0;
        for (double v : wlog) sw2 += v * v;
        out.ess = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
        if (out.ess < 1000.0 && attempt < 3) {
            M *= 2;
            continue;
        }

        auto bs = block_sums({&col_ent, &col_mass, &col_energy});
        double off = A + logZ;
        auto ratio_combine = [off](const std::vector<double>& sums, double n) {
            double jm = sums[1] / n;
            double je = sums[2] / n;
            if (!(jm > 0.0) || !(je > 0.0)) return 0.0;
            return (sums[0] / n + jm * (off - std::log(jm))) / je;
        };
        auto est = jackknife(bs, ratio_combine);
        out.ratio = est.value;
        out.ratio_se = est.std_error;
        double jm = pairwise_sum(col_mass) / static_cast<double>(M);
        double je = pairwise_sum(col_energy) / static_cast<double>(M);
        double j1 = pairwise_sum(col_ent) / static_cast<double>(M);
        out.log_mass = std::log(jm) - off;
        out.log_energy = std::log(je) - off;
        out.log_entropy = std::log(j1 + jm * (off - std::log(jm))) - off;
        out.exp_factor_span = span_hi - span_lo;
        out.grad_bound_max = grad_max;
        break;
    }
    return out;
}

NoLSTable no_ls_run(const NoLSExperiment& exp, bool cc_control) {
    NoLSTable table;
    auto mk = power_measure(Space::heisenberg(1), exp.beta, exp.p, HomogeneousNormKind::Kaplan);
    table.logZ_kaplan = normalize(mk, 1e-6).logZ;
    for (std::size_t i = 0; i < exp.t_grid.size(); ++i)
        table.kaplan.push_back(no_ls_ratio(exp, exp.t_grid[i], HomogeneousNormKind::Kaplan,
                                           table.logZ_kaplan, derive_seed(exp.seed, i)));
    if (cc_control) {
        auto mc = power_measure(Space::heisenberg(1), exp.beta, exp.p);
        table.logZ_cc = normalize(mc, 1e-6).logZ;
        for (std::size_t i = 0; i < exp.t_grid.size(); ++i)
            table.cc.push_back(no_ls_ratio(exp, exp.t_grid[i], HomogeneousNormKind::CarnotCaratheodory,
                                           table.logZ_cc, derive_seed(exp.seed, 100 + i)));
    }
    return table;
}

std::vector<InequalityReport> no_ls_lsq_reports(const std::vector<NoLSPoint>& rows, double c) {
    std::vector<InequalityReport> out;
    for (const auto& row : rows) {
        if (!row.valid) continue;
        InequalityReport r;
        r.kind = "lsq_nols";
        r.function_id = "plateau_t" + std::to_string(row.t);
        r.constants = {c, 0.0, Provenance::Manual};
        r.lhs = Estimate{row.ratio, row.ratio_se, 0, EstimateMethod::MC};
        r.rhs = Estimate{c, 0.0, 0, EstimateMethod::MC};
        r.margin = c - row.ratio;
        r.margin_se = row.ratio_se;
        r.margin_sigmas = r.margin_se > 0 ? r.margin / r.margin_se : (r.margin >= 0 ? 1e308 : -1e308);
        if (-r.margin > 3.0 * r.margin_se)
            r.verdict = Verdict::VIOLATED;
        else if (r.margin >= -r.margin_se)
            r.verdict = Verdict::HOLDS;
        else
            r.verdict = Verdict::INCONCLUSIVE;
        out.push_back(r);
    }
    return out;
}

void write_nols_csv(const std::vector<NoLSPoint>& rows, const std::string& norm_label,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DiagnosticError("write_nols_csv: cannot open " + path);
    out << "norm,t,r,valid,log_entropy,log_energy,ratio,ratio_se,ess\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%d,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      norm_label.c_str(), r.t, r.r, r.valid ? 1 : 0, r.log_entropy, r.log_energy,
                      r.ratio, r.ratio_se, r.ess);
        out << buf;
    }
}

}  // namespace ubl
