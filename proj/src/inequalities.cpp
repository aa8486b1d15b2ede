#include "ubl/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "ubl/quadrature.hpp"

namespace ubl {

TheoremConstants constants_thm2_5(double beta, double p, double sigma, double eps, double K) {
    if (!(beta > 0.0) || !(p > 0.0) || !(sigma >= 1.0) || K < 0.0)
        throw InputError("constants_thm2_5: need beta, p > 0, sigma >= 1, K >= 0");
    double inv = 1.0 / (sigma * sigma);
    if (!(eps >= 0.0) || !(eps < inv)) throw InputError("constants_thm2_5: eps in [0, 1/sigma^2)");
    double C = 1.0 / ((inv - eps) * beta * p);
    double D = K / ((inv - eps) * beta * p) + std::pow(2.0, p - 1.0) + C;
    return {C, D, Provenance::Thm2_5};
}

TheoremConstants constants_thm2_6(const TheoremConstants& base, double delta, double gamma, double oscV) {
    if (!(base.C * delta < 1.0)) throw InputError("constants_thm2_6: need delta < 1/C");
    double s = std::exp(2.0 * oscV);
    double C = s * base.C / (1.0 - base.C * delta);
    double D = s * (base.D + gamma) / (1.0 - base.C * delta);
    return {C, D, Provenance::Thm2_6};
}

namespace {

double smallest_pow2(const std::function<double(double)>& term) {
    double v = 1.0;
    for (int k = 0; k < 200; ++k) {
        if (term(v) <= 1.0 / 6.0) return v;
        v *= 2.0;
    }
    throw DiagnosticError("constants_thm2_5p: no admissible power of two");
}

}  // namespace

TheoremConstants constants_thm2_5p(const TheoremConstants& base, double q, double p) {
    if (!(q >= 1.0)) throw InputError("constants_thm2_5p: q >= 1");
    if (!(p > 1.0)) throw InputError("constants_thm2_5p: p > 1");
    double C = base.C;
    double D = base.D + 1.0;  // max(1,d)^{p-1} <= 1 + d^{p-1}
    if (q == 1.0) return {C, C + D, Provenance::Thm2_5p};
    double qc = q / (q - 1.0);
    double alpha = smallest_pow2([&](double a) { return C * (q - 1.0) / std::pow(a, qc); });
    double beta = smallest_pow2([&](double b) { return D * (q - 1.0) / (std::pow(b, qc) * q); });
    double denom =
        1.0 - C * (q - 1.0) / std::pow(alpha, qc) - D * (q - 1.0) / (std::pow(beta, qc) * q);
    double Cq, Dq;
    if ((q - 1.0) * (p - 1.0) <= 1.0) {
        Cq = C * std::pow(alpha, q) / denom;
        Dq = (C + D * std::pow(beta, q) / q) / denom;
    } else {
        double ex = q * (p - 1.0) / ((q - 1.0) * (p - 1.0) - 1.0);
        double num = C * ((q - 1.0) * (q - 1.0) * (p - 1.0) - (q - 1.0)) / q;
        double gamma = smallest_pow2([&](double g) { return num / std::pow(g, ex); });
        denom -= num / std::pow(gamma, ex);
        Cq = C * std::pow(alpha, q) / denom;
        Dq = (C * p * std::pow(gamma, q * (p - 1.0) / p) + D * std::pow(beta, q) / q) / denom;
    }
    return {Cq, Dq, Provenance::Thm2_5p};
}

TheoremConstants constants_thm4_5ii1(double beta, int N, double b1) {
    if (!(beta > N)) throw InputError("constants_thm4_5ii1: requires beta > N");
    return {beta / (beta - static_cast<double>(N)), b1, Provenance::Thm4_5ii1};
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::HOLDS:
            return "HOLDS";
        case Verdict::VIOLATED:
            return "VIOLATED";
        default:
            return "INCONCLUSIVE";
    }
}

namespace {

using Combine = std::function<double(const std::vector<double>&, double)>;

InequalityReport make_report(const std::string& kind, const std::string& fid,
                             const std::vector<const std::vector<double>*>& cols, const Combine& lhs,
                             const Combine& rhs, const TheoremConstants& constants) {
    auto bs = block_sums(cols);
    InequalityReport r;
    r.kind = kind;
    r.function_id = fid;
    r.constants = constants;
    r.lhs = jackknife(bs, lhs);
    r.rhs = jackknife(bs, rhs);
    auto em = jackknife(bs, [&](const std::vector<double>& s, double n) { return rhs(s, n) - lhs(s, n); });
    r.margin = em.value;
    r.margin_se = em.std_error;
    r.margin_sigmas = em.std_error > 0.0
                          ? em.value / em.std_error
                          : (em.value >= 0.0 ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity());
    if (-r.margin > 3.0 * r.margin_se)
        r.verdict = Verdict::VIOLATED;
    else if (r.margin >= -r.margin_se)
        r.verdict = Verdict::HOLDS;
    else
        r.verdict = Verdict::INCONCLUSIVE;
    return r;
}

std::vector<double> pow_abs_col(const std::vector<double>& f, double q) {
    std::vector<double> c(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = std::pow(std::abs(f[i]), q);
    return c;
}

std::vector<double> weighted_col(const std::vector<double>& base, const std::vector<double>& d,
                                 const std::function<double(double)>& w) {
    std::vector<double> c(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) c[i] = w(d[i]) * base[i];
    return c;
}

double potential_of_d(const MeasureSpec& m, double d) {
    switch (m.pot.kind) {
        case PotentialSpec::Kind::Power:
            return m.pot.beta * std::pow(d, m.pot.p) + m.pot.W.value(d, m.pot.p) + m.pot.V.value(d);
        case PotentialSpec::Kind::SlowTail:
            return m.pot.beta * std::log1p(d);
        case PotentialSpec::Kind::HeatKernelSurrogate:
            throw InputError("U(d) weight undefined for the surrogate measure");
    }
    return 0.0;
}

double potential_dprime(const MeasureSpec& m, double d) {
    switch (m.pot.kind) {
        case PotentialSpec::Kind::Power:
            return m.pot.beta * m.pot.p * std::pow(d, m.pot.p - 1.0) + m.pot.W.dvalue(d, m.pot.p) +
                   (m.pot.V.none() ? 0.0 : -2.0 * d * m.pot.V.c * std::exp(-d * d));
        case PotentialSpec::Kind::SlowTail:
            return m.pot.beta / (1.0 + d);
        case PotentialSpec::Kind::HeatKernelSurrogate:
            throw InputError("U'(d) undefined for the surrogate measure");
    }
    return 0.0;
}

}  // namespace

std::vector<InequalityReport> check_ubound(const MeasureSpec& m, const SampleSet& ss, double q,
                                           UboundForm form, const TheoremConstants& constants,
                                           const std::vector<TestFunction>& suite) {
    double p = m.pot.p;
    std::function<double(double)> w;
    std::string kind;
    switch (form) {
        case UboundForm::WeightDp1:
            if (q != 1.0) throw InputError("check_ubound: form 2.z requires q = 1");
            w = [p](double d) { return std::pow(d, p - 1.0); };
            kind = "ubound_2z";
            break;
        case UboundForm::WeightDqp:
            w = [p, q](double d) { return std::pow(d, q * (p - 1.0)); };
            kind = "ubound_2ap";
            break;
        case UboundForm::WeightDpConj:
            if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-9)
                throw InputError("check_ubound: form 2.ap_bis requires 1/p + 1/q = 1");
            w = [p](double d) { return std::pow(d, p); };
            kind = "ubound_2ap_bis";
            break;
        case UboundForm::WeightDtheta:
            if (q != 2.0) throw InputError("check_ubound: form 2x.a requires q = 2");
            w = [p](double d) { return std::pow(d, 2.0 * (p - 1.0)); };
            kind = "ubound_2xa";
            break;
        case UboundForm::WeightU:
            w = [&m](double d) { return potential_of_d(m, d); };
            kind = "ubound_U";
            break;
    }

    std::vector<InequalityReport> out(suite.size());
    double C = constants.C, D = constants.D;
    parallel_for(suite.size(), [&](std::size_t i) {
        const auto& f = suite[i];
        auto cols = evaluate_columns(f, ss, true);
        auto mass = pow_abs_col(cols.f, q);
        auto lhs_col = weighted_col(mass, ss.d, w);
        auto grad = pow_abs_col(cols.gnorm, q);
        out[i] = make_report(
            kind, f.id, {&lhs_col, &grad, &mass},
            [](const std::vector<double>& s, double n) { return s[0] / n; },
            [C, D](const std::vector<double>& s, double n) { return C * s[1] / n + D * s[2] / n; },
            constants);
    });
    return out;
}

std::vector<InequalityReport> check_poincare(const MeasureSpec&, const SampleSet& ss, double q,
                                             double M_candidate, const std::vector<TestFunction>& suite) {
    if (!(M_candidate > 0.0)) throw InputError("check_poincare: M_candidate must be positive");
    std::vector<InequalityReport> out(suite.size());
    TheoremConstants cst{M_candidate, 0.0, Provenance::Manual};
    parallel_for(suite.size(), [&](std::size_t k) {
        const auto& f = suite[k];
        auto cols = evaluate_columns(f, ss, true);
        double mean = pairwise_sum(cols.f) / static_cast<double>(cols.n);
        std::vector<double> var(cols.n);
        for (std::size_t i = 0; i < cols.n; ++i) var[i] = std::pow(std::abs(cols.f[i] - mean), q);
        auto grad = pow_abs_col(cols.gnorm, q);
        out[k] = make_report(
            "poincare", f.id, {&var, &grad},
            [M_candidate](const std::vector<double>& s, double n) { return M_candidate * s[0] / n; },
            [](const std::vector<double>& s, double n) { return s[1] / n; }, cst);
    });
    return out;
}

std::vector<InequalityReport> check_lsq(const MeasureSpec&, const SampleSet& ss, double q,
                                        double c_candidate, const std::vector<TestFunction>& suite) {
    std::vector<InequalityReport> out(suite.size());
    TheoremConstants cst{c_candidate, 0.0, Provenance::Manual};
    parallel_for(suite.size(), [&](std::size_t k) {
        const auto& f = suite[k];
        auto cols = evaluate_columns(f, ss, true);
        auto a = pow_abs_col(cols.f, q);
        std::vector<double> b(cols.n);
        for (std::size_t i = 0; i < cols.n; ++i) b[i] = a[i] > 0.0 ? a[i] * std::log(a[i]) : 0.0;
        auto grad = pow_abs_col(cols.gnorm, q);
        out[k] = make_report(
            "lsq", f.id, {&a, &b, &grad},
            [](const std::vector<double>& s, double n) {
                double ma = s[0] / n;
                return ma > 0.0 ? s[1] / n - ma * std::log(ma) : 0.0;
            },
            [c_candidate](const std::vector<double>& s, double n) { return c_candidate * s[2] / n; },
            cst);
    });
    return out;
}

std::vector<InequalityReport> check_phi_entropy(const MeasureSpec&, const SampleSet& ss, double theta,
                                                double c_candidate,
                                                const std::vector<TestFunction>& suite) {
    if (theta < 1.0 || theta > 2.0) throw InputError("check_phi_entropy: theta in [1,2]");
    double vs = 2.0 * (theta - 1.0) / theta;
    std::vector<InequalityReport> out;
    TheoremConstants cst{c_candidate, 0.0, Provenance::Manual};
    for (const auto& f : suite) {
        auto cols = evaluate_columns(f, ss, true);
        std::vector<double> a(cols.n), u(cols.n);
        for (std::size_t i = 0; i < cols.n; ++i) {
            a[i] = cols.f[i] * cols.f[i];
            u[i] = phi_orlicz(a[i], vs);
        }
        auto grad = pow_abs_col(cols.gnorm, 2.0);
        out.push_back(make_report(
            "phi_entropy", f.id, {&a, &u, &grad},
            [vs](const std::vector<double>& s, double n) { return s[1] / n - phi_orlicz(s[0] / n, vs); },
            [c_candidate](const std::vector<double>& s, double n) { return c_candidate * s[2] / n; },
            cst));
    }
    return out;
}

std::vector<InequalityReport> check_weighted(const MeasureSpec& m, const SampleSet& ss, WeightedKind kind,
                                             double q, const TheoremConstants& constants,
                                             const std::vector<TestFunction>& suite,
                                             const WeightedParams& params) {
    double p = m.pot.p;
    int N = m.space.homogeneous_dim();
    std::function<double(double)> lhs_w, grad_w;
    std::string kname;
    bool centered = false, entropy = false, with_D = true;
    switch (kind) {
        case WeightedKind::Thm4_4_1:
            if (q != 2.0) throw InputError("check_weighted: Thm4_4_1 requires q = 2");
            if (!(p > 2.0)) throw InputError("check_weighted: Thm4_4_1 requires p > 2");
            lhs_w = [p](double d) { return std::pow(d, p); };
            grad_w = [p](double d) { return std::pow(1.0 + d * d, 0.5 * (2.0 - p)); };
            kname = "weighted_thm4_4_1";
            break;
        case WeightedKind::SlowTailI: {
            double alpha = p, kappa = params.kappa;
            lhs_w = [&m](double d) { return potential_of_d(m, d); };
            double ex = q * kappa - (q - 1.0) * alpha;
            grad_w = [ex](double d) { return std::pow(d, ex); };
            kname = "weighted_slowtail_i";
            break;
        }
        case WeightedKind::SlowTailIIq1:
            if (q != 1.0) throw InputError("check_weighted: case (ii) first form requires q = 1");
            [[fallthrough]];
        case WeightedKind::SlowTailIIq: {
            if (m.pot.kind != PotentialSpec::Kind::SlowTail)
                throw InputError("check_weighted: slow-tail measure required");
            if (!(m.pot.beta > N)) throw InputError("check_weighted: requires beta > N");
            double beta = m.pot.beta;
            lhs_w = [beta](double d) { return beta * std::log1p(d); };
            grad_w = [q](double d) { return std::pow(d, q) * std::log1p(d); };
            kname = kind == WeightedKind::SlowTailIIq1 ? "weighted_slowtail_ii_q1" : "weighted_slowtail_ii_q";
            break;
        }
        case WeightedKind::WPoincare1:
            if (q != 1.0) throw InputError("check_weighted: WPoincare1 requires q = 1");
            [[fallthrough]];
        case WeightedKind::WPoincareQ:
            centered = true;
            with_D = false;
            grad_w = [q](double d) { return std::pow(1.0 + d, q); };
            kname = "weighted_poincare";
            break;
        case WeightedKind::WPoincareLog:
            centered = true;
            with_D = false;
            grad_w = [q](double d) { return std::pow(1.0 + d, q) * std::log(M_E + d); };
            kname = "weighted_poincare_log";
            break;
        case WeightedKind::WLSLog:
            entropy = true;
            with_D = false;
            grad_w = [q](double d) { return std::pow(1.0 + d, q) * std::log(M_E + d); };
            kname = "weighted_ls_log";
            break;
    }

    std::vector<InequalityReport> out;
    double C = constants.C, D = constants.D;
    for (const auto& f : suite) {
        auto cols = evaluate_columns(f, ss, true);
        auto gq = pow_abs_col(cols.gnorm, q);
        auto wgrad = weighted_col(gq, ss.d, grad_w);
        if (entropy) {
            auto a = pow_abs_col(cols.f, q);
            std::vector<double> b(cols.n);
            for (std::size_t i = 0; i < cols.n; ++i) b[i] = a[i] > 0.0 ? a[i] * std::log(a[i]) : 0.0;
            out.push_back(make_report(
                kname, f.id, {&a, &b, &wgrad},
                [](const std::vector<double>& s, double n) {
                    double ma = s[0] / n;
                    return ma > 0.0 ? s[1] / n - ma * std::log(ma) : 0.0;
                },
                [C](const std::vector<double>& s, double n) { return C * s[2] / n; }, constants));
            continue;
        }
        if (centered) {
            double mean = pairwise_sum(cols.f) / static_cast<double>(cols.n);
            std::vector<double> var(cols.n);
            for (std::size_t i = 0; i < cols.n; ++i) var[i] = std::pow(std::abs(cols.f[i] - mean), q);
            out.push_back(make_report(
                kname, f.id, {&var, &wgrad},
                [C](const std::vector<double>& s, double n) { return C * s[0] / n; },
                [](const std::vector<double>& s, double n) { return s[1] / n; }, constants));
            continue;
        }
        auto mass = pow_abs_col(cols.f, q);
        auto lhs_col = weighted_col(mass, ss.d, lhs_w);
        out.push_back(make_report(
            kname, f.id, {&lhs_col, &wgrad, &mass},
            [](const std::vector<double>& s, double n) { return s[0] / n; },
            [C, D, with_D](const std::vector<double>& s, double n) {
                return C * s[1] / n + (with_D ? D * s[2] / n : 0.0);
            },
            constants));
    }
    return out;
}

namespace {

// log of the cylindrical integral over H_l of exp(-factor * U) (half z-plane
// times 2), with truncation-doubling self-check.
double log_integral_heis(const MeasureSpec& m, double factor, double tol) {
    int l = m.space.param;
    double beta_eff =
        (m.pot.kind == PotentialSpec::Kind::HeatKernelSurrogate ? 0.25 : m.pot.beta) * factor;
    double p_eff = m.pot.kind == PotentialSpec::Kind::HeatKernelSurrogate ? 2.0 : m.pot.p;
    if (!(beta_eff > 0.0)) throw DiagnosticError("log_integral_heis: non-integrable exponent");
    double lam = -std::log(1e-18);
    double R0 = 2.0 * std::pow(lam / beta_eff, 1.0 / p_eff) + 4.0;
    double Z0 = std::pow(lam / beta_eff, 2.0 / p_eff) + 4.0;
    double prev = 0.0;
    for (int round = 0; round < 5; ++round) {
        double Rr = R0 * (1 << round), Zm = Z0 * (1 << round);
        Fn1 outer = [&](double rho) {
            auto inner = log_integrate(
                [&](double z) {
                    GroupPoint g{m.space, {}, z};
                    g.x[0] = rho;
                    return -factor * potential_value(m, g);
                },
                0.0, Zm, 0.2 * tol, 24);
            return (2 * l - 1) * std::log(std::max(rho, 1e-300)) + inner.value;
        };
        auto q = log_integrate(outer, 0.0, Rr, 0.2 * tol, 24);
        double cur = std::log(2.0 * std::pow(M_PI, l) / std::tgamma(l)) + std::log(2.0) + q.value;
        if (round > 0 && std::abs(cur - prev) < std::max(tol, 1e-9)) return cur;
        prev = cur;
    }
    throw DiagnosticError("log_integral_heis: no convergence under truncation doubling", prev);
}

}  // namespace

double log_moment_expU(const MeasureSpec& m, double eps, double tol) {
    if (!m.logZ) throw InputError("log_moment_expU: normalize first");
    if (!m.space.heisenberg_like()) {
        int n = m.space.param;
        MeasureSpec probe = m;
        Fn1 g = [&](double r) {
            GroupPoint gp{m.space, {}, 0.0};
            gp.x[0] = r;
            return (n - 1) * std::log(std::max(r, 1e-300)) - (1.0 - eps) * potential_value(m, gp);
        };
        double beta = m.pot.beta, p = m.pot.p;
        double r0 = 1.0;
        for (double r = 1.0; r < 500.0; r += 0.5) {
            GroupPoint gp{m.space, {}, 0.0};
            gp.x[0] = r;
            if (potential_value(m, gp) < 0.5 * beta * std::pow(r, p)) r0 = r + 1.0;
        }
        double be = 0.5 * beta * (1.0 - eps);
        if (!(be > 0.0)) throw DiagnosticError("log_moment_expU: eps too large");
        Fn1 bound = [n, be, p, r0](double R) {
            double Reff = std::max(R, r0);
            return (n - 1) * std::log(Reff) - be * std::pow(Reff, p) -
                   std::log(be * p * std::pow(Reff, p - 1.0));
        };
        auto q = log_integrate_tail(g, 0.0, tol, bound);
        return std::log(2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n)) + q.value - *m.logZ;
    }
    return log_integral_heis(m, 1.0 - eps, tol) - *m.logZ;
}

ConverseResult check_converse_ubound(const MeasureSpec& m, const SampleSet& ss, double q, double a,
                                     double b, double c_ls, const std::vector<TestFunction>& suite) {
    if (!(q > 1.0) || q > 2.0) throw InputError("check_converse_ubound: q in (1,2]");
    // pre-flight: |grad U|^q <= a U + b on the samples (|grad d| = 1 a.e.)
    for (double d : ss.d) {
        double gU = std::abs(potential_dprime(m, d));
        double U = potential_of_d(m, d);
        if (std::pow(gU, q) > a * U + b + 1e-9)
            throw DiagnosticError("check_converse_ubound: |grad U|^q <= aU + b fails at d = " +
                                      std::to_string(d),
                                  d);
    }
    ConverseResult res;
    for (int k = 1; k <= 8; ++k) {
        double eps = std::ldexp(1.0, -k);
        try {
            res.log_mu_expU = log_moment_expU(m, eps);
            res.eps_hat = eps;
            break;
        } catch (const DiagnosticError&) {
            continue;
        }
    }
    if (res.eps_hat == 0.0) throw DiagnosticError("check_converse_ubound: no admissible eps");
    res.constants = {c_ls / res.eps_hat, res.log_mu_expU / res.eps_hat, Provenance::Manual};
    res.reports = check_ubound(m, ss, q, UboundForm::WeightU, res.constants, suite);
    return res;
}

ExpBoundResult check_exp_bound(const MeasureSpec& m, const SampleSet& ss, const TestFunction& f, double a,
                               double b, double c_ls, double q, const std::vector<double>& t_grid,
                               double eps) {
    (void)m;
    if (!(q > 1.0) || q > 2.0) throw InputError("check_exp_bound: q in (1,2]");
    if (!(eps > 0.0) || !(eps < 1.0)) throw InputError("check_exp_bound: eps in (0,1)");
    auto cols = evaluate_columns(f, ss, true);
    for (std::size_t i = 0; i < cols.n; ++i) {
        if (std::pow(cols.gnorm[i], q) > a * cols.f[i] + b + 1e-9)
            throw DiagnosticError("check_exp_bound: |grad f|^q <= a f + b fails on a sample");
    }
    ExpBoundResult out;
    out.eps = eps;
    out.C = c_ls * b * std::pow(q, -q) / ((q - 1.0) * (1.0 - eps));
    for (double t : t_grid) {
        double kappa = c_ls * a * std::pow(q, -q) * std::pow(t, q - 1.0);
        double delta = kappa / ((q - 1.0) * (1.0 - eps));
        if (!(kappa < eps) || !(delta < 1.0))
            throw InputError("check_exp_bound: t outside the admissible range");
        double s = (1.0 - delta) * t;
        double M = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cols.n; ++i) M = std::max(M, s * cols.f[i]);
        std::vector<double> ecol(cols.n);
        for (std::size_t i = 0; i < cols.n; ++i) ecol[i] = std::exp(s * cols.f[i] - M);
        auto bs = block_sums({&ecol, &cols.f});
        double C = out.C;
        auto em2 = jackknife(bs, [M, t, C, q](const std::vector<double>& sums, double n) {
            return (t * sums[1] / n + C * std::pow(t, q)) - (M + std::log(sums[0] / n));
        });
        ExpBoundPoint pt;
        pt.t = t;
        pt.delta = delta;
        auto el = jackknife(bs, [M](const std::vector<double>& sums, double n) {
            return M + std::log(sums[0] / n);
        });
        pt.log_lhs = el.value;
        pt.log_rhs = em2.value + el.value;
        pt.se = em2.std_error;
        if (-em2.value > 3.0 * em2.std_error)
            pt.verdict = Verdict::VIOLATED;
        else if (em2.value >= -em2.std_error)
            pt.verdict = Verdict::HOLDS;
        else
            pt.verdict = Verdict::INCONCLUSIVE;
        if (pt.verdict != Verdict::HOLDS) out.all_hold = false;
        out.points.push_back(pt);
    }
    // G(t) monotone and G(t) -> mu f as t -> 0+
    auto curve = exp_moment_curve(cols, t_grid);
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].G < curve[i - 1].G - 2.0 * (curve[i].se + curve[i - 1].se)) out.g_monotone = false;
    auto bsf = block_sums({&cols.f});
    auto ef = jackknife(bsf, [](const std::vector<double>& s, double n) { return s[0] / n; });
    if (!curve.empty()) {
        double gap = std::abs(curve.front().G - ef.value);
        double se = curve.front().se + ef.std_error + 1e-12;
        // G(t_min) - mu f ~ t_min * Var/2; count that drift into the budget
        out.g_limit_gap = gap / (se + 0.5 * curve.front().t * std::max(ef.value * ef.value, 1.0));
    }
    return out;
}

ReportSummary summarize(const std::string& kind, const std::vector<InequalityReport>& reports) {
    ReportSummary s;
    s.kind = kind;
    s.min_margin_sigmas = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
        if (r.verdict == Verdict::HOLDS) ++s.n_holds;
        if (r.verdict == Verdict::VIOLATED) ++s.n_violated;
        if (r.verdict == Verdict::INCONCLUSIVE) ++s.n_inconclusive;
        s.min_margin_sigmas = std::min(s.min_margin_sigmas, r.margin_sigmas);
    }
    return s;
}

void write_reports_csv(const std::vector<InequalityReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DiagnosticError("write_reports_csv: cannot open " + path);
    out << "kind,function,lhs,lhs_se,rhs,rhs_se,margin,margin_se,margin_sigmas,verdict,C,D\n";
    char buf[512];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.6g,%s,%.12g,%.12g\n",
                      r.kind.c_str(), r.function_id.c_str(), r.lhs.value, r.lhs.std_error, r.rhs.value,
                      r.rhs.std_error, r.margin, r.margin_se, r.margin_sigmas, verdict_name(r.verdict),
                      r.constants.C, r.constants.D);
        out << buf;
    }
}

std::string summary_json(const ReportSummary& s) {
    nlohmann::json j;
    j["kind"] = s.kind;
    j["n_holds"] = s.n_holds;
    j["n_violated"] = s.n_violated;
    j["n_inconclusive"] = s.n_inconclusive;
    j["min_margin_sigmas"] =
        std::isfinite(s.min_margin_sigmas) ? s.min_margin_sigmas : 1e308;
    return j.dump();
}

// ---- search ----

SearchFamily fourier_family(const Space& s, int n_features) {
    SearchFamily fam;
    fam.name = "fourier";
    int dim = s.coord_dim();
    fam.n_params = static_cast<std::size_t>(n_features) * (2 + dim);
    for (int j = 0; j < n_features; ++j) {
        fam.init_lo.push_back(-1.0);
        fam.init_hi.push_back(1.0);  // weight
        for (int i = 0; i < dim; ++i) {
            double sc = i >= s.horizontal_dim() ? 0.5 : 2.0;
            fam.init_lo.push_back(-sc);
            fam.init_hi.push_back(sc);
        }
        fam.init_lo.push_back(0.0);
        fam.init_hi.push_back(2.0 * M_PI);  // phase
    }
    fam.make = [s, n_features, dim](const std::vector<double>& p) {
        std::vector<double> w(n_features), ph(n_features);
        std::vector<std::vector<double>> fr(n_features, std::vector<double>(dim));
        std::size_t idx = 0;
        for (int j = 0; j < n_features; ++j) {
            w[j] = p[idx++];
            for (int i = 0; i < dim; ++i) fr[j][i] = p[idx++];
            ph[j] = p[idx++];
        }
        return fourier_fn(s, w, fr, ph);
    };
    return fam;
}

SearchFamily tilt_family(const Space& s) {
    SearchFamily fam;
    fam.name = "tilt";
    fam.n_params = 1;
    // |t| capped where the plug-in ratio stays well-conditioned at n ~ 1e5
    fam.init_lo = {-0.8};
    fam.init_hi = {0.8};
    fam.make = [s](const std::vector<double>& p) {
        return s.heisenberg_like() ? radial_tilt_fn(s, p[0]) : exp_tilt_fn(s, p[0], 0);
    };
    return fam;
}

SearchFamily poly_family(const Space& s, int degree) {
    SearchFamily fam;
    fam.name = "poly";
    fam.n_params = degree + 1;
    fam.init_lo.assign(degree + 1, -1.0);
    fam.init_hi.assign(degree + 1, 1.0);
    fam.make = [s](const std::vector<double>& coeffs) {
        TestFunction f;
        f.id = "poly";
        f.eval = [coeffs](const GroupPoint& g) {
            double v = 0.0, xp = 1.0;
            for (double c : coeffs) {
                v += c * xp;
                xp *= g.x[0];
            }
            return v;
        };
        f.grad_norm = [coeffs](const GroupPoint& g) {
            double v = 0.0, xp = 1.0;
            for (std::size_t j = 1; j < coeffs.size(); ++j) {
                v += static_cast<double>(j) * coeffs[j] * xp;
                xp *= g.x[0];
            }
            return std::abs(v);
        };
        return f;
    };
    return fam;
}

SearchFamily constant_family() {
    SearchFamily fam;
    fam.name = "constants";
    fam.n_params = 1;
    fam.init_lo = {-2.0};
    fam.init_hi = {2.0};
    fam.make = [](const std::vector<double>& p) { return constant_fn(p[0]); };
    return fam;
}

namespace {

double ratio_for(const MeasureSpec& m, const SampleSet& ss, RatioKind kind, double q,
                 const TestFunction& f) {
    (void)m;
    try {
        auto cols = evaluate_columns(f, ss, true);
        Estimate lhs;
        switch (kind) {
            case RatioKind::Poincare:
                lhs = variance_q(cols, q);
                break;
            case RatioKind::LSq:
                lhs = entropy_q(cols, q);
                break;
            case RatioKind::PhiEntropy:
                lhs = phi_entropy(cols, 2.0 * (q - 1.0) / q);
                break;
        }
        auto rhs = dirichlet_q(cols, ss, kind == RatioKind::PhiEntropy ? 2.0 : q);
        if (!(rhs.value > 10.0 * rhs.std_error) || !(rhs.value > 1e-12)) return -1e300;
        return lhs.value / rhs.value;
    } catch (const InputError&) {
        return -1e300;
    } catch (const DiagnosticError&) {
        return -1e300;
    }
}

}  // namespace

SearchResult best_constant_search(const MeasureSpec& m, const SampleSet& ss, RatioKind kind, double q,
                                  const SearchFamily& family, int budget, std::uint64_t seed) {
    if (family.n_params > 64) throw InputError("best_constant_search: family too large");
    SearchResult best;
    best.ratio = -1e300;
    best.family = family.name;
    int evals = 0;
    int restarts = std::max(2, budget / 400);
    for (int restart = 0; restart < restarts && evals < budget; ++restart) {
        Rng rng(derive_seed(seed, restart));
        std::vector<double> p(family.n_params);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = rng.uniform(family.init_lo[i], family.init_hi[i]);
        double cur = ratio_for(m, ss, kind, q, family.make(p));
        ++evals;
        for (double frac : {0.4, 0.12, 0.04}) {
            for (int sweep = 0; sweep < 3 && evals < budget; ++sweep) {
                bool improved = false;
                for (std::size_t i = 0; i < p.size() && evals < budget; ++i) {
                    double span = frac * (family.init_hi[i] - family.init_lo[i]);
                    double base = p[i];
                    double best_t = 0.0, best_v = cur;
                    for (double t : {-span, -0.5 * span, 0.5 * span, span}) {
                        // the init ranges are box constraints for the search
                        p[i] = std::clamp(base + t, family.init_lo[i], family.init_hi[i]);
                        double v = ratio_for(m, ss, kind, q, family.make(p));
                        ++evals;
                        if (v > best_v) {
                            best_v = v;
                            best_t = p[i] - base;
                        }
                    }
                    p[i] = base + best_t;
                    if (best_t != 0.0) improved = true;
                    cur = best_v;
                }
                if (!improved) break;
            }
        }
        if (cur > best.ratio) {
            best.ratio = cur;
            best.params = p;
        }
    }
    if (best.ratio <= -1e300) best.ratio = 0.0;
    return best;
}

double suite_max_ratio(const MeasureSpec& m, const SampleSet& ss, RatioKind kind, double q,
                       const std::vector<TestFunction>& suite) {
    double best = 0.0;
    for (const auto& f : suite) best = std::max(best, ratio_for(m, ss, kind, q, f));
    return best;
}

TheoremConstants search_ubound_constants(const MeasureSpec&, const SampleSet& train, double q,
                                         const std::function<double(double)>& lhs_weight,
                                         const std::function<double(double)>& grad_weight,
                                         const std::vector<TestFunction>& suite) {
    struct FnStats {
        double lhs, grad, mass;
    };
    std::vector<FnStats> stats;
    double n = static_cast<double>(train.size());
    for (const auto& f : suite) {
        auto cols = evaluate_columns(f, train, true);
        double lhs = 0.0, grad = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < cols.n; ++i) {
            double a = std::pow(std::abs(cols.f[i]), q);
            lhs += lhs_weight(train.d[i]) * a;
            mass += a;
            grad += (grad_weight ? grad_weight(train.d[i]) : 1.0) * std::pow(cols.gnorm[i], q);
        }
        stats.push_back({lhs / n, grad / n, mass / n});
    }
    double bestC = 1.0, bestD = 1e300, best_score = 1e300;
    for (double C = 0.25; C <= 64.0; C *= 2.0) {
        double D = 0.01;
        for (const auto& s : stats)
            if (s.mass > 1e-12) D = std::max(D, (s.lhs - C * s.grad) / s.mass);
        double score = C + D;
        if (score < best_score) {
            best_score = score;
            bestC = C;
            bestD = D;
        }
    }
    return {1.1 * bestC, 1.1 * bestD, Provenance::Manual};
}

}  // namespace ubl
