#include "ubl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ubl/common.hpp"

namespace ubl {

namespace {

// Gauss-Kronrod 7-15 nodes on [-1,1] (symmetric; only nonnegative listed).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                            0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                            0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEval {
    double kronrod;
    double gauss;
};

PanelEval gk15(const Fn1& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    return {resk * h, resg * h};
}

// min_depth forces initial splits so narrowly supported integrands cannot
// hide between the nodes of the first panel
void adapt(const Fn1& f, double a, double b, double tol, int depth, int min_depth, QuadResult& out) {
    PanelEval e = gk15(f, a, b);
    out.evals += 15;
    double err = std::abs(e.kronrod - e.gauss);
    if (depth <= 0 || (min_depth <= 0 && err <= tol) || b - a < 1e-300) {
        out.value += e.kronrod;
        out.error += err;
        return;
    }
    double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1, min_depth - 1, out);
    adapt(f, m, b, 0.5 * tol, depth - 1, min_depth - 1, out);
}

// log of GK15 panel value for integrand exp(g); also returns the log of the
// embedded Gauss-7 value for error control. Both shifted by the node max.
struct LogPanelEval {
    double log_kronrod;
    double log_gauss;
};

LogPanelEval log_gk15(const Fn1& g, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double gv[15];
    for (int i = 0; i < 7; ++i) {
        gv[i] = g(c - h * kXgk[i]);
        gv[14 - i] = g(c + h * kXgk[i]);
    }
    gv[7] = g(c);
    double m = -std::numeric_limits<double>::infinity();
    for (double v : gv) m = std::max(m, v);
    if (!std::isfinite(m)) return {m, m};
    double sk = kWgk[7] * std::exp(gv[7] - m);
    double sg = kWg[3] * std::exp(gv[7] - m);
    for (int i = 0; i < 7; ++i) sk += kWgk[i] * (std::exp(gv[i] - m) + std::exp(gv[14 - i] - m));
    for (int i = 0; i < 3; ++i) sg += kWg[i] * (std::exp(gv[2 * i + 1] - m) + std::exp(gv[13 - 2 * i] - m));
    return {m + std::log(sk * h), m + std::log(sg * h)};
}

void log_adapt(const Fn1& g, double a, double b, double tol, int depth, int min_depth,
               std::vector<double>& parts, std::size_t& evals) {
    LogPanelEval e = log_gk15(g, a, b);
    evals += 15;
    if (min_depth <= 0 && e.log_kronrod == -std::numeric_limits<double>::infinity()) return;
    double err = std::abs(e.log_kronrod - e.log_gauss);
    if (depth <= 0 || (min_depth <= 0 && err <= tol) || b - a < 1e-300) {
        parts.push_back(e.log_kronrod);
        return;
    }
    double m = 0.5 * (a + b);
    log_adapt(g, a, m, tol, depth - 1, min_depth - 1, parts, evals);
    log_adapt(g, m, b, tol, depth - 1, min_depth - 1, parts, evals);
}

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b, double tol, int max_depth) {
    QuadResult out;
    if (a == b) return out;
    adapt(f, a, b, tol, max_depth, 4, out);
    return out;
}

QuadResult integrate_tail(const Fn1& f, double a, double tol, const Fn1& tail_bound) {
    QuadResult out;
    double lo = a, width = 1.0;
    for (int k = 0; k < 200; ++k) {
        double hi = lo + width;
        QuadResult panel = integrate(f, lo, hi, tol * std::max(1.0, std::abs(out.value)) * 0.1);
        out.value += panel.value;
        out.error += panel.error;
        out.evals += panel.evals;
        double scale = std::max(std::abs(out.value), 1e-300);
        if (std::abs(panel.value) < 0.25 * tol * scale && tail_bound(hi) < 0.25 * tol * scale) {
            out.error += tail_bound(hi);
            return out;
        }
        lo = hi;
        width *= 2.0;
    }
    throw DiagnosticError("integrate_tail: no convergence; partial value " + std::to_string(out.value),
                          out.value);
}

QuadResult log_integrate(const Fn1& g, double a, double b, double tol, int max_depth) {
    QuadResult out;
    if (a == b) {
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<double> parts;
    log_adapt(g, a, b, tol, max_depth, 3, parts, out.evals);
    out.value = parts.empty() ? -std::numeric_limits<double>::infinity() : log_sum_exp(parts);
    out.error = tol;
    return out;
}

QuadResult log_integrate_tail(const Fn1& g, double a, double tol, const Fn1& log_tail_bound) {
    QuadResult out;
    out.value = -std::numeric_limits<double>::infinity();
    double lo = a, width = 1.0;
    for (int k = 0; k < 200; ++k) {
        double hi = lo + width;
        QuadResult panel = log_integrate(g, lo, hi, tol);
        out.evals += panel.evals;
        out.value = log_sum_exp(out.value, panel.value);
        double lg = std::log(tol) + out.value;
        if (panel.value < lg - 2.0 && log_tail_bound(hi) < lg - 2.0) {
            out.error = tol;
            return out;
        }
        lo = hi;
        width *= 2.0;
    }
    throw DiagnosticError("log_integrate_tail: no convergence; partial log value " + std::to_string(out.value),
                          out.value);
}

QuadResult log_tanh_sinh(const Fn1& g, double a, double b, double tol, int max_level) {
    QuadResult out;
    const double c = 0.5 * (a + b), h0 = 0.5 * (b - a);
    const double tmax = 3.8;  // abscissa cutoff; nodes beyond are within 1e-16 of the endpoint
    std::vector<double> logs;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 2; level <= max_level; ++level) {
        double dt = tmax / std::ldexp(1.0, level);
        logs.clear();
        for (double t = -tmax; t <= tmax + 1e-12; t += dt) {
            double sh = 0.5 * M_PI * std::sinh(t);
            double x = c + h0 * std::tanh(sh);
            double w = h0 * 0.5 * M_PI * std::cosh(t) / (std::cosh(sh) * std::cosh(sh));
            if (!(w > 0.0) || x <= a || x >= b) continue;
            double gv = g(x);
            if (gv == -std::numeric_limits<double>::infinity()) continue;
            logs.push_back(gv + std::log(w * dt));
            ++out.evals;
        }
        double cur = log_sum_exp(logs);
        if (std::isfinite(prev) && std::abs(cur - prev) < tol) {
            out.value = cur;
            out.error = std::abs(cur - prev);
            return out;
        }
        prev = cur;
    }
    out.value = prev;
    out.error = tol;
    return out;
}

}  // namespace ubl
