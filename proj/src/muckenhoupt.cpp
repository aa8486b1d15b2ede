#include "ubl/muckenhoupt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ubl/quadrature.hpp"

namespace ubl {

double OneDimMeasure::potential(double x) const {
    switch (family) {
        case Family::PowerPotential:
            return beta * std::pow(std::abs(x), p);
        case Family::OscillatingPotential:
            return beta * std::pow(std::abs(x), p) * (1.0 + eps * std::cos(x));
        case Family::Uniform:
            return 0.0;
    }
    return 0.0;
}

OneDimMeasure OneDimMeasure::power(double beta, double p) {
    if (!(beta > 0.0) || !(p >= 1.0)) throw InputError("OneDimMeasure::power: beta > 0, p >= 1");
    return {Family::PowerPotential, beta, p, 0.0};
}

OneDimMeasure OneDimMeasure::oscillating(double beta, double p, double eps) {
    if (!(beta > 0.0) || !(p >= 1.0) || !(eps > 0.0) || !(eps < 1.0))
        throw InputError("OneDimMeasure::oscillating: beta > 0, p >= 1, eps in (0,1)");
    return {Family::OscillatingPotential, beta, p, eps};
}

OneDimMeasure OneDimMeasure::uniform() { return {Family::Uniform, 0.0, 0.0, 0.0}; }

namespace {

// log int_r^inf e^{-U} dx: tanh-sinh panels of doubling width, stopped by the
// e^{-beta (1-eps) x^p} domination bound.
double log_tail_factor(const OneDimMeasure& m, double r, double tol) {
    if (m.family == OneDimMeasure::Family::Uniform)
        throw InputError("log_b_plus: uniform measure is not normalizable on the line");
    double beta_low = m.beta * (1.0 - m.eps);
    Fn1 g = [&](double x) { return -m.potential(x); };
    double total = -std::numeric_limits<double>::infinity();
    double lo = r, width = 1.0;
    for (int k = 0; k < 120; ++k) {
        double hi = lo + width;
        auto panel = log_tanh_sinh(g, lo, hi, tol);
        total = log_sum_exp(total, panel.value);
        double lg = std::log(tol) + total;
        double R = std::max(hi, 1.0);
        double bound = -beta_low * std::pow(R, m.p) - std::log(beta_low * m.p * std::pow(R, m.p - 1.0));
        if (panel.value < lg - 2.0 && bound < lg - 2.0) return total;
        lo = hi;
        width *= 2.0;
    }
    throw DiagnosticError("log_tail_factor: no convergence; partial " + std::to_string(total), total);
}

}  // namespace

double log_b_plus(const OneDimMeasure& m, double r, double q, double tol) {
    if (!(r > 0.0)) throw InputError("log_b_plus: r > 0");
    if (!(q > 1.0)) throw InputError("log_b_plus: q > 1");
    double pc = q / (q - 1.0);
    double f1 = log_tail_factor(m, r, tol);
    auto f2 = log_integrate([&](double x) { return (pc / q) * m.potential(x); }, 0.0, r, tol);
    return f1 / q + f2.value / pc;
}

double log_b_minus(const OneDimMeasure& m, double r, double q, double tol) {
    // all shipped families are even in x
    return log_b_plus(m, r, q, tol);
}

std::vector<CounterexampleRow> counterexample_series(double beta, double p, double eps, double q,
                                                     int n_max, double tol) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw InputError("counterexample_series: eps in (0,1)");
    if (!(beta > 0.0) || !(p >= 1.0)) throw InputError("counterexample_series: beta > 0, p >= 1");
    if (n_max < 1 || n_max > 6) throw InputError("counterexample_series: n_max in [1, 6]");
    auto m = OneDimMeasure::oscillating(beta, p, eps);
    double pc = q / (q - 1.0);
    std::vector<CounterexampleRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        double base = 2.0 * n * M_PI;
        double r = base + 0.5 * M_PI;
        double logb = log_b_plus(m, r, q, tol);
        // explicit lower-bound chain: a slab of the tail factor near the well
        // times a slab of the inverse-density factor around the bump
        auto i1 = log_integrate(
            [&](double x) { return -beta * std::pow(std::abs(x), p) * (1.0 - 0.5 * eps); },
            base + 4.0 * M_PI / 3.0, base + 8.0 * M_PI / 3.0, tol);
        auto i2 = log_integrate(
            [&](double x) { return (pc / q) * beta * std::pow(std::abs(x), p) * (1.0 + 0.5 * eps); },
            base - 2.0 * M_PI / 3.0, base + 2.0 * M_PI / 3.0, tol);
        rows.push_back({n, r, logb, i1.value / q + i2.value / pc});
    }
    return rows;
}

void write_counterexample_csv(const std::vector<CounterexampleRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DiagnosticError("write_counterexample_csv: cannot open " + path);
    out << "n,r,logB,log_lower_bound\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", row.n, row.r, row.log_b,
                      row.log_lower_bound);
        out << buf;
    }
}

namespace {

// number of eigenvalues of the symmetric tridiagonal (diag, off) below sigma
int sturm_count(const std::vector<long double>& diag, const std::vector<long double>& off,
                long double sigma) {
    int count = 0;
    long double d = diag[0] - sigma;
    if (d < 0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        long double denom = d;
        if (fabsl(denom) < 1e-320L) denom = denom < 0 ? -1e-320L : 1e-320L;
        d = diag[i] - sigma - off[i - 1] * off[i - 1] / denom;
        if (d < 0) ++count;
    }
    return count;
}

// one inverse-iteration polish of the eigenvalue near sigma via the Rayleigh
// quotient of (T - sigma)^{-1} b
long double inverse_iteration_polish(const std::vector<long double>& diag,
                                     const std::vector<long double>& off, long double sigma) {
    std::size_t n = diag.size();
    std::vector<long double> a(n), b(n), c(n), v(n, 1.0L);
    for (int iter = 0; iter < 6; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = diag[i] - sigma;
            b[i] = i + 1 < n ? off[i] : 0.0L;
        }
        // Thomas solve (T - sigma) w = v
        std::vector<long double> cp(n), dp(n);
        long double denom = a[0];
        if (fabsl(denom) < 1e-320L) denom = 1e-320L;
        cp[0] = b[0] / denom;
        dp[0] = v[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            long double m = a[i] - off[i - 1] * cp[i - 1];
            if (fabsl(m) < 1e-320L) m = m < 0 ? -1e-320L : 1e-320L;
            cp[i] = (i + 1 < n ? b[i] : 0.0L) / m;
            dp[i] = (v[i] - off[i - 1] * dp[i - 1]) / m;
        }
        c[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) c[i] = dp[i] - cp[i] * c[i + 1];
        long double norm = 0.0L;
        for (auto x : c) norm += x * x;
        norm = sqrtl(norm);
        if (!(norm > 0.0L)) break;
        for (std::size_t i = 0; i < n; ++i) v[i] = c[i] / norm;
        // Rayleigh quotient of T
        long double num = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double tv = diag[i] * v[i];
            if (i > 0) tv += off[i - 1] * v[i - 1];
            if (i + 1 < n) tv += off[i] * v[i + 1];
            num += v[i] * tv;
        }
        sigma = num;
    }
    return sigma;
}

}  // namespace

double fd_spectral_gap(const OneDimMeasure& m, double R, int grid_n) {
    if (grid_n < 64) throw InputError("fd_spectral_gap: grid_n >= 64");
    if (!(R > 0.0)) throw InputError("fd_spectral_gap: R > 0");
    const int n = grid_n;
    const long double h = 2.0L * (long double)R / (n - 1);
    // log weights: exponent differences between neighbours are O(U' h), so
    // the symmetrized matrix entries are representable for any potential depth
    std::vector<long double> lw(n), lc(n - 1);
    for (int i = 0; i < n; ++i) lw[i] = -(long double)m.potential(-R + (double)(h * i));
    for (int i = 0; i + 1 < n; ++i) lc[i] = -(long double)m.potential(-R + (double)(h * (i + 0.5L)));

    // symmetrized K f = lambda B f: T = B^{-1/2} K B^{-1/2}
    std::vector<long double> diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) {
        long double k = 0.0L;
        if (i > 0) k += expl(lc[i - 1] - lw[i]);
        if (i + 1 < n) k += expl(lc[i] - lw[i]);
        diag[i] = k / (h * h);
    }
    for (int i = 0; i + 1 < n; ++i) off[i] = -expl(lc[i] - 0.5L * (lw[i] + lw[i + 1])) / (h * h);

    long double upper = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double s = diag[i];
        if (i > 0) s += fabsl(off[i - 1]);
        if (i + 1 < n) s += fabsl(off[i]);
        upper = std::max(upper, s);
    }
    // bisection for the second-smallest eigenvalue (the smallest is 0)
    long double lo = 0.0L, hi = upper;
    for (int it = 0; it < 5000; ++it) {
        long double mid = 0.5L * (lo + hi);
        if (!(mid > lo) || !(mid < hi)) break;
        if (sturm_count(diag, off, mid) >= 2)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-12L * hi) break;
    }
    long double lam = 0.5L * (lo + hi);
    long double polished = inverse_iteration_polish(diag, off, lam);
    // keep the polish only if it stays inside the certified bracket
    if (polished > 0.25L * lam && polished < 4.0L * lam + 1e-300L) lam = polished;
    if (!(lam >= 0.0L)) throw DiagnosticError("fd_spectral_gap: eigen-iteration failed");
    return (double)lam;
}

}  // namespace ubl
