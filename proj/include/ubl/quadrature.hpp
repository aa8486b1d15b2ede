#ifndef UBL_QUADRATURE_HPP
#define UBL_QUADRATURE_HPP

#include <functional>

namespace ubl {

using Fn1 = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evals = 0;
};

// Adaptive Gauss-Kronrod 7-15 on a finite interval.
QuadResult integrate(const Fn1& f, double a, double b, double tol = 1e-10, int max_depth = 48);

// Integral over [a, inf) by panel doubling; stops when both the last panel
// and the caller-supplied tail bound drop below tol relative to the total.
// tail_bound(R) must bound |∫_R^inf f| from above (analytic domination).
QuadResult integrate_tail(const Fn1& f, double a, double tol, const Fn1& tail_bound);

// log ∫_a^b exp(g(x)) dx, computed without ever forming exp(g) at full scale.
// Adaptive bisection with per-panel max subtraction; tol is absolute in log
// space. Safe for |g| up to ~1e5.
QuadResult log_integrate(const Fn1& g, double a, double b, double tol = 1e-10, int max_depth = 48);

// log ∫_a^inf exp(g(x)) dx by panel doubling in log space.
// log_tail_bound(R) must bound log ∫_R^inf exp(g) from above.
QuadResult log_integrate_tail(const Fn1& g, double a, double tol, const Fn1& log_tail_bound);

// Fixed-level tanh-sinh rule on [a,b] in log space (log ∫ exp(g)); used where
// the integrand is steep at an endpoint. Refines levels until the log value
// moves less than tol.
QuadResult log_tanh_sinh(const Fn1& g, double a, double b, double tol = 1e-10, int max_level = 12);

}  // namespace ubl

#endif
