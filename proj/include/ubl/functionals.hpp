#ifndef UBL_FUNCTIONALS_HPP
#define UBL_FUNCTIONALS_HPP

#include <functional>
#include <string>
#include <vector>

#include "ubl/common.hpp"
#include "ubl/measures.hpp"

namespace ubl {

// An evaluable scalar field; grad_norm (|horizontal gradient|) is analytic
// when available, otherwise estimators fall back to finite differences along
// the exact flows. offaxis_only marks fields built from the CC distance,
// whose gradient is undefined on the center axis.
struct TestFunction {
    std::string id;
    std::function<double(const GroupPoint&)> eval;
    std::function<double(const GroupPoint&)> grad_norm;  // may be empty
    bool offaxis_only = false;
};

TestFunction constant_fn(double c);
TestFunction coordinate_fn(const Space& s, int index);
// plateau: 1 inside d(., center) <= inner, 0 outside outer, linear between;
// Lipschitz with constant 1/(outer - inner) in the CC metric.
TestFunction plateau_fn(const GroupPoint& center, double inner, double outer);
TestFunction radial_power_fn(const Space& s, double scale, double exponent);
TestFunction fourier_fn(const Space& s, const std::vector<double>& weights,
                        const std::vector<std::vector<double>>& freqs, const std::vector<double>& phases);
TestFunction polynomial_cutoff_fn(const Space& s, const std::vector<double>& coeffs, int coord,
                                  const GroupPoint& center, double inner, double outer);
TestFunction exp_tilt_fn(const Space& s, double t, int coord);
// f = exp(t * d / (1 + eps d)) style bounded tilt of the radial variable.
TestFunction radial_tilt_fn(const Space& s, double t);

struct SuiteSpec {
    int n_plateau = 40;
    int n_fourier = 30;
    int n_polycut = 20;
    int n_radial = 10;
    std::uint64_t seed = 424242;
    double center_scale = 1.0;  // plateau centers drawn at this scale
};

std::vector<TestFunction> default_suite(const Space& s, const SuiteSpec& spec = {});

// Per-sample values of f and |grad f| on a SampleSet; shared by the two sides
// of every inequality check (common random numbers).
struct FunctionColumns {
    std::vector<double> f;
    std::vector<double> gnorm;
    std::size_t skipped = 0;  // axis points where the CC gradient is undefined
    std::size_t n = 0;
};

FunctionColumns evaluate_columns(const TestFunction& f, const SampleSet& s, bool need_gradient);

// ---- Monte Carlo estimators (block jackknife standard errors) ----

Estimate moment_q(const FunctionColumns& c, double q);                      // mu |f|^q
Estimate variance_q(const FunctionColumns& c, double q);                    // mu |f - mu f|^q
Estimate entropy_q(const FunctionColumns& c, double q);                     // mu(|f|^q log(|f|^q / mu|f|^q))
Estimate phi_entropy(const FunctionColumns& c, double varsigma);            // mu Phi(f^2) - Phi(mu f^2)
// mu(w(d) |grad f|^q); weight sees the potential distance of each sample.
Estimate dirichlet_q(const FunctionColumns& c, const SampleSet& s, double q,
                     const std::function<double(double)>& weight = {});

struct ExpCurvePoint {
    double t;
    double G;       // t^{-1} log mu e^{t f}
    double se;
    bool truncated;
};
// G(t) on a grid; f is truncated at level L (automatically lowered on
// overflow, with the truncation recorded).
std::vector<ExpCurvePoint> exp_moment_curve(const FunctionColumns& c, const std::vector<double>& t_grid,
                                            double L = 1e308);

double phi_orlicz(double x, double varsigma);  // x (log(1+x))^varsigma

// JSON record {value, std_error, n, method} for an estimate.
std::string estimate_json(const Estimate& e);

// ---- Quadrature twins on R^1 (the estimator regression oracles) ----

Estimate moment_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol = 1e-9);
Estimate variance_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol = 1e-9);
Estimate entropy_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol = 1e-9);
Estimate phi_entropy_quad(const MeasureSpec& m, const TestFunction& f, double varsigma, double tol = 1e-9);
Estimate dirichlet_q_quad(const MeasureSpec& m, const TestFunction& f, double q,
                          const std::function<double(double)>& weight = {}, double tol = 1e-9);

}  // namespace ubl

#endif
