#ifndef UBL_MUCKENHOUPT_HPP
#define UBL_MUCKENHOUPT_HPP

#include <string>
#include <vector>

#include "ubl/common.hpp"

namespace ubl {

// One-dimensional reference measures rho = e^{-U}/Z for the Muckenhoupt
// criterion and the finite-difference spectral-gap oracle.
struct OneDimMeasure {
    enum class Family { PowerPotential, OscillatingPotential, Uniform };
    Family family = Family::PowerPotential;
    double beta = 1.0;
    double p = 2.0;
    double eps = 0.0;  // oscillation amplitude

    double potential(double x) const;

    static OneDimMeasure power(double beta, double p);
    static OneDimMeasure oscillating(double beta, double p, double eps);
    static OneDimMeasure uniform();
};

// log B_+(r) = (1/q) log mu([r, inf)) + (1/p') log int_0^r rho^{-p'/q}, with
// p' the conjugate exponent; the normalisation Z cancels between the factors,
// so the computation is Z-free. Everything runs in log space.
double log_b_plus(const OneDimMeasure& m, double r, double q, double tol = 1e-10);
double log_b_minus(const OneDimMeasure& m, double r, double q, double tol = 1e-10);

struct CounterexampleRow {
    int n;
    double r;                // r_n = 2 n pi + pi/2
    double log_b;            // log B_+(r_n)
    double log_lower_bound;  // explicit two-integral lower-bound chain
};

// Oscillating potential U = beta |x|^p (1 + eps cos x): the table shows
// log B_+(r_n) growing without bound, so no Poincare inequality holds.
std::vector<CounterexampleRow> counterexample_series(double beta, double p, double eps, double q,
                                                     int n_max, double tol = 1e-10);

void write_counterexample_csv(const std::vector<CounterexampleRow>& rows, const std::string& path);

// Smallest nonzero eigenvalue of the weighted Neumann problem on [-R, R]:
// sum w_{i+1/2} (f_{i+1}-f_i)^2/h^2 against sum w_i f_i^2. Sturm bisection
// on the symmetrised tridiagonal matrix plus inverse-iteration polish;
// long-double weights keep deep oscillating wells representable.
double fd_spectral_gap(const OneDimMeasure& m, double R, int grid_n);

}  // namespace ubl

#endif
