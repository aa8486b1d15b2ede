#ifndef UBL_COUNTEREXAMPLES_HPP
#define UBL_COUNTEREXAMPLES_HPP

#include <string>
#include <vector>

#include "ubl/inequalities.hpp"
#include "ubl/measures.hpp"

namespace ubl {

// Reproduction of the no-LS_q construction: the measure exp(-beta phi^p)/Z
// built from a smooth homogeneous norm phi admits no LS_q inequality. The
// witness family is a plateau of width r = t^{(1-p)/2} carried to the dilated
// gradient-zero point delta_t x0 on the center axis.
struct NoLSExperiment {
    double beta = 1.0;
    double p = 2.0;
    double q = 2.0;
    std::vector<double> t_grid = {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0};
    GroupPoint x0 = make_point(Space::heisenberg(1), {0.0, 0.0, 0.25});  // phi(x0) = 1
    std::size_t n_samples = 40000;
    std::uint64_t seed = 20240917;
};

struct NoLSPoint {
    double t = 0.0;
    double r = 0.0;
    bool valid = false;        // t phi(x0) > 4r
    double log_entropy = 0.0;  // log of entropy_q(mu, f_t)
    double log_energy = 0.0;   // log of mu |grad f_t|^q
    double ratio = 0.0;        // entropy / energy
    double ratio_se = 0.0;
    double log_mass = 0.0;     // log mu |f_t|^q
    double ess = 0.0;
    double exp_factor_span = 0.0;  // max-min of beta phi^p over the ball samples
    double grad_bound_max = 0.0;   // max r |grad f_t| observed (<= 1 + fd tolerance)
};

// Ball-local importance-sampling estimate at one t against the measure built
// from `norm`. All exponentials are taken relative to the density at the ball
// center; the CC column uses a radially tilted proposal to resolve the
// boundary layer of the non-vanishing gradient.
NoLSPoint no_ls_ratio(const NoLSExperiment& exp, double t, HomogeneousNormKind norm, double logZ,
                      std::uint64_t seed);

struct NoLSTable {
    std::vector<NoLSPoint> kaplan;
    std::vector<NoLSPoint> cc;  // empty unless cc_control was requested
    double logZ_kaplan = 0.0;
    double logZ_cc = 0.0;
};

NoLSTable no_ls_run(const NoLSExperiment& exp, bool cc_control);

// LS_q verdicts implied by the table: for the candidate constant c each valid
// row yields HOLDS/VIOLATED from the log-space margin.
std::vector<InequalityReport> no_ls_lsq_reports(const std::vector<NoLSPoint>& rows, double c);

void write_nols_csv(const std::vector<NoLSPoint>& rows, const std::string& norm_label,
                    const std::string& path);

}  // namespace ubl

#endif
