#ifndef UBL_INEQUALITIES_HPP
#define UBL_INEQUALITIES_HPP

#include <functional>
#include <string>
#include <vector>

#include "ubl/functionals.hpp"
#include "ubl/measures.hpp"

namespace ubl {

enum class Provenance { Thm2_5, Thm2_6, Thm2_5p, Thm4_5ii1, Manual };

struct TheoremConstants {
    double C = 0.0;
    double D = 0.0;
    Provenance prov = Provenance::Manual;
};

// C = 1/((1/sigma^2 - eps) beta p); D = K C + 2^{p-1} + C (support fix folded in).
TheoremConstants constants_thm2_5(double beta, double p, double sigma, double eps, double K);

// C' = e^{2 oscV} C/(1 - C delta); D' = e^{2 oscV} (D + gamma)/(1 - C delta).
TheoremConstants constants_thm2_6(const TheoremConstants& base, double delta, double gamma, double oscV);

// q-version constants; free parameters alpha, beta (and gamma in the
// (q-1)(p-1) > 1 branch) are the smallest powers of two that push each
// subtracted denominator term below 1/6. The input constants are for the
// d^{p-1} bound; the max(1, d) enlargement adds 1 to D internally.
TheoremConstants constants_thm2_5p(const TheoremConstants& base, double q, double p);

// c1 = beta/(beta - N) for the slow-tail case (ii); requires beta > N.
TheoremConstants constants_thm4_5ii1(double beta, int N, double b1);

enum class Verdict { HOLDS, VIOLATED, INCONCLUSIVE };
const char* verdict_name(Verdict v);

struct InequalityReport {
    std::string kind;
    std::string function_id;
    Estimate lhs;
    Estimate rhs;
    TheoremConstants constants;
    Verdict verdict = Verdict::INCONCLUSIVE;
    double margin = 0.0;  // rhs - lhs
    double margin_se = 0.0;
    double margin_sigmas = 0.0;
};

struct ReportSummary {
    std::string kind;
    int n_holds = 0;
    int n_violated = 0;
    int n_inconclusive = 0;
    double min_margin_sigmas = 0.0;
};
ReportSummary summarize(const std::string& kind, const std::vector<InequalityReport>& reports);
void write_reports_csv(const std::vector<InequalityReport>& reports, const std::string& path);
std::string summary_json(const ReportSummary& s);

enum class UboundForm {
    WeightDp1,     // q = 1, weight d^{p-1}            (2.z)
    WeightDqp,     // weight d^{q(p-1)}                (2.ap)
    WeightDpConj,  // weight d^p with 1/p + 1/q = 1    (2.ap_bis)
    WeightDtheta,  // q = 2, weight d^{2(theta-1)}     (2x.a)
    WeightU,       // weight U(d)                      (converse form)
};

std::vector<InequalityReport> check_ubound(const MeasureSpec& m, const SampleSet& ss, double q,
                                           UboundForm form, const TheoremConstants& constants,
                                           const std::vector<TestFunction>& suite);

std::vector<InequalityReport> check_poincare(const MeasureSpec& m, const SampleSet& ss, double q,
                                             double M_candidate, const std::vector<TestFunction>& suite);

std::vector<InequalityReport> check_lsq(const MeasureSpec& m, const SampleSet& ss, double q,
                                        double c_candidate, const std::vector<TestFunction>& suite);

std::vector<InequalityReport> check_phi_entropy(const MeasureSpec& m, const SampleSet& ss, double theta,
                                                double c_candidate,
                                                const std::vector<TestFunction>& suite);

enum class WeightedKind {
    Thm4_4_1,      // mu f^2 d^p <= C mu(<d>^{2-p} |grad f|^2) + D mu f^2
    SlowTailI,     // mu |f|^q U <= C mu(d^{q(kappa - alpha/p')} |grad f|^q) + D mu |f|^q
    SlowTailIIq1,  // mu |f| U <= C mu(d log(1+d) |grad f|) + D mu |f|
    SlowTailIIq,   // mu |f|^q U <= C mu(d^q log(1+d) |grad f|^q) + D mu |f|^q
    WPoincare1,    // M mu|f - mu f| <= mu((1+d)|grad f|)
    WPoincareQ,    // M mu|f - mu f|^q <= mu((1+d)^q |grad f|^q)
    WPoincareLog,  // M mu|f - mu f|^q <= mu((1+d)^q log(e+d) |grad f|^q)
    WLSLog,        // entropy_q <= c mu((1+d)^q log(e+d) |grad f|^q)
};

struct WeightedParams {
    double kappa = 1.0;  // SlowTailI weight parameter
};

std::vector<InequalityReport> check_weighted(const MeasureSpec& m, const SampleSet& ss, WeightedKind kind,
                                             double q, const TheoremConstants& constants,
                                             const std::vector<TestFunction>& suite,
                                             const WeightedParams& params = {});

struct ConverseResult {
    double eps_hat = 0.0;
    double log_mu_expU = 0.0;
    TheoremConstants constants;
    std::vector<InequalityReport> reports;
};

// Derives C = c_ls/eps, D = log(mu e^{eps U})/eps with the largest dyadic eps
// whose quadrature converges under truncation doubling, then checks the
// U-weighted bound. Pre-flight verifies |grad U|^q <= a U + b on the samples.
ConverseResult check_converse_ubound(const MeasureSpec& m, const SampleSet& ss, double q, double a,
                                     double b, double c_ls, const std::vector<TestFunction>& suite);

// log mu e^{eps U} by quadrature (R^1 and H_l); throws DiagnosticError when
// the integral fails to converge under truncation doubling.
double log_moment_expU(const MeasureSpec& m, double eps, double tol = 1e-8);

struct ExpBoundPoint {
    double t;
    double delta;
    double log_lhs;  // log mu e^{(1-delta) t f}
    double log_rhs;  // t mu f + C t^q
    double se;
    Verdict verdict;
};

struct ExpBoundResult {
    double C = 0.0;
    double eps = 0.0;
    std::vector<ExpBoundPoint> points;
    bool g_monotone = true;     // G(t) nondecreasing up to s.e.
    double g_limit_gap = 0.0;   // |G(t_min) - mu f| in s.e. units
    bool all_hold = true;
};

ExpBoundResult check_exp_bound(const MeasureSpec& m, const SampleSet& ss, const TestFunction& f, double a,
                               double b, double c_ls, double q, const std::vector<double>& t_grid,
                               double eps = 0.5);

// ---- best-constant search ----

struct SearchFamily {
    std::string name;
    std::size_t n_params = 0;
    std::function<TestFunction(const std::vector<double>&)> make;
    std::vector<double> init_lo, init_hi;
};

SearchFamily fourier_family(const Space& s, int n_features);
SearchFamily tilt_family(const Space& s);       // one-parameter exponential tilt
SearchFamily poly_family(const Space& s, int degree);
SearchFamily constant_family();                 // degenerate family (ratio must be 0)

enum class RatioKind { Poincare, LSq, PhiEntropy };

struct SearchResult {
    double ratio = 0.0;  // statistical lower bound on the optimal constant
    std::vector<double> params;
    std::string family;
};

SearchResult best_constant_search(const MeasureSpec& m, const SampleSet& ss, RatioKind kind, double q,
                                  const SearchFamily& family, int budget, std::uint64_t seed);

// Largest LHS/RHS ratio over a fixed suite (used by the search-then-margin
// protocol: candidate = 1.1 * max(search, suite ratio on training samples)).
double suite_max_ratio(const MeasureSpec& m, const SampleSet& ss, RatioKind kind, double q,
                       const std::vector<TestFunction>& suite);

// Two-constant search for U-bound style forms: scans C over a dyadic grid,
// sets D(C) to the largest residual over the suite, picks the smallest C + D
// and applies the 1.1 safety factor.
TheoremConstants search_ubound_constants(const MeasureSpec& m, const SampleSet& train, double q,
                                         const std::function<double(double)>& lhs_weight,
                                         const std::function<double(double)>& grad_weight,
                                         const std::vector<TestFunction>& suite);

}  // namespace ubl

#endif
