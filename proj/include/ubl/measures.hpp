#ifndef UBL_MEASURES_HPP
#define UBL_MEASURES_HPP

#include <optional>
#include <string>
#include <vector>

#include "ubl/common.hpp"
#include "ubl/geometry.hpp"

namespace ubl {

// Differentiable perturbation W(d); |dW/dd| must grow slower than d^{p-1}.
struct WSpec {
    enum class Kind { None, CosOscillation, PolyInD };
    Kind kind = Kind::None;
    double amplitude = 0.0;            // CosOscillation: amplitude * d^{p-1} cos d
    std::vector<double> coeffs;        // PolyInD: sum_j coeffs[j] d^j

    double value(double d, double p) const;
    double dvalue(double d, double p) const;
    // smallest gamma such that |W'(d)| <= delta d^{p-1} + gamma on a scan grid
    double gamma_for(double delta, double p, double dmax = 200.0) const;
    bool none() const { return kind == Kind::None; }
};

// Bounded measurable perturbation V(d) with known oscillation.
struct VSpec {
    enum class Kind { None, GaussBump };
    Kind kind = Kind::None;
    double c = 0.0;  // GaussBump: c * exp(-d^2)

    double value(double d) const;
    double osc() const;
    bool none() const { return kind == Kind::None; }
};

struct PotentialSpec {
    enum class Kind { Power, SlowTail, HeatKernelSurrogate };
    Kind kind = Kind::Power;
    double beta = 1.0;
    double p = 2.0;  // exponent for Power; unused otherwise
    WSpec W;
    VSpec V;
    // which homogeneous norm plays the role of d on Heisenberg spaces
    HomogeneousNormKind norm = HomogeneousNormKind::CarnotCaratheodory;
};

struct SamplerConfig {
    double step_scale = 0.5;
    int burn_in = 10000;
    int max_thinning = 64;
    int pilot = 2000;
};

struct MeasureSpec {
    std::string id = "measure";
    Space space = Space::euclidean(1);
    PotentialSpec pot;
    std::optional<double> logZ;
    double logZ_tol = 0.0;
    SamplerConfig sampler;

    std::string describe() const;
};

// Convenience constructors for the measures used in the experiments.
MeasureSpec power_measure(const Space& s, double beta, double p,
                          HomogeneousNormKind norm = HomogeneousNormKind::CarnotCaratheodory,
                          WSpec W = {}, VSpec V = {});
MeasureSpec slow_tail_measure(const Space& s, double beta);
MeasureSpec heat_kernel_surrogate_measure();
// Named measures used by the CLI: gauss1d, quartic1d, subq1d, slowtail3d,
// h1gauss, h1kaplan, hksurrogate.
MeasureSpec measure_by_name(const std::string& name);

// The distance that drives the potential at g (|x|, cc distance, or the
// Kaplan norm depending on space and spec).
double potential_distance(const MeasureSpec& m, const GroupPoint& g);

// log of the unnormalized density at g.
double log_density_unnormalized(const MeasureSpec& m, const GroupPoint& g);

// Potential U(g) = -log unnormalized density (so density = e^{-U}/Z).
double potential_value(const MeasureSpec& m, const GroupPoint& g);

struct NormalizeResult {
    double logZ;
    double tol_achieved;
};

// Computes logZ by quadrature: adaptive on R^1, radial on R^n (n<=3),
// cylindrical (|x|, z) on H_l. Result is stored in m.logZ.
NormalizeResult normalize(MeasureSpec& m, double tol = 1e-9);

struct SampleSet {
    Space space = Space::euclidean(1);
    std::vector<GroupPoint> points;
    std::vector<double> d;  // potential_distance per point
    std::vector<double> weights;  // optional importance weights (empty = unweighted)
    std::uint64_t seed = 0;
    double acceptance_rate = 0.0;
    double ess = 0.0;
    int thinning = 1;
    std::string spec_hash;

    std::size_t size() const { return points.size(); }
};

// Random-walk Metropolis targeting the unnormalized density; deterministic
// given the seed. Step scale is auto-tuned during burn-in to acceptance in
// [0.2, 0.45]; thinning is chosen so the lag-1 autocorrelation of d is < 0.5.
SampleSet sample(const MeasureSpec& m, std::size_t n, std::uint64_t seed);

// Exact radial sampler on R^n for base power potentials (inverse CDF of
// r^{n-1} e^{-beta r^p}); the distributional oracle for the MCMC chain.
SampleSet sample_radial_exact(const MeasureSpec& m, std::size_t n, std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov on scalar samples; returns the statistic and
// the asymptotic p-value.
struct KsResult {
    double statistic;
    double p_value;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One row per point; header carries seed and spec hash.
void write_csv(const SampleSet& s, const std::string& path);

// Quadrature expectation on R^1 against the normalized density (requires
// logZ). h sees the group point (x, 0).
Estimate expect_quad_1d(const MeasureSpec& m, const std::function<double(double)>& h, double tol = 1e-9);

// Truncation radius where the unnormalized 1-D density drops below cut.
double truncation_radius_1d(const MeasureSpec& m, double cut = 1e-16);

std::uint64_t fnv1a(const std::string& s);

}  // namespace ubl

#endif
