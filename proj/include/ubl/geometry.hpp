#ifndef UBL_GEOMETRY_HPP
#define UBL_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ubl/common.hpp"

namespace ubl {

// Supported spaces: R^n (n <= 6) and the Heisenberg groups H_l (l <= 3).
// H_l has 2l horizontal coordinates plus one central coordinate z; its
// homogeneous dimension is 2l + 2.
struct Space {
    enum class Kind { Euclidean, Heisenberg };
    Kind kind = Kind::Euclidean;
    int param = 1;  // n for Euclidean, l for Heisenberg

    static Space euclidean(int n);
    static Space heisenberg(int l);

    int horizontal_dim() const { return kind == Kind::Euclidean ? param : 2 * param; }
    int coord_dim() const { return kind == Kind::Euclidean ? param : 2 * param + 1; }
    int homogeneous_dim() const { return kind == Kind::Euclidean ? param : 2 * param + 2; }
    bool heisenberg_like() const { return kind == Kind::Heisenberg; }
    bool operator==(const Space& o) const { return kind == o.kind && param == o.param; }
    std::string name() const;
};

constexpr int kMaxHorizontalDim = 6;

// A point (x, z): horizontal part x plus central coordinate z (z == 0 on
// Euclidean spaces). Value type, fits in a cache line pair.
struct GroupPoint {
    Space space;
    std::array<double, kMaxHorizontalDim> x{};
    double z = 0.0;

    static GroupPoint identity(const Space& s) { return GroupPoint{s, {}, 0.0}; }
    double xnorm2() const {
        double s2 = 0.0;
        for (int i = 0; i < space.horizontal_dim(); ++i) s2 += x[i] * x[i];
        return s2;
    }
    double xnorm() const;
    bool finite() const;
};

GroupPoint make_point(const Space& s, const std::vector<double>& coords);
std::vector<double> coords_of(const GroupPoint& g);

// Standard symplectic form S(x,y) = sum_i (x_i y_{i+l} - x_{i+l} y_i).
double symplectic(const Space& s, const std::array<double, kMaxHorizontalDim>& a,
                  const std::array<double, kMaxHorizontalDim>& b);

GroupPoint group_mul(const GroupPoint& a, const GroupPoint& b);
GroupPoint group_inverse(const GroupPoint& g);
GroupPoint dilate(double s, const GroupPoint& g);

enum class HomogeneousNormKind { CarnotCaratheodory, Kaplan };

// Carnot-Caratheodory distance from the identity. Euclidean: |x|. H_l:
// reduces to the H_1 value at (|x|, |z|) and solves the geodesic equation by
// bisection.
double cc_distance(const GroupPoint& g);

// CC distance of the H_1 point (r, 0, z); r >= 0.
double h1_distance(double r, double z);

// Pairwise distance d(g^{-1} o h).
double pair_distance(const GroupPoint& g, const GroupPoint& h);

// Kaplan norm (|x|^4 + 16 z^2)^{1/4}; equals |x| on Euclidean spaces.
double kaplan_norm(const GroupPoint& g);

double homogeneous_norm(HomogeneousNormKind kind, const GroupPoint& g);

// True when the CC distance is differentiable at g (off the center axis).
bool cc_differentiable(const GroupPoint& g);

using ScalarField = std::function<double(const GroupPoint&)>;

// Default finite-difference steps tied to the point's magnitude.
double fd_step_first(const GroupPoint& g);
double fd_step_second(const GroupPoint& g);

// Horizontal gradient (X_1 f, ..., X_m f) by central differences along the
// exact horizontal flows g -> (±h e_i, 0) o g; on Euclidean spaces this is
// the ordinary central difference gradient.
std::vector<double> horizontal_gradient(const ScalarField& f, const GroupPoint& g, double h);
double horizontal_gradient_norm(const ScalarField& f, const GroupPoint& g, double h);

// Kohn Laplacian sum_i X_i^2 f by exact-flow second differences.
double kohn_laplacian(const ScalarField& f, const GroupPoint& g, double h);

// Direct minimisation of curve length over piecewise-constant horizontal
// controls with an endpoint penalty; the independent oracle for cc_distance.
struct OracleResult {
    double length = 0.0;
    double residual = 0.0;  // homogeneous norm of endpoint mismatch
    int n_segments = 0;
};

struct OracleOptions {
    int restarts = 8;
    std::uint64_t seed = 20240901;
    double target_residual = 1e-6;
    double penalty_start = 10.0;
    double penalty_factor = 10.0;
    int penalty_rounds = 9;
    int sweeps_per_round = 24;
};

OracleResult cc_distance_oracle(const GroupPoint& g, int n_segments, const OracleOptions& opt = {});

// Endpoint of the piecewise-constant control curve (controls flattened as
// n_segments x horizontal_dim); exposed for tests.
GroupPoint control_endpoint(const Space& s, const std::vector<double>& controls, int n_segments);
double control_length(const Space& s, const std::vector<double>& controls, int n_segments);

// Scans the unit sphere {phi = 1} for the point with the smallest horizontal
// gradient norm of the chosen homogeneous norm.
struct VanishingScanResult {
    GroupPoint point;
    double grad_norm = 0.0;
};
VanishingScanResult gradient_vanishing_scan(HomogeneousNormKind kind, const Space& s, int resolution);

}  // namespace ubl

#endif
