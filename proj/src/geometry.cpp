#include "ubl/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ubl {

Space Space::euclidean(int n) {
    if (n < 1 || n > kMaxHorizontalDim) throw InputError("Space::euclidean: n out of range");
    return Space{Kind::Euclidean, n};
}

Space Space::heisenberg(int l) {
    if (l < 1 || 2 * l > kMaxHorizontalDim) throw InputError("Space::heisenberg: l out of range");
    return Space{Kind::Heisenberg, l};
}

std::string Space::name() const {
    if (kind == Kind::Euclidean) return "R" + std::to_string(param);
    return "H" + std::to_string(param);
}

double GroupPoint::xnorm() const { return std::sqrt(xnorm2()); }

bool GroupPoint::finite() const {
    for (int i = 0; i < space.horizontal_dim(); ++i)
        if (!std::isfinite(x[i])) return false;
    return std::isfinite(z);
}

GroupPoint make_point(const Space& s, const std::vector<double>& coords) {
    if (static_cast<int>(coords.size()) != s.coord_dim())
        throw InputError("make_point: expected " + std::to_string(s.coord_dim()) + " coordinates");
    GroupPoint g{s, {}, 0.0};
    for (int i = 0; i < s.horizontal_dim(); ++i) g.x[i] = coords[i];
    if (s.heisenberg_like()) g.z = coords[s.horizontal_dim()];
    return g;
}

std::vector<double> coords_of(const GroupPoint& g) {
    std::vector<double> c(g.space.coord_dim());
    for (int i = 0; i < g.space.horizontal_dim(); ++i) c[i] = g.x[i];
    if (g.space.heisenberg_like()) c[g.space.horizontal_dim()] = g.z;
    return c;
}

double symplectic(const Space& s, const std::array<double, kMaxHorizontalDim>& a,
                  const std::array<double, kMaxHorizontalDim>& b) {
    if (!s.heisenberg_like()) return 0.0;
    int l = s.param;
    double v = 0.0;
    for (int i = 0; i < l; ++i) v += a[i] * b[i + l] - a[i + l] * b[i];
    return v;
}

GroupPoint group_mul(const GroupPoint& a, const GroupPoint& b) {
    if (!(a.space == b.space)) throw InputError("group_mul: dimension mismatch");
    GroupPoint r{a.space, {}, 0.0};
    for (int i = 0; i < a.space.horizontal_dim(); ++i) r.x[i] = a.x[i] + b.x[i];
    if (a.space.heisenberg_like()) r.z = a.z + b.z + 0.5 * symplectic(a.space, a.x, b.x);
    return r;
}

GroupPoint group_inverse(const GroupPoint& g) {
    GroupPoint r{g.space, {}, -g.z};
    for (int i = 0; i < g.space.horizontal_dim(); ++i) r.x[i] = -g.x[i];
    if (!g.space.heisenberg_like()) r.z = 0.0;
    return r;
}

GroupPoint dilate(double s, const GroupPoint& g) {
    if (!(s > 0.0)) throw InputError("dilate: scale must be positive");
    GroupPoint r{g.space, {}, s * s * g.z};
    for (int i = 0; i < g.space.horizontal_dim(); ++i) r.x[i] = s * g.x[i];
    if (!g.space.heisenberg_like()) r.z = 0.0;
    return r;
}

namespace {

// (lam - sin lam) / (8 sin^2(lam/2)); strictly increasing on (0, 2pi),
// equals |z| / |x|^2 along the minimizing geodesic through (x, z).
double geodesic_ratio(double lam) {
    double num;
    if (lam < 0.1) {
        double l2 = lam * lam;
        num = lam * l2 / 6.0 * (1.0 - l2 / 20.0 * (1.0 - l2 / 42.0));
    } else {
        num = lam - std::sin(lam);
    }
    double s = std::sin(0.5 * lam);
    return num / (8.0 * s * s);
}

double geodesic_ratio_deriv(double lam) {
    double s = std::sin(0.5 * lam);
    double num = lam < 0.1 ? lam * lam * lam / 6.0 * (1.0 - lam * lam / 20.0) : lam - std::sin(lam);
    return 0.25 - num * std::cos(0.5 * lam) / (8.0 * s * s * s);
}

}  // namespace

double h1_distance(double r, double z) {
    z = std::abs(z);
    r = std::abs(r);
    if (z == 0.0) return r;
    if (r < 1e-154) return std::sqrt(4.0 * M_PI * z);
    double rho = z / (r * r);
    if (rho < 1e-8) {
        // lam ~ 12 rho; d = r * (lam/2)/sin(lam/2) = r (1 + lam^2/24 + ...)
        return r * (1.0 + 6.0 * rho * rho);
    }
    // bracketed Newton for geodesic_ratio(lam) = rho on (0, 2pi)
    double lo = 0.0, hi = 2.0 * M_PI;
    double lam = rho < 1.0 ? std::min(6.0, 12.0 * rho / (1.0 + 2.4 * rho))
                           : 2.0 * M_PI - std::sqrt(std::min(M_PI / rho, 4.0));
    for (int it = 0; it < 80; ++it) {
        double g = geodesic_ratio(lam) - rho;
        if (g > 0.0)
            hi = lam;
        else
            lo = lam;
        double step = g / geodesic_ratio_deriv(lam);
        double next = lam - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lam) < 1e-15 * (1.0 + lam)) {
            lam = next;
            break;
        }
        lam = next;
    }
    double half = 0.5 * lam;
    return r * half / std::sin(half);
}

double cc_distance(const GroupPoint& g) {
    if (!g.finite()) throw InputError("cc_distance: non-finite coordinates");
    if (!g.space.heisenberg_like()) return g.xnorm();
    return h1_distance(g.xnorm(), g.z);
}

double pair_distance(const GroupPoint& g, const GroupPoint& h) {
    return cc_distance(group_mul(group_inverse(g), h));
}

double kaplan_norm(const GroupPoint& g) {
    if (!g.space.heisenberg_like()) return g.xnorm();
    double x2 = g.xnorm2();
    return std::pow(x2 * x2 + 16.0 * g.z * g.z, 0.25);
}

double homogeneous_norm(HomogeneousNormKind kind, const GroupPoint& g) {
    return kind == HomogeneousNormKind::Kaplan ? kaplan_norm(g) : cc_distance(g);
}

bool cc_differentiable(const GroupPoint& g) {
    if (!g.space.heisenberg_like()) return g.xnorm() > 1e-8;
    return g.xnorm() > 1e-8;
}

double fd_step_first(const GroupPoint& g) { return 1e-4 * std::max(1.0, kaplan_norm(g)); }
double fd_step_second(const GroupPoint& g) { return 1e-3 * std::max(1.0, kaplan_norm(g)); }

namespace {

GroupPoint horizontal_delta(const Space& s, int i, double t) {
    GroupPoint d{s, {}, 0.0};
    d.x[i] = t;
    return d;
}

}  // namespace

std::vector<double> horizontal_gradient(const ScalarField& f, const GroupPoint& g, double h) {
    if (h == 0.0) throw InputError("horizontal_gradient: step must be nonzero");
    int m = g.space.horizontal_dim();
    std::vector<double> grad(m);
    for (int i = 0; i < m; ++i) {
        double fp = f(group_mul(horizontal_delta(g.space, i, h), g));
        double fm = f(group_mul(horizontal_delta(g.space, i, -h), g));
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw DiagnosticError("horizontal_gradient: non-finite function value");
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

double horizontal_gradient_norm(const ScalarField& f, const GroupPoint& g, double h) {
    auto grad = horizontal_gradient(f, g, h);
    double s = 0.0;
    for (double v : grad) s += v * v;
    return std::sqrt(s);
}

double kohn_laplacian(const ScalarField& f, const GroupPoint& g, double h) {
    if (h == 0.0) throw InputError("kohn_laplacian: step must be nonzero");
    int m = g.space.horizontal_dim();
    double f0 = f(g);
    double lap = 0.0;
    for (int i = 0; i < m; ++i) {
        double fp = f(group_mul(horizontal_delta(g.space, i, h), g));
        double fm = f(group_mul(horizontal_delta(g.space, i, -h), g));
        if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(f0))
            throw DiagnosticError("kohn_laplacian: non-finite function value");
        lap += (fp - 2.0 * f0 + fm) / (h * h);
    }
    return lap;
}

GroupPoint control_endpoint(const Space& s, const std::vector<double>& controls, int n_segments) {
    int m = s.horizontal_dim();
    double h = 1.0 / n_segments;
    GroupPoint p = GroupPoint::identity(s);
    for (int k = 0; k < n_segments; ++k) {
        GroupPoint inc{s, {}, 0.0};
        for (int j = 0; j < m; ++j) inc.x[j] = h * controls[k * m + j];
        p = group_mul(inc, p);
    }
    return p;
}

double control_length(const Space& s, const std::vector<double>& controls, int n_segments) {
    int m = s.horizontal_dim();
    double h = 1.0 / n_segments;
    double len = 0.0;
    for (int k = 0; k < n_segments; ++k) {
        double s2 = 0.0;
        for (int j = 0; j < m; ++j) s2 += controls[k * m + j] * controls[k * m + j];
        len += h * std::sqrt(s2);
    }
    return len;
}

namespace {

// Kaplan norm of the endpoint mismatch, used for residual reporting.
double mismatch_norm(const GroupPoint& endpoint, const GroupPoint& target) {
    GroupPoint res = group_mul(group_inverse(endpoint), target);
    double x2 = res.xnorm2();
    return std::pow(x2 * x2 + 16.0 * res.z * res.z, 0.25);
}

// Closed-form pair of straight horizontal segments (u, v) that carries the
// point P exactly to (X, zT): u + v = X - P.x and S(v, u) fixes the central
// coordinate. Returns false in the degenerate case where P.x already equals X
// but the central mismatch is nonzero (no two-segment closure exists).
bool closing_pair(const Space& s, const GroupPoint& P, const GroupPoint& target,
                  std::array<double, kMaxHorizontalDim>& u, std::array<double, kMaxHorizontalDim>& v) {
    int m = s.horizontal_dim();
    std::array<double, kMaxHorizontalDim> delta{};
    double d2 = 0.0;
    for (int j = 0; j < m; ++j) {
        delta[j] = target.x[j] - P.x[j];
        d2 += delta[j] * delta[j];
    }
    if (!s.heisenberg_like()) {
        for (int j = 0; j < m; ++j) {
            u[j] = 0.5 * delta[j];
            v[j] = 0.5 * delta[j];
        }
        return true;
    }
    double zeta = 2.0 * (target.z - P.z) - symplectic(s, delta, P.x);
    if (d2 < 1e-18) return std::abs(zeta) < 1e-15;
    int l = s.param;
    // J delta rotates each symplectic plane; <v, J delta> = S(v, delta)
    std::array<double, kMaxHorizontalDim> jd{};
    for (int i = 0; i < l; ++i) {
        jd[i] = delta[i + l];
        jd[i + l] = -delta[i];
    }
    for (int j = 0; j < m; ++j) {
        v[j] = 0.5 * delta[j] + (zeta / d2) * jd[j];
        u[j] = delta[j] - v[j];
    }
    return true;
}

double vec_norm(const std::array<double, kMaxHorizontalDim>& a, int m) {
    double s2 = 0.0;
    for (int j = 0; j < m; ++j) s2 += a[j] * a[j];
    return std::sqrt(s2);
}

// Length of the curve whose free segments are b[0..n_free) with the final two
// segments obtained from closing_pair; the endpoint constraint is satisfied
// exactly, so the search is unconstrained.
struct ClosedProblem {
    const Space& space;
    const GroupPoint& target;
    int n;  // total segments
    int m;
    double h;
    int n_free() const { return n - 2; }

    double length_from(const GroupPoint& prefix_end, double free_len) const {
        std::array<double, kMaxHorizontalDim> u{}, v{};
        if (!closing_pair(space, prefix_end, target, u, v)) return 1e30;
        return free_len + vec_norm(u, m) + vec_norm(v, m);
    }

    double objective(const std::vector<double>& b) const {
        GroupPoint p = GroupPoint::identity(space);
        double len = 0.0;
        for (int k = 0; k < n_free(); ++k) {
            GroupPoint inc{space, {}, 0.0};
            double s2 = 0.0;
            for (int j = 0; j < m; ++j) {
                inc.x[j] = h * b[k * m + j];
                s2 += b[k * m + j] * b[k * m + j];
            }
            len += h * std::sqrt(s2);
            p = group_mul(inc, p);
        }
        return length_from(p, len);
    }

    std::vector<double> full_controls(const std::vector<double>& b) const {
        GroupPoint p = GroupPoint::identity(space);
        for (int k = 0; k < n_free(); ++k) {
            GroupPoint inc{space, {}, 0.0};
            for (int j = 0; j < m; ++j) inc.x[j] = h * b[k * m + j];
            p = group_mul(inc, p);
        }
        std::array<double, kMaxHorizontalDim> u{}, v{};
        closing_pair(space, p, target, u, v);
        std::vector<double> a(n * m, 0.0);
        std::copy(b.begin(), b.begin() + n_free() * m, a.begin());
        for (int j = 0; j < m; ++j) {
            a[(n - 2) * m + j] = u[j] / h;
            a[(n - 1) * m + j] = v[j] / h;
        }
        return a;
    }
};

// Incremental sweep: when only free segment k varies, the free-prefix endpoint
// is suffix(k+1) o (h b_k, 0) o prefix(k-1). Sweeping k in ascending order
// keeps the suffix array valid because segments > k are untouched.
struct SweepState {
    const ClosedProblem& prob;
    std::vector<double>& b;
    std::vector<GroupPoint> suffix;
    GroupPoint prefix;
    double len_other = 0.0;

    explicit SweepState(const ClosedProblem& p, std::vector<double>& ctrl)
        : prob(p), b(ctrl), prefix(GroupPoint::identity(p.space)) {
        suffix.assign(prob.n_free() + 1, GroupPoint::identity(prob.space));
        for (int k = prob.n_free() - 1; k >= 0; --k) suffix[k] = group_mul(suffix[k + 1], segment(k));
    }

    GroupPoint segment(int k) const {
        GroupPoint inc{prob.space, {}, 0.0};
        for (int j = 0; j < prob.m; ++j) inc.x[j] = prob.h * b[k * prob.m + j];
        return inc;
    }

    double seg_norm(int k, int j, double t) const {
        double s2 = 0.0;
        for (int jj = 0; jj < prob.m; ++jj) {
            double w = b[k * prob.m + jj] + (jj == j ? t : 0.0);
            s2 += w * w;
        }
        return std::sqrt(s2);
    }

    void begin_segment(int k) {
        len_other = 0.0;
        for (int kk = 0; kk < prob.n_free(); ++kk)
            if (kk != k) len_other += prob.h * norm_of(kk);
    }

    double norm_of(int k) const {
        double s2 = 0.0;
        for (int jj = 0; jj < prob.m; ++jj) s2 += b[k * prob.m + jj] * b[k * prob.m + jj];
        return std::sqrt(s2);
    }

    double eval(int k, int j, double t) const {
        GroupPoint inc{prob.space, {}, 0.0};
        for (int jj = 0; jj < prob.m; ++jj)
            inc.x[jj] = prob.h * (b[k * prob.m + jj] + (jj == j ? t : 0.0));
        GroupPoint p = group_mul(suffix[k + 1], group_mul(inc, prefix));
        double len = len_other + prob.h * seg_norm(k, j, t);
        return prob.length_from(p, len);
    }

    void commit_segment(int k) { prefix = group_mul(segment(k), prefix); }
};

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace

namespace {

void descend(const ClosedProblem& prob, std::vector<double>& b, double scale, int sweeps_per_round) {
    double prev = prob.objective(b);
    for (double delta :
         {1.0 * scale, 0.3 * scale, 0.08 * scale, 0.02 * scale, 0.005 * scale, 0.001 * scale}) {
        for (int sweep = 0; sweep < sweeps_per_round; ++sweep) {
            SweepState st(prob, b);
            for (int k = 0; k < prob.n_free(); ++k) {
                st.begin_segment(k);
                for (int j = 0; j < prob.m; ++j) {
                    double t = golden_min([&](double u) { return st.eval(k, j, u); }, -delta, delta, 24);
                    if (st.eval(k, j, t) < st.eval(k, j, 0.0)) b[k * prob.m + j] += t;
                }
                st.commit_segment(k);
            }
            double cur = prob.objective(b);
            if (prev - cur < 1e-12 * std::max(1.0, prev)) {
                prev = cur;
                break;
            }
            prev = cur;
        }
    }
}

}  // namespace

OracleResult cc_distance_oracle(const GroupPoint& g, int n_segments, const OracleOptions& opt) {
    if (n_segments < 8) throw InputError("cc_distance_oracle: need n_segments >= 8");
    if (!g.finite()) throw InputError("cc_distance_oracle: non-finite target");
    const Space& s = g.space;
    const int m = s.horizontal_dim();

    double best_len = std::numeric_limits<double>::infinity();
    double best_res = std::numeric_limits<double>::infinity();
    const double scale = std::max(1.0, kaplan_norm(g));

    // coarse-to-fine segment ladder; each level warm-starts from the previous
    std::vector<int> levels;
    for (int n = n_segments; n >= 16; n /= 2) levels.push_back(n);
    levels.push_back(8);
    std::reverse(levels.begin(), levels.end());

    for (int restart = 0; restart < opt.restarts; ++restart) {
        Rng rng(derive_seed(opt.seed, restart));
        // straight component toward the horizontal target plus a rotating
        // component in one symplectic plane to generate the central part
        double amp = std::sqrt(4.0 * M_PI * std::abs(g.z)) * rng.uniform(0.5, 1.4) + 0.03 * rng.uniform();
        if (restart == 0) amp = 0.0;  // pure straight seed
        double phase = rng.uniform(0.0, 2.0 * M_PI);
        double dir = (g.z >= 0.0 ? 1.0 : -1.0) * (rng.uniform() < 0.9 ? 1.0 : -1.0);
        int plane = s.heisenberg_like() ? static_cast<int>(rng.uniform() * s.param) % s.param : 0;

        std::vector<double> b;
        int prev_n = 0;
        for (int level : levels) {
            ClosedProblem prob{s, g, level, m, 1.0 / level};
            std::vector<double> bl(prob.n_free() * m, 0.0);
            if (b.empty()) {
                for (int k = 0; k < prob.n_free(); ++k) {
                    double t = 2.0 * M_PI * (k + 0.5) / level;
                    for (int j = 0; j < m; ++j) bl[k * m + j] = g.x[j] + 0.05 * amp * rng.normal();
                    if (s.heisenberg_like()) {
                        bl[k * m + plane] += amp * std::cos(dir * t + phase);
                        bl[k * m + plane + s.param] += amp * std::sin(dir * t + phase);
                    }
                }
            } else {
                // upsample the previous level's full control list
                ClosedProblem prev_prob{s, g, prev_n, m, 1.0 / prev_n};
                auto full = prev_prob.full_controls(b);
                for (int k = 0; k < prob.n_free(); ++k) {
                    int src = std::min(prev_n - 1, k * prev_n / level);
                    for (int j = 0; j < m; ++j) bl[k * m + j] = full[src * m + j];
                }
            }
            descend(prob, bl, scale, opt.sweeps_per_round);
            b = std::move(bl);
            prev_n = level;
        }

        ClosedProblem prob{s, g, n_segments, m, 1.0 / n_segments};
        auto a = prob.full_controls(b);
        double res = mismatch_norm(control_endpoint(s, a, n_segments), g);
        double len = control_length(s, a, n_segments);
        if (res < opt.target_residual && len < best_len) {
            best_len = len;
            best_res = res;
        } else if (best_len == std::numeric_limits<double>::infinity() && res < best_res) {
            best_res = res;
        }
    }

    if (best_res >= opt.target_residual)
        throw DiagnosticError("cc_distance_oracle: endpoint not reached; best residual " +
                                  std::to_string(best_res),
                              best_res);
    return OracleResult{best_len, best_res, n_segments};
}

VanishingScanResult gradient_vanishing_scan(HomogeneousNormKind kind, const Space& s, int resolution) {
    if (!s.heisenberg_like()) throw InputError("gradient_vanishing_scan: Heisenberg space required");
    if (resolution < 8) throw InputError("gradient_vanishing_scan: resolution too small");
    ScalarField phi = [kind](const GroupPoint& p) { return homogeneous_norm(kind, p); };
    VanishingScanResult best{GroupPoint::identity(s), std::numeric_limits<double>::infinity()};
    int n_angle = std::max(8, resolution / 4);
    for (int iv = 0; iv <= resolution; ++iv) {
        double v = -0.5 * M_PI + M_PI * iv / resolution;
        double rho2 = std::max(0.0, std::cos(v));
        double rho = std::sqrt(rho2);
        double zeta = 0.25 * std::sin(v);
        for (int ia = 0; ia < n_angle; ++ia) {
            double th = 2.0 * M_PI * ia / n_angle;
            GroupPoint p{s, {}, zeta};
            p.x[0] = rho * std::cos(th);
            p.x[s.param] = rho * std::sin(th);
            if (kind == HomogeneousNormKind::CarnotCaratheodory) {
                // place the scan point on the CC unit sphere, skipping the axis
                if (!cc_differentiable(p)) continue;
                p = dilate(1.0 / cc_distance(p), p);
            }
            double gn = horizontal_gradient_norm(phi, p, 1e-5);
            if (gn < best.grad_norm) best = {p, gn};
        }
    }
    return best;
}

}  // namespace ubl
