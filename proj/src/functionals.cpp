#include "ubl/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "ubl/quadrature.hpp"

namespace ubl {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double center_distance(const GroupPoint& g, const GroupPoint& c) {
    // d(g o c^{-1}): the pairing invariant under the flows the differential
    // operators are built from, so translated plateaus keep |grad| = 1 a.e.
    return cc_distance(group_mul(g, group_inverse(c)));
}

double xlogx(double a) { return a > 0.0 ? a * std::log(a) : 0.0; }

}  // namespace

double phi_orlicz(double x, double varsigma) {
    if (varsigma == 0.0) return x;
    return x * std::pow(std::log1p(x), varsigma);
}

TestFunction constant_fn(double c) {
    TestFunction f;
    f.id = "const";
    f.eval = [c](const GroupPoint&) { return c; };
    f.grad_norm = [](const GroupPoint&) { return 0.0; };
    return f;
}

TestFunction coordinate_fn(const Space& s, int index) {
    if (index < 0 || index >= s.coord_dim()) throw InputError("coordinate_fn: index out of range");
    TestFunction f;
    f.id = "coord" + std::to_string(index);
    int hdim = s.horizontal_dim();
    if (index < hdim) {
        f.eval = [index](const GroupPoint& g) { return g.x[index]; };
        f.grad_norm = [](const GroupPoint&) { return 1.0; };
    } else {
        // central coordinate: X_i z = +-x_{i+-l}/2
        f.eval = [](const GroupPoint& g) { return g.z; };
        f.grad_norm = [](const GroupPoint& g) { return 0.5 * g.xnorm(); };
    }
    return f;
}

TestFunction plateau_fn(const GroupPoint& center, double inner, double outer) {
    if (!(outer > inner) || !(inner >= 0.0)) throw InputError("plateau_fn: need 0 <= inner < outer");
    TestFunction f;
    f.id = "plateau";
    double lip = 1.0 / (outer - inner);
    f.eval = [center, inner, outer, lip](const GroupPoint& g) {
        return clamp01((outer - center_distance(g, center)) * lip);
    };
    f.grad_norm = [center, inner, outer, lip](const GroupPoint& g) {
        double d = center_distance(g, center);
        return (d > inner && d < outer) ? lip : 0.0;
    };
    return f;
}

TestFunction radial_power_fn(const Space& s, double scale, double exponent) {
    if (!(scale > 0.0) || !(exponent >= 1.0)) throw InputError("radial_power_fn: scale > 0, exponent >= 1");
    TestFunction f;
    f.id = "radpow";
    auto dist = [s](const GroupPoint& g) { return s.heisenberg_like() ? cc_distance(g) : g.xnorm(); };
    f.eval = [dist, scale, exponent](const GroupPoint& g) { return std::pow(dist(g) / scale, exponent); };
    f.grad_norm = [dist, scale, exponent](const GroupPoint& g) {
        return exponent / scale * std::pow(dist(g) / scale, exponent - 1.0);
    };
    f.offaxis_only = s.heisenberg_like();
    return f;
}

TestFunction fourier_fn(const Space& s, const std::vector<double>& weights,
                        const std::vector<std::vector<double>>& freqs, const std::vector<double>& phases) {
    if (weights.size() != freqs.size() || weights.size() != phases.size() || weights.empty())
        throw InputError("fourier_fn: mismatched feature arrays");
    int dim = s.coord_dim();
    for (const auto& k : freqs)
        if (static_cast<int>(k.size()) != dim) throw InputError("fourier_fn: frequency dimension");
    TestFunction f;
    f.id = "fourier";
    f.eval = [weights, freqs, phases, dim](const GroupPoint& g) {
        auto c = coords_of(g);
        double v = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            double arg = phases[j];
            for (int i = 0; i < dim; ++i) arg += freqs[j][i] * c[i];
            v += weights[j] * std::cos(arg);
        }
        return v;
    };
    bool heis = s.heisenberg_like();
    int l = s.param;
    int hdim = s.horizontal_dim();
    f.grad_norm = [weights, freqs, phases, dim, heis, l, hdim](const GroupPoint& g) {
        auto c = coords_of(g);
        std::vector<double> dcoord(dim, 0.0);
        for (std::size_t j = 0; j < weights.size(); ++j) {
            double arg = phases[j];
            for (int i = 0; i < dim; ++i) arg += freqs[j][i] * c[i];
            double slope = -weights[j] * std::sin(arg);
            for (int i = 0; i < dim; ++i) dcoord[i] += slope * freqs[j][i];
        }
        double s2 = 0.0;
        if (!heis) {
            for (int i = 0; i < hdim; ++i) s2 += dcoord[i] * dcoord[i];
        } else {
            double dz = dcoord[hdim];
            for (int i = 0; i < l; ++i) {
                double xi = dcoord[i] + 0.5 * g.x[i + l] * dz;
                double xil = dcoord[i + l] - 0.5 * g.x[i] * dz;
                s2 += xi * xi + xil * xil;
            }
        }
        return std::sqrt(s2);
    };
    return f;
}

TestFunction polynomial_cutoff_fn(const Space& s, const std::vector<double>& coeffs, int coord,
                                  const GroupPoint& center, double inner, double outer) {
    if (coord < 0 || coord >= s.horizontal_dim()) throw InputError("polynomial_cutoff_fn: bad coordinate");
    TestFunction cut = plateau_fn(center, inner, outer);
    TestFunction f;
    f.id = "polycut";
    auto cut_eval = cut.eval;
    f.eval = [coeffs, coord, cut_eval](const GroupPoint& g) {
        double v = 0.0, xp = 1.0;
        for (double a : coeffs) {
            v += a * xp;
            xp *= g.x[coord];
        }
        return v * cut_eval(g);
    };
    // gradient by finite differences along the exact flows
    f.offaxis_only = s.heisenberg_like();
    return f;
}

TestFunction exp_tilt_fn(const Space& s, double t, int coord) {
    if (coord < 0 || coord >= s.horizontal_dim()) throw InputError("exp_tilt_fn: bad coordinate");
    TestFunction f;
    f.id = "tilt";
    f.eval = [t, coord](const GroupPoint& g) { return std::exp(t * g.x[coord]); };
    f.grad_norm = [t, coord](const GroupPoint& g) { return std::abs(t) * std::exp(t * g.x[coord]); };
    return f;
}

TestFunction radial_tilt_fn(const Space& s, double t) {
    TestFunction f;
    f.id = "rtilt";
    auto dist = [s](const GroupPoint& g) { return s.heisenberg_like() ? cc_distance(g) : g.xnorm(); };
    f.eval = [dist, t](const GroupPoint& g) { return std::exp(t * dist(g)); };
    f.grad_norm = [dist, t](const GroupPoint& g) { return std::abs(t) * std::exp(t * dist(g)); };
    f.offaxis_only = s.heisenberg_like();
    return f;
}

std::vector<TestFunction> default_suite(const Space& s, const SuiteSpec& spec) {
    Rng rng(spec.seed);
    std::vector<TestFunction> suite;
    auto random_center = [&]() {
        GroupPoint c{s, {}, 0.0};
        for (int i = 0; i < s.horizontal_dim(); ++i) c.x[i] = spec.center_scale * rng.normal();
        if (s.heisenberg_like()) c.z = spec.center_scale * rng.normal();
        return c;
    };
    for (int k = 0; k < spec.n_plateau; ++k) {
        double inner = rng.uniform(0.3, 1.5);
        double outer = inner + rng.uniform(0.3, 1.5);
        auto f = plateau_fn(random_center(), inner, outer);
        f.id = "plateau_" + std::to_string(k);
        suite.push_back(std::move(f));
    }
    for (int k = 0; k < spec.n_fourier; ++k) {
        int nf = 1 + static_cast<int>(rng.uniform() * 3.0);
        std::vector<double> w(nf), ph(nf);
        std::vector<std::vector<double>> fr(nf, std::vector<double>(s.coord_dim()));
        for (int j = 0; j < nf; ++j) {
            w[j] = rng.normal();
            ph[j] = rng.uniform(0.0, 2.0 * M_PI);
            for (int i = 0; i < s.coord_dim(); ++i)
                fr[j][i] = rng.normal() * (i >= s.horizontal_dim() ? 0.3 : 1.0);
        }
        auto f = fourier_fn(s, w, fr, ph);
        f.id = "fourier_" + std::to_string(k);
        suite.push_back(std::move(f));
    }
    for (int k = 0; k < spec.n_polycut; ++k) {
        int deg = 1 + static_cast<int>(rng.uniform() * 3.0);
        std::vector<double> coeffs(deg + 1);
        for (auto& a : coeffs) a = rng.normal();
        int coord = static_cast<int>(rng.uniform() * s.horizontal_dim()) % s.horizontal_dim();
        double inner = rng.uniform(0.5, 2.0);
        double outer = inner + rng.uniform(0.5, 2.0);
        auto f = polynomial_cutoff_fn(s, coeffs, coord, random_center(), inner, outer);
        f.id = "polycut_" + std::to_string(k);
        suite.push_back(std::move(f));
    }
    for (int k = 0; k < spec.n_radial; ++k) {
        auto f = radial_power_fn(s, rng.uniform(0.5, 2.0), rng.uniform(1.0, 2.5));
        f.id = "radpow_" + std::to_string(k);
        suite.push_back(std::move(f));
    }
    return suite;
}

FunctionColumns evaluate_columns(const TestFunction& f, const SampleSet& s, bool need_gradient) {
    FunctionColumns out;
    out.n = s.size();
    out.f.resize(out.n);
    for (std::size_t i = 0; i < out.n; ++i) {
        out.f[i] = f.eval(s.points[i]);
        if (!std::isfinite(out.f[i])) throw DiagnosticError("evaluate_columns: non-finite f at sample");
    }
    if (!need_gradient) return out;
    out.gnorm.resize(out.n, 0.0);
    for (std::size_t i = 0; i < out.n; ++i) {
        const GroupPoint& g = s.points[i];
        if (f.grad_norm) {
            out.gnorm[i] = f.grad_norm(g);
        } else {
            if (f.offaxis_only && !cc_differentiable(g)) {
                // skipped points contribute zero; the 1% diagnostic below
                // keeps this from silently distorting the Dirichlet form
                ++out.skipped;
                out.gnorm[i] = 0.0;
                continue;
            }
            out.gnorm[i] = horizontal_gradient_norm(f.eval, g, fd_step_first(g));
        }
        if (!std::isfinite(out.gnorm[i]))
            throw DiagnosticError("evaluate_columns: non-finite gradient at sample");
    }
    return out;
}

Estimate moment_q(const FunctionColumns& c, double q) {
    if (q < 1.0) throw InputError("moment_q: q >= 1");
    if (c.n == 0) throw InputError("moment_q: empty sample");
    std::vector<double> col(c.n);
    for (std::size_t i = 0; i < c.n; ++i) col[i] = std::pow(std::abs(c.f[i]), q);
    auto bs = block_sums({&col});
    return jackknife(bs, [](const std::vector<double>& s, double n) { return s[0] / n; });
}

Estimate variance_q(const FunctionColumns& c, double q) {
    if (q < 1.0) throw InputError("variance_q: q >= 1");
    if (c.n == 0) throw InputError("variance_q: empty sample");
    double mean = pairwise_sum(c.f) / static_cast<double>(c.n);
    std::vector<double> col(c.n);
    for (std::size_t i = 0; i < c.n; ++i) col[i] = std::pow(std::abs(c.f[i] - mean), q);
    auto bs = block_sums({&col});
    return jackknife(bs, [](const std::vector<double>& s, double n) { return s[0] / n; });
}

Estimate entropy_q(const FunctionColumns& c, double q) {
    if (c.n == 0) throw InputError("entropy_q: empty sample");
    std::vector<double> a(c.n), b(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        a[i] = std::pow(std::abs(c.f[i]), q);
        b[i] = xlogx(a[i]);
    }
    double atot = pairwise_sum(a);
    if (!(atot > 0.0)) throw InputError("entropy_q: mu|f|^q vanishes (degenerate input)");
    auto bs = block_sums({&a, &b});
    return jackknife(bs, [](const std::vector<double>& s, double n) {
        double ma = s[0] / n;
        return s[1] / n - ma * std::log(ma);
    });
}

Estimate phi_entropy(const FunctionColumns& c, double varsigma) {
    if (varsigma < 0.0 || varsigma > 1.0) throw InputError("phi_entropy: varsigma in [0,1]");
    if (c.n == 0) throw InputError("phi_entropy: empty sample");
    std::vector<double> a(c.n), u(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        a[i] = c.f[i] * c.f[i];
        u[i] = phi_orlicz(a[i], varsigma);
    }
    auto bs = block_sums({&a, &u});
    return jackknife(bs, [varsigma](const std::vector<double>& s, double n) {
        return s[1] / n - phi_orlicz(s[0] / n, varsigma);
    });
}

Estimate dirichlet_q(const FunctionColumns& c, const SampleSet& s, double q,
                     const std::function<double(double)>& weight) {
    if (q < 1.0) throw InputError("dirichlet_q: q >= 1");
    if (c.gnorm.size() != c.n) throw InputError("dirichlet_q: gradient columns missing");
    if (c.skipped * 100 > c.n)
        throw DiagnosticError("dirichlet_q: gradient skip fraction above 1%",
                              static_cast<double>(c.skipped) / c.n);
    std::vector<double> col(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        double w = weight ? weight(s.d[i]) : 1.0;
        col[i] = w * std::pow(c.gnorm[i], q);
    }
    auto bs = block_sums({&col});
    return jackknife(bs, [](const std::vector<double>& sums, double n) { return sums[0] / n; });
}

std::vector<ExpCurvePoint> exp_moment_curve(const FunctionColumns& c, const std::vector<double>& t_grid,
                                            double L) {
    std::vector<ExpCurvePoint> out;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw InputError("exp_moment_curve: t must be positive");
        double level = L;
        bool truncated = false;
        std::vector<double> tf(c.n);
        for (int attempt = 0; attempt < 1030; ++attempt) {
            double M = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < c.n; ++i) {
                double F = std::abs(c.f[i]) <= level ? c.f[i] : level;
                tf[i] = t * F;
                M = std::max(M, tf[i]);
            }
            if (M < 700.0 || level <= 1.0) break;
            level *= 0.5;  // overflow guard: lower the truncation level
            truncated = true;
        }
        double M = -std::numeric_limits<double>::infinity();
        for (double v : tf) M = std::max(M, v);
        std::vector<double> col(c.n);
        for (std::size_t i = 0; i < c.n; ++i) col[i] = std::exp(tf[i] - M);
        auto bs = block_sums({&col});
        auto est = jackknife(bs, [M, t](const std::vector<double>& s, double n) {
            return (M + std::log(s[0] / n)) / t;
        });
        out.push_back({t, est.value, est.std_error, truncated});
    }
    return out;
}

std::string estimate_json(const Estimate& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "{\"value\": %.12g, \"std_error\": %.12g, \"n\": %zu, \"method\": \"%s\"}",
                  e.value, e.std_error, e.n,
                  e.method == EstimateMethod::MC ? "MC" : "Quadrature");
    return buf;
}

// ---- quadrature twins ----

namespace {

GroupPoint line_point(const MeasureSpec& m, double x) {
    GroupPoint g{m.space, {}, 0.0};
    g.x[0] = x;
    return g;
}

double grad_norm_1d(const MeasureSpec& m, const TestFunction& f, double x) {
    if (f.grad_norm) return f.grad_norm(line_point(m, x));
    double h = 1e-5 * std::max(1.0, std::abs(x));
    return std::abs(f.eval(line_point(m, x + h)) - f.eval(line_point(m, x - h))) / (2.0 * h);
}

}  // namespace

Estimate moment_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol) {
    return expect_quad_1d(
        m, [&](double x) { return std::pow(std::abs(f.eval(line_point(m, x))), q); }, tol);
}

Estimate variance_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol) {
    double mean = expect_quad_1d(m, [&](double x) { return f.eval(line_point(m, x)); }, tol).value;
    return expect_quad_1d(
        m, [&](double x) { return std::pow(std::abs(f.eval(line_point(m, x)) - mean), q); }, tol);
}

Estimate entropy_q_quad(const MeasureSpec& m, const TestFunction& f, double q, double tol) {
    double A = expect_quad_1d(
                   m, [&](double x) { return std::pow(std::abs(f.eval(line_point(m, x))), q); }, tol)
                   .value;
    double B = expect_quad_1d(
                   m, [&](double x) { return xlogx(std::pow(std::abs(f.eval(line_point(m, x))), q)); },
                   tol)
                   .value;
    if (!(A > 0.0)) throw InputError("entropy_q_quad: degenerate input");
    return quad_estimate(B - A * std::log(A), tol);
}

Estimate phi_entropy_quad(const MeasureSpec& m, const TestFunction& f, double varsigma, double tol) {
    double A = expect_quad_1d(
                   m,
                   [&](double x) {
                       double v = f.eval(line_point(m, x));
                       return v * v;
                   },
                   tol)
                   .value;
    double U = expect_quad_1d(
                   m,
                   [&](double x) {
                       double v = f.eval(line_point(m, x));
                       return phi_orlicz(v * v, varsigma);
                   },
                   tol)
                   .value;
    return quad_estimate(U - phi_orlicz(A, varsigma), tol);
}

Estimate dirichlet_q_quad(const MeasureSpec& m, const TestFunction& f, double q,
                          const std::function<double(double)>& weight, double tol) {
    return expect_quad_1d(
        m,
        [&](double x) {
            double w = weight ? weight(std::abs(x)) : 1.0;
            return w * std::pow(grad_norm_1d(m, f, x), q);
        },
        tol);
}

}  // namespace ubl
