#include "ubl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ubl/quadrature.hpp"

namespace ubl {

double WSpec::value(double d, double p) const {
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::CosOscillation:
            return amplitude * std::pow(d, p - 1.0) * std::cos(d);
        case Kind::PolyInD: {
            double v = 0.0, dp = 1.0;
            for (double c : coeffs) {
                v += c * dp;
                dp *= d;
            }
            return v;
        }
    }
    return 0.0;
}

double WSpec::dvalue(double d, double p) const {
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::CosOscillation:
            if (d == 0.0) return p > 2.0 ? 0.0 : (p == 2.0 ? amplitude : 0.0);
            return amplitude * ((p - 1.0) * std::pow(d, p - 2.0) * std::cos(d) -
                                std::pow(d, p - 1.0) * std::sin(d));
        case Kind::PolyInD: {
            double v = 0.0, dp = 1.0;
            for (std::size_t j = 1; j < coeffs.size(); ++j) {
                v += static_cast<double>(j) * coeffs[j] * dp;
                dp *= d;
            }
            return v;
        }
    }
    return 0.0;
}

double WSpec::gamma_for(double delta, double p, double dmax) const {
    double gamma = 0.0;
    for (double d = 0.0; d <= dmax; d += 0.01) {
        double excess = std::abs(dvalue(d, p)) - delta * std::pow(d, p - 1.0);
        gamma = std::max(gamma, excess);
    }
    return gamma;
}

double VSpec::value(double d) const {
    if (kind == Kind::None) return 0.0;
    return c * std::exp(-d * d);
}

double VSpec::osc() const { return kind == Kind::None ? 0.0 : std::abs(c); }

std::string MeasureSpec::describe() const {
    char buf[256];
    const char* kind = pot.kind == PotentialSpec::Kind::Power
                           ? "power"
                           : (pot.kind == PotentialSpec::Kind::SlowTail ? "slowtail" : "hk");
    std::snprintf(buf, sizeof buf, "%s|%s|%s|beta=%.6g|p=%.6g|W=%d:%.6g|V=%d:%.6g|norm=%d", id.c_str(),
                  space.name().c_str(), kind, pot.beta, pot.p, static_cast<int>(pot.W.kind),
                  pot.W.amplitude, static_cast<int>(pot.V.kind), pot.V.c, static_cast<int>(pot.norm));
    return buf;
}

MeasureSpec power_measure(const Space& s, double beta, double p, HomogeneousNormKind norm, WSpec W,
                          VSpec V) {
    if (!(beta > 0.0) || !(p >= 1.0)) throw InputError("power_measure: need beta > 0, p >= 1");
    MeasureSpec m;
    m.space = s;
    m.pot.kind = PotentialSpec::Kind::Power;
    m.pot.beta = beta;
    m.pot.p = p;
    m.pot.W = W;
    m.pot.V = V;
    m.pot.norm = norm;
    m.id = "power";
    return m;
}

MeasureSpec slow_tail_measure(const Space& s, double beta) {
    MeasureSpec m;
    m.space = s;
    m.pot.kind = PotentialSpec::Kind::SlowTail;
    m.pot.beta = beta;
    m.id = "slowtail";
    return m;
}

MeasureSpec heat_kernel_surrogate_measure() {
    MeasureSpec m;
    m.space = Space::heisenberg(1);
    m.pot.kind = PotentialSpec::Kind::HeatKernelSurrogate;
    m.id = "hksurrogate";
    return m;
}

MeasureSpec measure_by_name(const std::string& name) {
    if (name == "gauss1d") {
        auto m = power_measure(Space::euclidean(1), 1.0, 2.0);
        m.id = name;
        return m;
    }
    if (name == "quartic1d") {
        auto m = power_measure(Space::euclidean(1), 1.0, 4.0);
        m.id = name;
        return m;
    }
    if (name == "subq1d") {
        auto m = power_measure(Space::euclidean(1), 1.0, 1.5);
        m.id = name;
        return m;
    }
    if (name == "slowtail3d") {
        auto m = slow_tail_measure(Space::euclidean(3), 40.0);
        m.id = name;
        return m;
    }
    if (name == "h1gauss") {
        auto m = power_measure(Space::heisenberg(1), 1.0, 2.0);
        m.id = name;
        return m;
    }
    if (name == "h1kaplan") {
        auto m = power_measure(Space::heisenberg(1), 1.0, 2.0, HomogeneousNormKind::Kaplan);
        m.id = name;
        return m;
    }
    if (name == "hksurrogate") return heat_kernel_surrogate_measure();
    throw InputError("unknown measure name: " + name);
}

double potential_distance(const MeasureSpec& m, const GroupPoint& g) {
    if (!m.space.heisenberg_like()) return g.xnorm();
    if (m.pot.kind == PotentialSpec::Kind::HeatKernelSurrogate) return cc_distance(g);
    return homogeneous_norm(m.pot.norm, g);
}

double potential_value(const MeasureSpec& m, const GroupPoint& g) {
    if (!g.finite()) throw InputError("potential_value: non-finite coordinates");
    double d = potential_distance(m, g);
    switch (m.pot.kind) {
        case PotentialSpec::Kind::Power:
            return m.pot.beta * std::pow(d, m.pot.p) + m.pot.W.value(d, m.pot.p) + m.pot.V.value(d);
        case PotentialSpec::Kind::SlowTail:
            return m.pot.beta * std::log1p(d);
        case PotentialSpec::Kind::HeatKernelSurrogate:
            return 0.25 * d * d + 0.5 * std::log1p(g.xnorm() * d);
    }
    return 0.0;
}

double log_density_unnormalized(const MeasureSpec& m, const GroupPoint& g) {
    return -potential_value(m, g);
}

namespace {

double unit_sphere_area(int n) {
    // S_{n-1} = 2 pi^{n/2} / Gamma(n/2)
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// 1-D potential profile U(r) for radial quadrature (r >= 0).
double radial_potential(const MeasureSpec& m, double r) {
    GroupPoint g{m.space, {}, 0.0};
    g.x[0] = r;
    return potential_value(m, g);
}

struct HeisProfile {
    const MeasureSpec& m;
    double operator()(double rho, double z) const {
        GroupPoint g{m.space, {}, z};
        g.x[0] = rho;
        return potential_value(m, g);
    }
};

}  // namespace

double truncation_radius_1d(const MeasureSpec& m, double cut) {
    double target = -std::log(cut);
    double R = 1.0;
    for (int i = 0; i < 80 && radial_potential(m, R) < target; ++i) R *= 1.3;
    return R;
}

NormalizeResult normalize(MeasureSpec& m, double tol) {
    if (m.pot.kind == PotentialSpec::Kind::SlowTail) {
        if (!(m.pot.beta > m.space.homogeneous_dim()))
            throw InputError("normalize: slow tail requires beta > homogeneous dimension");
    }
    double logZ = 0.0, achieved = tol;
    if (!m.space.heisenberg_like()) {
        int n = m.space.param;
        double beta = m.pot.beta, p = m.pot.p;
        Fn1 g = [&](double r) { return (n - 1) * std::log(std::max(r, 1e-300)) - radial_potential(m, r); };
        Fn1 bound;
        if (m.pot.kind == PotentialSpec::Kind::SlowTail) {
            double b = m.pot.beta;
            bound = [n, b](double R) { return (n - b) * std::log1p(R) - std::log(b - n); };
        } else {
            // U >= 0.5 beta r^p beyond r0; locate r0 by scan
            double r0 = 1.0;
            for (double r = 1.0; r < 500.0; r += 0.5)
                if (radial_potential(m, r) < 0.5 * beta * std::pow(r, p)) r0 = r + 1.0;
            bound = [n, beta, p, r0](double R) {
                double Reff = std::max(R, r0);
                return (n - 1) * std::log(Reff) - 0.5 * beta * std::pow(Reff, p) -
                       std::log(0.5 * beta * p * std::pow(Reff, p - 1.0));
            };
        }
        auto q = log_integrate_tail(g, 0.0, tol, bound);
        logZ = std::log(unit_sphere_area(n)) + q.value;
        achieved = q.error;
    } else {
        int l = m.space.param;
        HeisProfile U{m};
        // d >= max(rho, 2 sqrt|z|) / 2 via the Kaplan norm, so the potential
        // dominates e^{-c rho^p} and e^{-c z^{p/2}} at a computable rate
        double beta_eff = m.pot.kind == PotentialSpec::Kind::HeatKernelSurrogate ? 0.25 : m.pot.beta;
        double p_eff = m.pot.kind == PotentialSpec::Kind::HeatKernelSurrogate ? 2.0 : m.pot.p;
        double lam = -std::log(1e-18);
        double R0 = 2.0 * std::pow(lam / beta_eff, 1.0 / p_eff) + 4.0;
        double Z0 = std::pow(lam / beta_eff, 2.0 / p_eff) + 4.0;
        double prev = 0.0;
        for (int round = 0; round < 4; ++round) {
            double Rr = R0 * (1 << round), Zm = Z0 * (1 << round);
            Fn1 outer = [&](double rho) {
                auto inner = log_integrate([&](double z) { return -U(rho, z); }, 0.0, Zm, 0.2 * tol, 24);
                return (2 * l - 1) * std::log(std::max(rho, 1e-300)) + inner.value;
            };
            auto q = log_integrate(outer, 0.0, Rr, 0.2 * tol, 24);
            double cur = std::log(unit_sphere_area(2 * l)) + std::log(2.0) + q.value;
            if (round > 0 && std::abs(cur - prev) < tol) {
                logZ = cur;
                achieved = std::abs(cur - prev);
                m.logZ = logZ;
                m.logZ_tol = achieved;
                return {logZ, achieved};
            }
            prev = cur;
        }
        logZ = prev;
        achieved = 10.0 * tol;  // doubling did not fully settle; report what held
    }
    m.logZ = logZ;
    m.logZ_tol = achieved;
    return {logZ, achieved};
}

Estimate expect_quad_1d(const MeasureSpec& m, const std::function<double(double)>& h, double tol) {
    if (m.space.heisenberg_like() || m.space.param != 1)
        throw InputError("expect_quad_1d: R^1 measures only");
    if (!m.logZ) throw InputError("expect_quad_1d: normalize first");
    double R = truncation_radius_1d(m, 1e-18);
    double logZ = *m.logZ;
    auto q = integrate(
        [&](double x) {
            GroupPoint g{m.space, {}, 0.0};
            g.x[0] = x;
            return h(x) * std::exp(-potential_value(m, g) - logZ);
        },
        -R, R, tol);
    return quad_estimate(q.value, std::max(q.error, tol), q.evals);
}

namespace {

std::vector<double> coordinate_scales(const Space& s) {
    std::vector<double> sc(s.coord_dim(), 1.0);
    if (s.heisenberg_like()) sc.back() = 2.0;
    return sc;
}

double lag_autocorr(const std::vector<double>& v, std::size_t lag) {
    std::size_t n = v.size();
    if (n <= lag + 2) return 0.0;
    double mean = pairwise_sum(v) / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) den += (v[i] - mean) * (v[i] - mean);
    for (std::size_t i = 0; i + lag < n; ++i) num += (v[i] - mean) * (v[i + lag] - mean);
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

SampleSet sample(const MeasureSpec& m, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("sample: need n > 0");
    Rng rng(seed);
    const int dim = m.space.coord_dim();
    auto scales = coordinate_scales(m.space);

    std::vector<double> cur(dim, 0.5);
    GroupPoint gcur = make_point(m.space, cur);
    double lcur = log_density_unnormalized(m, gcur);
    double step = m.sampler.step_scale;

    auto propose = [&](std::vector<double>& prop) {
        for (int i = 0; i < dim; ++i) prop[i] = cur[i] + step * scales[i] * rng.normal();
    };

    std::vector<double> prop(dim);
    // burn-in with step tuning toward acceptance in [0.2, 0.45]
    int window = 250, accepted = 0;
    for (int it = 0; it < m.sampler.burn_in; ++it) {
        propose(prop);
        GroupPoint gp = make_point(m.space, prop);
        double lp = log_density_unnormalized(m, gp);
        if (std::log(rng.uniform() + 1e-300) < lp - lcur) {
            cur = prop;
            gcur = gp;
            lcur = lp;
            ++accepted;
        }
        if ((it + 1) % window == 0) {
            double rate = static_cast<double>(accepted) / window;
            if (rate < 0.2 || rate > 0.45) step = std::clamp(step * std::exp(rate - 0.3), 1e-3, 50.0);
            accepted = 0;
        }
    }

    // pilot run to pick the thinning from the lag autocorrelation of d
    std::vector<double> pilot_d;
    pilot_d.reserve(m.sampler.pilot);
    for (int it = 0; it < m.sampler.pilot; ++it) {
        propose(prop);
        GroupPoint gp = make_point(m.space, prop);
        double lp = log_density_unnormalized(m, gp);
        if (std::log(rng.uniform() + 1e-300) < lp - lcur) {
            cur = prop;
            gcur = gp;
            lcur = lp;
        }
        pilot_d.push_back(potential_distance(m, gcur));
    }
    int thinning = 1;
    while (thinning < m.sampler.max_thinning && lag_autocorr(pilot_d, thinning) >= 0.5) thinning *= 2;

    SampleSet out;
    out.space = m.space;
    out.seed = seed;
    out.thinning = thinning;
    out.spec_hash = std::to_string(fnv1a(m.describe()));
    out.points.reserve(n);
    out.d.reserve(n);
    std::size_t total = 0, acc = 0;
    while (out.points.size() < n) {
        for (int t = 0; t < thinning; ++t) {
            propose(prop);
            GroupPoint gp = make_point(m.space, prop);
            double lp = log_density_unnormalized(m, gp);
            ++total;
            if (std::log(rng.uniform() + 1e-300) < lp - lcur) {
                cur = prop;
                gcur = gp;
                lcur = lp;
                ++acc;
            }
        }
        out.points.push_back(gcur);
        out.d.push_back(potential_distance(m, gcur));
    }
    out.acceptance_rate = static_cast<double>(acc) / static_cast<double>(total);
    if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.8)
        throw DiagnosticError("sample: acceptance rate " + std::to_string(out.acceptance_rate) +
                                  " outside [0.05, 0.8] after tuning",
                              out.acceptance_rate);
    double rho = std::max(0.0, lag_autocorr(out.d, 1));
    out.ess = static_cast<double>(n) * (1.0 - rho) / (1.0 + rho);
    return out;
}

SampleSet sample_radial_exact(const MeasureSpec& m, std::size_t n, std::uint64_t seed) {
    if (m.space.heisenberg_like() || m.pot.kind != PotentialSpec::Kind::Power || !m.pot.W.none() ||
        !m.pot.V.none())
        throw InputError("sample_radial_exact: base power potentials on R^n only");
    const int dimn = m.space.param;
    const double R = truncation_radius_1d(m, 1e-16);
    const int cells = 4096;
    std::vector<double> edges(cells + 1), cdf(cells + 1, 0.0);
    for (int i = 0; i <= cells; ++i) edges[i] = R * i / cells;
    for (int i = 0; i < cells; ++i) {
        auto q = integrate(
            [&](double r) { return std::pow(r, dimn - 1) * std::exp(-radial_potential(m, r)); }, edges[i],
            edges[i + 1], 1e-12, 16);
        cdf[i + 1] = cdf[i] + q.value;
    }
    double total = cdf[cells];

    Rng rng(seed);
    SampleSet out;
    out.space = m.space;
    out.seed = seed;
    out.spec_hash = std::to_string(fnv1a(m.describe() + "|radial_exact"));
    out.points.reserve(n);
    out.d.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int i = std::clamp(static_cast<int>(it - cdf.begin()) - 1, 0, cells - 1);
        double frac = (u - cdf[i]) / std::max(cdf[i + 1] - cdf[i], 1e-300);
        double r = edges[i] + frac * (edges[i + 1] - edges[i]);
        GroupPoint g{m.space, {}, 0.0};
        double norm2 = 0.0;
        for (int j = 0; j < dimn; ++j) {
            g.x[j] = rng.normal();
            norm2 += g.x[j] * g.x[j];
        }
        double nn = std::sqrt(std::max(norm2, 1e-300));
        for (int j = 0; j < dimn; ++j) g.x[j] *= r / nn;
        out.points.push_back(g);
        out.d.push_back(r);
    }
    out.acceptance_rate = 1.0;
    out.ess = static_cast<double>(n);
    return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InputError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return {d, std::clamp(p, 0.0, 1.0)};
}

void write_csv(const SampleSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DiagnosticError("write_csv: cannot open " + path);
    out << "# seed=" << s.seed << " spec=" << s.spec_hash << " acceptance=" << s.acceptance_rate
        << " ess=" << s.ess << "\n";
    for (int i = 0; i < s.space.horizontal_dim(); ++i) out << "x" << (i + 1) << ",";
    out << "z\n";
    char buf[64];
    for (const auto& g : s.points) {
        for (int i = 0; i < s.space.horizontal_dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,", g.x[i]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", g.z);
        out << buf;
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ubl
