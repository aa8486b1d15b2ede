#include "ubl/geometry.hpp"

#include <cmath>

#include "doctest.h"
#include "ubl/common.hpp"

using namespace ubl;

namespace {

GroupPoint h1(double x1, double x2, double z) { return make_point(Space::heisenberg(1), {x1, x2, z}); }

GroupPoint random_point(const Space& s, Rng& rng, double scale = 2.0) {
    GroupPoint g{s, {}, 0.0};
    for (int i = 0; i < s.horizontal_dim(); ++i) g.x[i] = scale * rng.normal();
    if (s.heisenberg_like()) g.z = scale * rng.normal();
    return g;
}

}  // namespace

TEST_CASE("group law on H_1") {
    auto e = GroupPoint::identity(Space::heisenberg(1));
    auto g = h1(0.3, -1.2, 0.7);
    auto eg = group_mul(e, g);
    CHECK(eg.x[0] == g.x[0]);
    CHECK(eg.x[1] == g.x[1]);
    CHECK(eg.z == g.z);

    auto p = group_mul(h1(2.0, 0.0, 0.0), h1(0.0, 3.0, 0.0));
    CHECK(p.x[0] == 2.0);
    CHECK(p.x[1] == 3.0);
    CHECK(p.z == doctest::Approx(3.0));  // xy/2

    auto gg = group_mul(g, group_inverse(g));
    CHECK(gg.x[0] == doctest::Approx(0.0));
    CHECK(gg.z == doctest::Approx(0.0));
}

TEST_CASE("group axioms on random triples") {
    Rng rng(11);
    for (const Space& s : {Space::heisenberg(1), Space::heisenberg(2), Space::euclidean(3)}) {
        for (int it = 0; it < 200; ++it) {
            auto a = random_point(s, rng), b = random_point(s, rng), c = random_point(s, rng);
            auto ab_c = group_mul(group_mul(a, b), c);
            auto a_bc = group_mul(a, group_mul(b, c));
            for (int i = 0; i < s.horizontal_dim(); ++i) CHECK(std::abs(ab_c.x[i] - a_bc.x[i]) < 1e-12);
            CHECK(std::abs(ab_c.z - a_bc.z) < 1e-12);
            auto li = group_mul(group_inverse(a), a);
            CHECK(std::abs(li.z) < 1e-12);
        }
    }
}

TEST_CASE("dilations scale and act as automorphisms") {
    auto g = h1(1.0, 0.0, 1.0);
    auto d1 = dilate(1.0, g);
    CHECK(d1.x[0] == 1.0);
    CHECK(d1.z == 1.0);
    auto d2 = dilate(2.0, g);
    CHECK(d2.x[0] == 2.0);
    CHECK(d2.z == 4.0);
    CHECK_THROWS_AS(dilate(0.0, g), InputError);

    Rng rng(3);
    for (int it = 0; it < 100; ++it) {
        auto a = random_point(Space::heisenberg(1), rng), b = random_point(Space::heisenberg(1), rng);
        double s = std::exp(rng.normal());
        auto lhs = dilate(s, group_mul(a, b));
        auto rhs = group_mul(dilate(s, a), dilate(s, b));
        CHECK(std::abs(lhs.x[0] - rhs.x[0]) < 1e-10);
        CHECK(std::abs(lhs.x[1] - rhs.x[1]) < 1e-10);
        CHECK(std::abs(lhs.z - rhs.z) < 1e-10);
    }
}

TEST_CASE("horizontal gradient of coordinate functions") {
    auto g = h1(0.4, -0.8, 0.2);
    auto grad_x1 = horizontal_gradient([](const GroupPoint& p) { return p.x[0]; }, g, 1e-4);
    CHECK(grad_x1[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(grad_x1[1] == doctest::Approx(0.0).scale(1).epsilon(1e-10));

    auto grad_z = horizontal_gradient([](const GroupPoint& p) { return p.z; }, g, 1e-4);
    CHECK(grad_z[0] == doctest::Approx(0.5 * g.x[1]).epsilon(1e-9));
    CHECK(grad_z[1] == doctest::Approx(-0.5 * g.x[0]).epsilon(1e-9));

    CHECK_THROWS_AS(horizontal_gradient([](const GroupPoint&) { return 0.0; }, g, 0.0), InputError);
}

TEST_CASE("Kohn Laplacian of |x|^2 is 2 * horizontal dim") {
    Rng rng(5);
    for (int it = 0; it < 10; ++it) {
        auto g = random_point(Space::heisenberg(1), rng);
        double lap = kohn_laplacian([](const GroupPoint& p) { return p.xnorm2(); }, g, 1e-3);
        CHECK(lap == doctest::Approx(4.0).epsilon(1e-6));
    }
    auto g2 = random_point(rng.uniform() < 2 ? Space::heisenberg(2) : Space::heisenberg(2), rng);
    double lap2 = kohn_laplacian([](const GroupPoint& p) { return p.xnorm2(); }, g2, 1e-3);
    CHECK(lap2 == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("cc distance: horizontal points, axis value, homogeneity") {
    CHECK(cc_distance(h1(3.0, 4.0, 0.0)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(cc_distance(h1(0.0, 0.0, 1.0)) == doctest::Approx(std::sqrt(4.0 * M_PI)).epsilon(1e-10));
    CHECK(cc_distance(make_point(Space::euclidean(2), {3.0, 4.0})) == doctest::Approx(5.0));

    Rng rng(17);
    for (int it = 0; it < 300; ++it) {
        auto g = random_point(Space::heisenberg(1), rng);
        double s = std::exp(rng.normal());
        CHECK(cc_distance(dilate(s, g)) == doctest::Approx(s * cc_distance(g)).epsilon(1e-10));
        CHECK(cc_distance(group_inverse(g)) == doctest::Approx(cc_distance(g)).epsilon(1e-12));
    }
}

TEST_CASE("cc distance triangle inequality via pair distance") {
    Rng rng(23);
    for (int it = 0; it < 300; ++it) {
        auto a = random_point(Space::heisenberg(1), rng), b = random_point(Space::heisenberg(1), rng),
             c = random_point(Space::heisenberg(1), rng);
        double ab = pair_distance(a, b), bc = pair_distance(b, c), ac = pair_distance(a, c);
        CHECK(ac <= ab + bc + 1e-9);
        CHECK(pair_distance(b, a) == doctest::Approx(ab).epsilon(1e-12));
    }
}

TEST_CASE("H_l distance reduces to H_1 at (|x|, |z|)") {
    Rng rng(29);
    for (int it = 0; it < 50; ++it) {
        auto g = random_point(Space::heisenberg(2), rng);
        CHECK(cc_distance(g) == doctest::Approx(h1_distance(g.xnorm(), g.z)).epsilon(1e-12));
    }
}

TEST_CASE("eikonal property off the axis") {
    Rng rng(31);
    int checked = 0;
    for (int it = 0; it < 200 && checked < 100; ++it) {
        auto g = random_point(Space::heisenberg(1), rng);
        if (g.xnorm() < 0.1) continue;
        ++checked;
        double gn = horizontal_gradient_norm([](const GroupPoint& p) { return cc_distance(p); }, g,
                                             fd_step_first(g));
        CHECK(gn == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(checked == 100);
}

TEST_CASE("Kohn Laplacian of d: bounded on the shell, 1/s homogeneity, negative near axis") {
    ScalarField dist = [](const GroupPoint& p) { return cc_distance(p); };
    Rng rng(37);
    double max_lap = -1e9;
    int kept = 0;
    while (kept < 120) {
        auto g = random_point(Space::heisenberg(1), rng, 1.5);
        double d = cc_distance(g);
        if (d < 1.0 || d > 5.0 || g.xnorm() < 5e-2) continue;
        ++kept;
        double lap = kohn_laplacian(dist, g, fd_step_second(g));
        max_lap = std::max(max_lap, lap);
    }
    CHECK(max_lap < 5.0);
    CHECK(max_lap > 0.0);

    for (int it = 0; it < 20; ++it) {
        auto g = random_point(Space::heisenberg(1), rng, 1.0);
        if (g.xnorm() < 0.3) continue;
        double d = cc_distance(g);
        auto g1 = dilate(1.0 / d, g);  // unit sphere, off axis
        double s = 1.0 + 2.0 * rng.uniform();
        double l1 = kohn_laplacian(dist, g1, 2e-4);
        double ls = kohn_laplacian(dist, dilate(s, g1), 2e-4);
        CHECK(ls == doctest::Approx(l1 / s).epsilon(0.01));
    }

    // just off the center axis the Laplacian is large and negative
    double z0 = 1.0 / (4.0 * M_PI);  // d((0,0,z0)) = 1
    double lap_axis = kohn_laplacian(dist, h1(1e-3, 0.0, z0), 1e-5);
    CHECK(lap_axis < -100.0);
}

TEST_CASE("Kaplan norm: value, homogeneity, equivalence with cc distance") {
    CHECK(kaplan_norm(GroupPoint::identity(Space::heisenberg(1))) == 0.0);
    CHECK(kaplan_norm(h1(0.0, 0.0, 0.25)) == doctest::Approx(1.0));
    Rng rng(41);
    double cmax = 0.0;
    for (int it = 0; it < 1000; ++it) {
        auto g = random_point(Space::heisenberg(1), rng);
        double s = std::exp(rng.normal());
        CHECK(kaplan_norm(dilate(s, g)) == doctest::Approx(s * kaplan_norm(g)).epsilon(1e-12));
        double ratio = kaplan_norm(g) / cc_distance(g);
        cmax = std::max(cmax, std::max(ratio, 1.0 / ratio));
    }
    CHECK(cmax < 2.0);
}

TEST_CASE("gradient vanishing scan: Kaplan norm vanishes on the axis, cc norm does not") {
    auto res = gradient_vanishing_scan(HomogeneousNormKind::Kaplan, Space::heisenberg(1), 64);
    CHECK(res.grad_norm < 1e-6);
    CHECK(res.point.xnorm() < M_PI / 8.0);  // within one grid step of the axis

    auto g = h1(1.0, 0.0, 0.0);
    double gk = horizontal_gradient_norm([](const GroupPoint& p) { return kaplan_norm(p); }, g, 1e-6);
    CHECK(gk == doctest::Approx(1.0).epsilon(1e-6));
    double gc = horizontal_gradient_norm([](const GroupPoint& p) { return cc_distance(p); }, g, 1e-4);
    CHECK(gc == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("quadratic remainder at the Kaplan gradient zero") {
    // |phi(x) - phi(x0)| = O(d(x, x0)^2) at x0 = (0,0,1/4); log-log slope >= 1.9
    auto x0 = h1(0.0, 0.0, 0.25);
    Rng rng(43);
    std::vector<double> logr, logdev;
    for (double r = 0.02; r < 0.4; r *= 2.0) {
        double dev = 0.0;
        for (int k = 0; k < 60; ++k) {
            auto u = random_point(Space::heisenberg(1), rng);
            u = dilate(r / cc_distance(u), u);
            dev = std::max(dev, std::abs(kaplan_norm(group_mul(x0, u)) - 1.0));
        }
        logr.push_back(std::log(r));
        logdev.push_back(std::log(dev));
    }
    double n = static_cast<double>(logr.size());
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logr.size(); ++i) {
        mx += logr[i];
        my += logdev[i];
    }
    mx /= n;
    my /= n;
    for (std::size_t i = 0; i < logr.size(); ++i) {
        sxx += (logr[i] - mx) * (logr[i] - mx);
        sxy += (logr[i] - mx) * (logdev[i] - my);
    }
    CHECK(sxy / sxx >= 1.9);
}

TEST_CASE("trajectory oracle validates the closed form") {
    OracleOptions fast;
    fast.restarts = 4;

    auto horiz = cc_distance_oracle(h1(1.0, 0.0, 0.0), 16, fast);
    CHECK(horiz.length == doctest::Approx(1.0).epsilon(1e-3));

    auto axis = cc_distance_oracle(h1(0.0, 0.0, 1.0), 32, fast);
    CHECK(axis.length == doctest::Approx(std::sqrt(4.0 * M_PI)).epsilon(3e-3));

    auto gen = h1(0.6, -0.4, 0.3);
    auto r = cc_distance_oracle(gen, 32, fast);
    CHECK(r.length == doctest::Approx(cc_distance(gen)).epsilon(3e-3));
    CHECK(r.residual < 1e-6);

    // z -> -z symmetry
    auto rp = cc_distance_oracle(h1(0.5, 0.2, 0.4), 16, fast);
    auto rm = cc_distance_oracle(h1(0.5, 0.2, -0.4), 16, fast);
    CHECK(rp.length == doctest::Approx(rm.length).epsilon(2e-3));

    CHECK_THROWS_AS(cc_distance_oracle(h1(1, 0, 0), 4, fast), InputError);
}

TEST_CASE("oracle length is monotone under refinement up to solver noise") {
    OracleOptions fast;
    fast.restarts = 3;
    auto g = h1(0.0, 0.0, 0.5);
    auto r16 = cc_distance_oracle(g, 16, fast);
    auto r32 = cc_distance_oracle(g, 32, fast);
    CHECK(r32.length <= r16.length + 5e-3);
}
