#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roughwave/diagnostics.hpp"
#include "roughwave/initial_data.hpp"
#include "roughwave/solver.hpp"

using namespace roughwave;

namespace {

CellField random_field(const Grid& g, RngState& rng) {
    std::vector<double> v(g.n_cells());
    for (double& x : v) x = rng.standard_normal();
    return CellField(g, std::move(v));
}

// Direct scans used as oracles.
double tv_oracle(const CellField& v) {
    long double s = 0;
    for (std::size_t i = 1; i < v.size(); ++i) s += std::fabs(static_cast<long double>(v[i]) - v[i - 1]);
    return static_cast<double>(s);
}

double lip_oracle(const CellField& v) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) best = std::max(best, (v[i + 1] - v[i]) / v.grid().dx());
    return best;
}

SchemeConfig burgers_godunov(double t_final) {
    SchemeConfig c;
    c.flux = {Equation::Burgers};
    c.numflux = {NumericalFluxKind::Godunov, std::nullopt};
    c.t_final = t_final;
    return c;
}

}  // namespace

TEST_CASE("total variation") {
    const Grid g3 = make_grid(0, 1, 3);
    CHECK(total_variation(CellField(g3, {2, 2, 2})) == 0.0);
    CHECK(total_variation(CellField(g3, {0, 1, 0})) == 2.0);
    CHECK(total_variation(CellField(g3, {0, 1, 3}), Boundary::Periodic) == 6.0);
    CHECK(total_variation(CellField(make_grid(0, 1, 1), {5})) == 0.0);

    RngState rng(8);
    const CellField v = random_field(make_grid(0, 1, 1000), rng);
    CHECK(total_variation(v) == doctest::Approx(tv_oracle(v)).epsilon(1e-12));
}

TEST_CASE("lip_plus") {
    CHECK(lip_plus(CellField(make_grid(0, 0.5, 2), {0, 0.5})) == 2.0);
    CHECK(lip_plus(CellField(make_grid(0, 1, 4), {3, 2, 2, -1})) <= 0.0);
    CHECK(lip_plus(CellField(make_grid(0, 1, 4), {3, 2, 2, -1})) == 0.0);
    CHECK(lip_plus(CellField(make_grid(0, 1, 2), {1, 0})) == -2.0);
    CHECK(lip_plus(CellField(make_grid(0, 1, 2), {1, 0}), Boundary::Periodic) == 2.0);
    CHECK_THROWS_AS(lip_plus(CellField(make_grid(0, 1, 1), {1})), std::invalid_argument);

    RngState rng(9);
    for (int i = 0; i < 20; ++i) {
        const CellField v = random_field(make_grid(-1, 1, 257), rng);
        CHECK(lip_plus(v) == lip_oracle(v));
    }
}

TEST_CASE("TV bounds the positive part of Lip+") {
    RngState rng(10);
    for (int i = 0; i < 50; ++i) {
        const CellField v = random_field(make_grid(0, 1, 64), rng);
        CHECK(total_variation(v) >= v.grid().dx() * std::max(0.0, lip_plus(v)));
    }
}

TEST_CASE("l1_distance") {
    const Grid g1 = make_grid(0, 1, 1);
    const Grid g2 = make_grid(0, 1, 2);
    CHECK(l1_distance(CellField(g1, {0}), CellField(g2, {1, 3})) == 2.0);
    const CellField a(g2, {1, -1});
    CHECK(l1_distance(a, a) == 0.0);
    CHECK_THROWS_AS(l1_distance(CellField(g2, {0, 0}), CellField(g1, {0})), std::invalid_argument);
    CHECK_THROWS_AS(l1_distance(CellField(g2, {0, 0}), CellField(make_grid(0, 2, 4), {0, 0, 0, 0})),
                    std::invalid_argument);
}

TEST_CASE("l1_distance between projections of a smooth function is O(dx)") {
    auto f = [](double x) { return std::sin(2 * M_PI * x); };
    const CellField fine = project(f, make_grid(0, 1, 1024), 16);
    for (std::size_t n : {16u, 32u, 64u}) {
        const CellField coarse = project(f, make_grid(0, 1, n), 16);
        // Oracle: dense midpoint quadrature of |coarse - f| (restriction of fine ~ f to O(dx_fine)).
        const double h = 1.0 / (n * 256.0);
        double dense = 0.0;
        for (std::size_t q = 0; q < n * 256; ++q) {
            const double x = (q + 0.5) * h;
            dense += std::abs(coarse[q / 256] - f(x)) * h;
        }
        const double d = l1_distance(coarse, fine);
        CHECK(d <= dense + 1e-4);
        CHECK(d <= 2.0 / n);
    }
}

TEST_CASE("l1_distance is a metric") {
    RngState rng(11);
    const Grid g = make_grid(0, 1, 32);
    for (int i = 0; i < 50; ++i) {
        const CellField a = random_field(g, rng);
        const CellField b = random_field(g, rng);
        const CellField c = random_field(g, rng);
        CHECK(l1_distance(a, b) == doctest::Approx(l1_distance(b, a)).epsilon(1e-15));
        CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
        CHECK(l1_distance(a, b) >= 0.0);
    }
}

TEST_CASE("tv_time_integral") {
    const Grid g = make_grid(0, 1, 4);
    Trajectory t{g, Boundary::Outflow, {0.0, 0.1}, {}, {2.0, 2.0}, {}, 0.1, CellField(g)};
    CHECK(tv_time_integral(t) == doctest::Approx(0.4));

    const Trajectory c = evolve(CellField(g, {1, 1, 1, 1}), burgers_godunov(1.0));
    CHECK(tv_time_integral(c) == 0.0);

    // Recompute from snapshots stored at every step.
    const CellField v0 = fbm_initial_field(0.5, make_grid(0, 1, 128), 21);
    const Trajectory r = evolve(v0, burgers_godunov(0.37), {{}, true});
    REQUIRE(r.snapshots.size() == r.times.size());
    double oracle = 0.0;
    for (std::size_t n = 0; n < r.snapshots.size(); ++n) {
        const double w = n == 0 ? r.dt_used : r.times[n] - r.times[n - 1];
        oracle += total_variation(r.snapshots[n].field) * w;
    }
    CHECK(tv_time_integral(r) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("lip_bound_rhs") {
    BoundInputs b;
    b.lip_plus_0 = 10;
    b.dt = 0.01;
    b.t_N = 1;
    b.beta = 0.125;
    b.M = 0.5;
    CHECK(lip_bound_rhs(b) == doctest::Approx(0.1 + 8 * std::log(2.25)));
    CHECK(lip_bound_rhs(b) == doctest::Approx(6.5875).epsilon(1e-4));

    BoundInputs zero = b;
    zero.t_N = 0;
    zero.dt = 0;
    CHECK(lip_bound_rhs(zero) == 0.0);

    double prev = 0.0;
    for (double t = 0; t <= 4; t += 0.25) {
        BoundInputs m = b;
        m.t_N = t;
        CHECK(lip_bound_rhs(m) >= prev);
        prev = lip_bound_rhs(m);
    }

    BoundInputs bad = b;
    bad.lip_plus_0 = 0;
    CHECK_THROWS_AS(lip_bound_rhs(bad), std::domain_error);
    bad = b;
    bad.beta = 0;
    CHECK_THROWS_AS(lip_bound_rhs(bad), std::domain_error);
}

TEST_CASE("sharpness_ratio") {
    const Grid g = make_grid(0, 1, 4);
    BoundInputs b;
    b.lip_plus_0 = 1;
    b.dt = 0.1;
    b.t_N = 1;
    const Trajectory c = evolve(CellField(g, {1, 1, 1, 1}), burgers_godunov(1.0));
    CHECK_THROWS_AS(sharpness_ratio(c, b), std::domain_error);

    Trajectory t{g, Boundary::Outflow, {0.0, 0.1}, {}, {2.0, 2.0}, {}, 0.1, CellField(g)};
    CHECK(sharpness_ratio(t, b) == doctest::Approx(lip_bound_rhs(b) / 0.4));
}

TEST_CASE("default_beta") {
    CHECK(default_beta({Equation::Burgers}, NumericalFluxKind::Godunov) == 0.125);
    CHECK_THROWS(default_beta({Equation::Burgers}, NumericalFluxKind::Rusanov));
    CHECK_THROWS(default_beta({Equation::Cubic}, NumericalFluxKind::Godunov));
}

TEST_CASE("kuznetsov_bound") {
    BoundInputs b;
    b.tv0 = 0;
    b.dt = 0.01;
    b.dx = 0.01;
    CHECK(kuznetsov_bound(b, 0, 0) == 0.0);

    BoundInputs one;
    one.tv0 = 1;
    one.eps = 1;
    one.eps0 = 1;
    one.C = 1;
    one.C_F = 1;
    one.lip_f = 1;
    one.dt = 1;
    one.dx = 1;
    CHECK(kuznetsov_bound(one, 1, 1) == doctest::Approx(9.0));

    BoundInputs bad = one;
    bad.eps = 0;
    CHECK_THROWS(kuznetsov_bound(bad, 1, 1));
    bad = one;
    bad.eps0 = -1;
    CHECK_THROWS(kuznetsov_bound(bad, 1, 1));

    RngState rng(12);
    for (int i = 0; i < 200; ++i) {
        BoundInputs r;
        r.tv0 = rng.next_uniform();
        r.dt = rng.next_uniform() * 0.1;
        r.dx = rng.next_uniform() * 0.1;
        r.eps = rng.next_uniform();
        r.eps0 = rng.next_uniform();
        const double tvi = rng.next_uniform();
        const double e0 = rng.next_uniform();
        const double base = kuznetsov_bound(r, tvi, e0);
        const double d = 0.1 * rng.next_uniform();
        BoundInputs up = r;
        up.tv0 += d;
        CHECK(kuznetsov_bound(up, tvi, e0) >= base);
        CHECK(kuznetsov_bound(r, tvi + d, e0) >= base);
        CHECK(kuznetsov_bound(r, tvi, e0 + d) >= base);
    }
}

TEST_CASE("kuznetsov bound balance with eps = eps0 = sqrt(dx)") {
    const double alpha = 0.5;
    std::vector<std::pair<double, double>> pts;
    for (int k = 8; k <= 16; ++k) {
        const double dx = std::ldexp(1.0, -k);
        BoundInputs b;
        b.dx = dx;
        b.dt = 0.5 * dx;
        b.eps = std::sqrt(dx);
        b.eps0 = std::sqrt(dx);
        b.tv0 = std::pow(dx, alpha - 1);
        pts.emplace_back(dx, kuznetsov_bound(b, b.tv0, 0.0));
    }
    CHECK(fit_rate(pts).slope == doctest::Approx(alpha - 0.5).epsilon(0.02));
}

TEST_CASE("fit_rate") {
    std::vector<std::pair<double, double>> exact;
    std::vector<std::pair<double, double>> root;
    for (int k = 2; k <= 8; ++k) {
        const double h = std::ldexp(1.0, -k);
        exact.emplace_back(h, h);
        root.emplace_back(h, 3 * std::sqrt(h));
    }
    CHECK(fit_rate(exact).slope == doctest::Approx(1.0));
    CHECK(fit_rate(root).slope == doctest::Approx(0.5));
    CHECK(fit_rate(root).intercept == doctest::Approx(std::log(3.0)));

    RngState rng(13);
    std::vector<std::pair<double, double>> noisy;
    for (int k = 3; k <= 12; ++k) {
        const double h = std::ldexp(1.0, -k);
        noisy.emplace_back(h, std::pow(h, 0.7) * (1 + 0.02 * (rng.next_uniform() - 0.5)));
    }
    const double s = fit_rate(noisy).slope;
    CHECK(s > 0.65);
    CHECK(s < 0.75);

    // Scale invariance in e.
    auto scaled = noisy;
    for (auto& p : scaled) p.second *= 17.0;
    CHECK(fit_rate(scaled).slope == doctest::Approx(s).epsilon(1e-12));
    CHECK(fit_rate(scaled).intercept == doctest::Approx(fit_rate(noisy).intercept + std::log(17.0)));

    const std::vector<std::pair<double, double>> one = {{0.5, 1.0}};
    CHECK_THROWS_AS(fit_rate(one), std::invalid_argument);
    const std::vector<std::pair<double, double>> same = {{0.5, 1.0}, {0.5, 2.0}};
    CHECK_THROWS_AS(fit_rate(same), std::invalid_argument);
    const std::vector<std::pair<double, double>> neg = {{0.5, 1.0}, {0.25, -2.0}};
    CHECK_THROWS_AS(fit_rate(neg), std::invalid_argument);
}

TEST_CASE("fit_linear") {
    const std::vector<double> x = {0, 1, 2, 3};
    const std::vector<double> y = {1, 3, 5, 7};
    const LinearFit f = fit_linear(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));

    const std::vector<double> flat = {4, 4, 4, 4};
    CHECK(fit_linear(x, flat).r_squared == 1.0);

    const std::vector<double> wiggle = {0, 1, 0, 1};
    const LinearFit w = fit_linear(x, wiggle);
    CHECK(w.r_squared >= 0.0);
    CHECK(w.r_squared < 1.0);
}
