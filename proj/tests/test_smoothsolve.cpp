#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "toric/builders.hpp"
#include "toric/smoothsolve.hpp"

using namespace toric;

namespace {

QVec qv(std::initializer_list<long> xs) {
    QVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

SubtorusData exm4_data() {
    // (t0^2 : 1/4 t0 t1 : 1/2 t1^2)
    SubtorusData d;
    d.exponents = {qv({1}), qv({2})};
    d.coords = {Rat(1), Rat(1, 4), Rat(1, 2)};
    return d;
}

SubtorusData quadric_data() {
    SubtorusData d;
    d.exponents = {qv({1, 0}), qv({0, 1}), qv({1, 1})};
    d.coords = {Rat(1), Rat(2), Rat(4), Rat(1)};
    return d;
}

}  // namespace

TEST_CASE("smooth metric value and gradient") {
    SmoothMetricData fs;
    fs.points = {qv({0}), qv({1})};
    fs.weights = {Rat(1), Rat(1)};
    CHECK(std::abs(fs_psi(fs, {0.0}) + 0.5 * std::log(2.0)) < 1e-14);
    CHECK(std::abs(fs_grad(fs, {0.0})[0] - 0.5) < 1e-14);

    // Along u -> +infinity the slope approaches the dominating point m = 0.
    CHECK(std::abs(fs_grad(fs, {40.0})[0]) < 1e-12);
    CHECK(std::abs(fs_grad(fs, {-40.0})[0] - 1.0) < 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> up(-2.0, 2.0);
    std::uniform_int_distribution<int> wnum(1, 9);
    for (int trial = 0; trial < 30; ++trial) {
        SmoothMetricData data;
        data.points = {qv({0, 0}), qv({1, 0}), qv({0, 1}), qv({2, 1})};
        for (int j = 0; j < 4; ++j) data.weights.emplace_back(wnum(rng), 4);
        data.lambda = Rat(1 + trial % 3);
        std::vector<double> u = {up(rng), up(rng)};
        auto grad = fs_grad(data, u);
        const double h = 1e-6;
        for (int c = 0; c < 2; ++c) {
            auto lo = u, hi = u;
            lo[c] -= h;
            hi[c] += h;
            double fd = (fs_psi(data, hi) - fs_psi(data, lo)) / (2 * h);
            CHECK(std::abs(fd - grad[c]) < 1e-8);
        }
    }
}

TEST_CASE("quadric curve: mu_ess = (1/2) log 17 at u0 = (1/2) log 2") {
    SubtorusResult res = subtorus_fs(exm4_data());
    SmoothSolveResult sol = solve_smooth(res.spec);
    CHECK(std::abs(sol.mu_ess - 0.5 * std::log(17.0)) < 1e-8);
    REQUIRE(sol.u0.size() == 1);
    CHECK(std::abs(sol.u0[0] - 0.5 * std::log(2.0)) < 1e-8);
    CHECK(sol.optimality_residual <= 1e-10);
}

TEST_CASE("quadric surface: mu_ess = log(3 sqrt 2)") {
    SubtorusResult res = subtorus_fs(quadric_data());
    SmoothSolveResult sol = solve_smooth(res.spec);
    CHECK(std::abs(sol.mu_ess - std::log(3.0 * std::sqrt(2.0))) < 1e-8);
    REQUIRE(sol.u0.size() == 2);
    CHECK(std::abs(sol.u0[0] - 0.5 * std::log(2.0)) < 1e-8);
    CHECK(std::abs(sol.u0[1] + 0.5 * std::log(2.0)) < 1e-8);
}

TEST_CASE("all finite places canonical: Fubini-Study on P^1") {
    SubtorusData d;
    d.exponents = {qv({1})};
    d.coords = {Rat(1), Rat(1)};
    SubtorusResult res = subtorus_fs(d);
    SmoothSolveResult sol = solve_smooth(res.spec);
    CHECK(std::abs(sol.mu_ess - 0.5 * std::log(2.0)) < 1e-10);
    CHECK(std::abs(sol.u0[0]) < 1e-8);
}

TEST_CASE("objective is concave along random segments") {
    SubtorusResult res = subtorus_fs(quadric_data());
    auto smooth = smooth_entry(res.spec);
    RoofFn theta_s = finite_part_roof(res.spec);
    auto g = [&](const std::vector<double>& u) {
        double best = 1e300;
        for (const auto& [x, t] : theta_s.generators()) {
            double dotv = 0;
            for (std::size_t c = 0; c < u.size(); ++c) dotv += rat_double(x[c]) * u[c];
            best = std::min(best, dotv - t.approx());
        }
        return best + fs_psi(smooth->second, {-u[0], -u[1]});
    };
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a = {up(rng), up(rng)}, b = {up(rng), up(rng)};
        std::vector<double> mid = {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
        CHECK(g(mid) >= 0.5 * (g(a) + g(b)) - 1e-12);
    }
}

TEST_CASE("invariance under unimodular reparametrization of the lattice") {
    // Apply T in GL_2(Z) to the exponent vectors; mu_ess is intrinsic.
    SubtorusResult base = subtorus_fs(quadric_data());
    double mu0 = solve_smooth(base.spec).mu_ess;
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> small(-2, 2);
    int done = 0;
    while (done < 5) {
        long a = small(rng), b = small(rng), c = small(rng), d = small(rng);
        if (a * d - b * c != 1 && a * d - b * c != -1) continue;
        SubtorusData data = quadric_data();
        for (auto& m : data.exponents) {
            QVec t(2);
            t[0] = Rat(a) * m[0] + Rat(b) * m[1];
            t[1] = Rat(c) * m[0] + Rat(d) * m[1];
            m = t;
        }
        SubtorusResult res = subtorus_fs(data);
        double mu = solve_smooth(res.spec).mu_ess;
        CHECK(std::abs(mu - mu0) < 1e-9);
        ++done;
    }
}

TEST_CASE("builder closed forms agree with the numeric solver") {
    // The essential minimum of an lp-metric spec equals the closed form; the
    // solver provides the independent numeric route.
    {
        BundleResult res = hirzebruch(1, 1);
        SmoothSolveResult sol = solve_smooth(res.spec);
        CHECK(std::abs(sol.mu_ess - res.minima_closed[0].approx()) < 1e-9);
    }
    {
        BundleResult res = toric_bundle(2, {1, 2});
        SmoothSolveResult sol = solve_smooth(res.spec);
        CHECK(std::abs(sol.mu_ess - res.minima_closed[0].approx()) < 1e-9);
    }
    {
        Polytope sq = Polytope::hull(2, {qv({0, 0}), qv({1, 0}), qv({0, 1}), qv({1, 1})});
        std::map<QVec, Rat, decltype(&lex_less)> alpha(&lex_less);
        for (const auto& m : sq.lattice_points()) alpha[m] = 1;
        LpResult res = lp_metric(sq, Rat(2), alpha);
        SmoothSolveResult sol = solve_smooth(res.spec);
        CHECK(std::abs(sol.mu_ess - res.minima[0].approx()) < 1e-9);
    }
}

TEST_CASE("secant approximation of the smooth metric converges from the exact path") {
    // Replace the Archimedean roof of the quadric curve by its secants on a
    // grid of step 1/100 and run the exact machinery; the value approaches
    // the numeric solution from above (secants of a concave roof overshoot
    // the sup-convolution bound at the kinks but underestimate the roof).
    SubtorusResult res = subtorus_fs(exm4_data());
    SmoothSolveResult sol = solve_smooth(res.spec);
    auto smooth = smooth_entry(res.spec);

    // theta_inf(x) = inf_u (x u - psi_inf(u)) by bisection on psi_inf' = x.
    auto theta_inf = [&](double x) {
        double lo = -60, hi = 60;
        for (int it = 0; it < 200; ++it) {
            double mid = (lo + hi) / 2;
            (fs_grad(smooth->second, {mid})[0] > x ? lo : hi) = mid;
        }
        double u = (lo + hi) / 2;
        return x * u - fs_psi(smooth->second, {u});
    };

    const long grid = 100;
    std::vector<std::pair<QVec, LogValue>> gens;
    for (long k = 0; k <= 2 * grid; ++k) {
        Rat x(k, grid);
        gens.emplace_back(QVec{x}, LogValue(Rat(theta_inf(rat_double(x)))));
    }
    DivisorSpec secant;
    secant.rank = 1;
    secant.delta = res.spec.delta;
    secant.semipositive = true;
    secant.ample = true;
    secant.places.push_back({Place::infinite(), Rat(1), RoofFn(secant.delta, gens)});
    for (const auto& e : res.spec.places)
        if (!e.place.archimedean) secant.places.push_back(e);

    double exact_path = essential_minimum(secant).approx();
    CHECK(exact_path <= sol.mu_ess + 1e-9);
    CHECK(std::abs(exact_path - sol.mu_ess) < 1e-4);
}
