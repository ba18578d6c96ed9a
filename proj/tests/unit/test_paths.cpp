#include "doctest.h"

#include <cmath>
#include <vector>

#include "mnx/model.hpp"
#include "mnx/paths.hpp"

using namespace mnx;

TEST_CASE("build_grid arithmetic and preconditions") {
    const TimeGrid g = build_grid(4, 2);
    CHECK(g.fine_step == 0.125);
    const auto ct = g.coarse_times();
    REQUIRE(ct.size() == 5);
    CHECK(ct[0] == 0.0);
    CHECK(ct[1] == 0.25);
    CHECK(ct[4] == 1.0);

    const TimeGrid g2 = build_grid(2, 1);
    CHECK(g2.fine_step == 0.5);

    CHECK_THROWS_AS(build_grid(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4, 0), std::invalid_argument);
}

TEST_CASE("brownian path starts at zero, is deterministic, prefix-consistent") {
    const TimeGrid g = build_grid(4, 8);
    const RngStream s(11, 5);
    const BrownianPath p = sample_brownian(g, s);
    const BrownianPath q = sample_brownian(g, RngStream(11, 5));
    CHECK(p.cumulative[0] == 0.0);
    REQUIRE(p.cumulative.size() == 33);
    for (std::size_t k = 0; k < p.fine_increments.size(); ++k) {
        CHECK(p.cumulative[k + 1] - p.cumulative[k] == p.fine_increments[k]);
        CHECK(p.fine_increments[k] == q.fine_increments[k]);
    }
}

TEST_CASE("var of w(1) is 1 over replications") {
    const TimeGrid g = build_grid(4, 2);
    const int N = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
        const BrownianPath p = sample_brownian(g, RngStream(2024, i));
        const double w1 = p.cumulative.back();
        sum += w1;
        sumsq += w1 * w1;
    }
    const double mean = sum / N;
    const double var = sumsq / N - mean * mean;
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / N));
}

TEST_CASE("refinement consistency: doubling R refines instead of resampling") {
    const RngStream s(77, 3);
    SUBCASE("power-of-two R shares all common fine nodes") {
        const TimeGrid g1 = build_grid(4, 4);
        const TimeGrid g2 = build_grid(4, 8);
        const BrownianPath p1 = sample_brownian(g1, s);
        const BrownianPath p2 = sample_brownian(g2, s);
        for (std::size_t k = 0; k < p1.cumulative.size(); ++k)
            CHECK(p1.cumulative[k] == p2.cumulative[2 * k]);
    }
    SUBCASE("odd refinement factors still share coarse increments") {
        const TimeGrid g1 = build_grid(4, 3);
        const TimeGrid g2 = build_grid(4, 6);
        const BrownianPath p1 = sample_brownian(g1, s);
        const BrownianPath p2 = sample_brownian(g2, s);
        for (int j = 0; j < 4; ++j)
            CHECK(p1.coarse_increment(g1, j) == p2.coarse_increment(g2, j));
    }
    SUBCASE("fine increments have the nominal variance") {
        const TimeGrid g = build_grid(2, 16);
        const int N = 20000;
        double sumsq = 0.0;
        int count = 0;
        for (int i = 0; i < N; ++i) {
            const BrownianPath p = sample_brownian(g, RngStream(5, i));
            for (double d : p.fine_increments) {
                sumsq += d * d;
                ++count;
            }
        }
        const double var = sumsq / count;
        CHECK(std::abs(var - g.fine_step) < 4.0 * g.fine_step * std::sqrt(2.0 / count));
    }
}

TEST_CASE("euler scheme is exact for additive constants and frozen dynamics") {
    const TimeGrid g = build_grid(4, 8);
    const RngStream s(3, 9);
    const BrownianPath p = sample_brownian(g, s);

    const ModelSpec add = make_preset("wiener-const");
    const DiffusionPath d = euler_maruyama(add, p, g, s);
    for (std::size_t k = 0; k < d.x_values.size(); ++k)
        CHECK(std::abs(d.x_values[k] - p.cumulative[k]) <=
              1e-14 * (1.0 + std::abs(p.cumulative[k])));
    for (int j = 0; j < g.n; ++j)
        CHECK(d.frozen_coarse[j] == d.x_values[g.coarse_to_fine(j)]);

    const ModelSpec frozen = make_preset("gbm", {.theta = 0.0, .x0 = 1.0});
    const DiffusionPath df = euler_maruyama(frozen, p, g, s);
    for (double x : df.x_values) CHECK(x == 1.0);
}

TEST_CASE("euler strong error vs the gbm closed form shrinks at rate about 1/2") {
    const ModelSpec gbm = make_preset("gbm", {.theta = 0.5, .x0 = 1.0});
    const int n = 4;
    const int paths = 60;
    std::vector<double> rms;
    for (int R : {8, 32, 128}) {
        const TimeGrid g = build_grid(n, R);
        double total = 0.0;
        for (int i = 0; i < paths; ++i) {
            const RngStream s(314, i);
            const BrownianPath p = sample_brownian(g, s);
            const DiffusionPath d = euler_maruyama(gbm, p, g, s);
            double worst = 0.0;
            for (int k = 0; k <= g.fine_count(); ++k) {
                const double t = k * g.fine_step;
                const double exact =
                    std::exp(0.5 * p.cumulative[k] - 0.125 * t);
                worst = std::max(worst, std::abs(d.x_values[k] - exact));
            }
            total += worst * worst;
        }
        rms.push_back(std::sqrt(total / paths));
    }
    // Quadrupling R should roughly halve the strong error (rate ~ 0.5).
    const double rate1 = std::log2(rms[0] / rms[1]) / 2.0;
    const double rate2 = std::log2(rms[1] / rms[2]) / 2.0;
    CHECK(rate1 > 0.3);
    CHECK(rate1 < 0.8);
    CHECK(rate2 > 0.3);
    CHECK(rate2 < 0.8);
}

TEST_CASE("euler aborts on non-finite state with the step index") {
    ModelSpec m = make_preset("wiener-const");
    m.drift = [](double x) { return 1e200 * (1.0 + x * x); };
    const TimeGrid g = build_grid(2, 8);
    const RngStream s(1, 0);
    const BrownianPath p = sample_brownian(g, s);
    CHECK_THROWS_AS(euler_maruyama(m, p, g, s), SimulationAbort);
}

TEST_CASE("iterated integrals: closed forms and plug-ins") {
    const TimeGrid g = build_grid(4, 1);
    BrownianPath p;
    p.cumulative = {0.0, 0.3, 0.3, 0.3, 0.3};
    p.fine_increments = {0.3, 0.0, 0.0, 0.0};
    p.coarse_draws = p.fine_increments;

    const auto ii = iterated_integrals(p, g, 0);
    CHECK(ii.I11 == doctest::Approx(-0.08).epsilon(1e-12));
    CHECK(ii.I111 == doctest::Approx((0.027 - 0.225) / 6.0).epsilon(1e-12));

    const auto zero = iterated_integrals(p, g, 1); // dw = 0
    CHECK(zero.I11 == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(zero.I111 == 0.0);

    CHECK_THROWS_AS(iterated_integrals(p, g, 7), std::invalid_argument);
}

TEST_CASE("iterated-integral identity 2 I11 + dt = dw^2 on random paths") {
    const TimeGrid g = build_grid(8, 4);
    for (int i = 0; i < 1000; ++i) {
        const BrownianPath p = sample_brownian(g, RngStream(99, i));
        for (int j = 0; j < g.n; ++j) {
            const double dw = p.coarse_increment(g, j);
            const double lhs = 2.0 * iterated_integrals(p, g, j).I11 + g.coarse_dt();
            CHECK(std::abs(lhs - dw * dw) <= 1e-12 * (1.0 + dw * dw));
        }
    }
}

TEST_CASE("fine-grid Riemann-Ito sums converge to the closed iterated integrals") {
    // Test-only oracle: left Riemann-Ito sums on the fine grid approach the
    // algebraic forms as R grows.
    const int n = 2;
    const int paths = 200;
    std::vector<double> rms11, rms111;
    for (int R : {64, 256}) {
        const TimeGrid g = build_grid(n, R);
        double t11 = 0.0, t111 = 0.0;
        for (int i = 0; i < paths; ++i) {
            const BrownianPath p = sample_brownian(g, RngStream(1234, i));
            for (int j = 0; j < n; ++j) {
                const int lo = g.coarse_to_fine(j);
                double s1 = 0.0, s2 = 0.0, s3 = 0.0;
                for (int k = lo; k < lo + R; ++k) {
                    const double dw = p.fine_increments[k];
                    s3 += s2 * dw;
                    s2 += s1 * dw;
                    s1 += dw;
                }
                const auto ii = iterated_integrals(p, g, j);
                t11 += (s2 - ii.I11) * (s2 - ii.I11);
                t111 += (s3 - ii.I111) * (s3 - ii.I111);
            }
        }
        rms11.push_back(std::sqrt(t11 / (paths * n)));
        rms111.push_back(std::sqrt(t111 / (paths * n)));
    }
    CHECK(rms11[1] < rms11[0] / 1.5);
    CHECK(rms111[1] < rms111[0] / 1.5);
    CHECK(rms11[1] < 0.05);
}

TEST_CASE("block pair has the exact joint covariance and couples to the path") {
    const TimeGrid g = build_grid(4, 2);
    const double dt = 0.25;
    const int N = 100000;
    double s_dw = 0.0, s_J = 0.0, s_dw2 = 0.0, s_J2 = 0.0, s_dwJ = 0.0;
    for (int i = 0; i < N; ++i) {
        const RngStream s(55, i);
        const BlockGaussians b = sample_block_pair(g, s);
        s_dw += b.dw[1];
        s_J += b.J[1];
        s_dw2 += b.dw[1] * b.dw[1];
        s_J2 += b.J[1] * b.J[1];
        s_dwJ += b.dw[1] * b.J[1];
    }
    const double var_dw = s_dw2 / N;
    const double var_J = s_J2 / N;
    const double cov = s_dwJ / N;
    CHECK(std::abs(s_J / N) < 3.0 * std::sqrt(var_J / N));
    CHECK(std::abs(var_dw - dt) < 3.0 * dt * std::sqrt(2.0 / N));
    CHECK(std::abs(var_J - dt * dt * dt / 3.0) <
          3.0 * (dt * dt * dt / 3.0) * std::sqrt(2.0 / N));
    CHECK(std::abs(cov - dt * dt / 2.0) < 3.0 * (dt * dt / 2.0) * std::sqrt(3.0 / N));
    // correlation sqrt(3)/2 for any dt
    CHECK(cov / std::sqrt(var_dw * var_J) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(0.02));

    // Coupled mode: same stream as a path reproduces its coarse increments.
    const RngStream s(55, 7);
    const BrownianPath p = sample_brownian(g, s);
    const BlockGaussians b = sample_block_pair(g, s);
    for (int j = 0; j < g.n; ++j) CHECK(b.dw[j] == p.coarse_increment(g, j));
}

TEST_CASE("initial condition samplers map uniforms into their support") {
    const Initial ic = Initial::sampled([](double u) { return -1.0 + 2.0 * u; }, -1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double v = draw_initial(ic, RngStream(8, i));
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    const Initial pm = Initial::point(3.5);
    CHECK(draw_initial(pm, RngStream(8, 0)) == 3.5);
}
