#include "doctest.h"

#include <cmath>

#include "mnx/model.hpp"

using namespace mnx;

namespace {

Handle c(double v) {
    return [v](double) { return v; };
}

ModelSpec bare_spec() {
    ModelSpec m;
    m.drift = c(0.0);
    m.drift_d1 = c(0.0);
    m.drift_d2 = c(0.0);
    m.diffusion = c(1.0);
    m.diffusion_d1 = c(0.0);
    m.diffusion_d2 = c(0.0);
    m.kernel = c(1.0);
    m.kernel_d1 = c(0.0);
    m.kernel_d2 = c(0.0);
    m.reference = [](double x) { return x * x; };
    m.reference_d1 = [](double x) { return 2.0 * x; };
    m.reference_d2 = c(2.0);
    m.initial = Initial::point(0.0);
    m.scan_lo = -3.0;
    m.scan_hi = 3.0;
    return m;
}

} // namespace

TEST_CASE("validate_model passes the constant model with min |a| = 1") {
    const auto rep = validate_model(bare_spec());
    CHECK(rep.pass);
    CHECK(rep.min_abs_a == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validate_model passes a(x) = 2 + sin x with min |a| = 1") {
    ModelSpec m = bare_spec();
    m.kernel = [](double x) { return 2.0 + std::sin(x); };
    m.kernel_d1 = [](double x) { return std::cos(x); };
    m.kernel_d2 = [](double x) { return -std::sin(x); };
    const auto rep = validate_model(m);
    CHECK(rep.pass);
    CHECK(rep.min_abs_a == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("validate_model fails when a vanishes in the scan range") {
    ModelSpec m = bare_spec();
    m.diffusion = [](double x) { return x; };
    m.diffusion_d1 = c(1.0);
    m.diffusion_d2 = c(0.0);
    const auto rep = validate_model(m);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_abs_a == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate_model hard-fails on non-finite values with the offending x") {
    ModelSpec m = bare_spec();
    m.diffusion = [](double x) { return 1.0 / x; };
    const auto rep = validate_model(m);
    CHECK_FALSE(rep.pass);
    CHECK(rep.nonfinite);
    CHECK(rep.nonfinite_handle == "sigma");
    CHECK(rep.nonfinite_at == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate_model flags wrong derivative handles") {
    ModelSpec m = bare_spec();
    m.kernel = [](double x) { return std::exp(0.3 * x); };
    m.kernel_d1 = [](double x) { return 0.5 * std::exp(0.3 * x); }; // wrong slope
    m.kernel_d2 = [](double x) { return 0.09 * std::exp(0.3 * x); };
    const auto rep = validate_model(m);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_rel_err > 1e-2);
}

TEST_CASE("validate_model is deterministic") {
    const ModelSpec m = make_preset("wiener-sin");
    const auto r1 = validate_model(m);
    const auto r2 = validate_model(m);
    CHECK(r1.pass == r2.pass);
    CHECK(r1.min_abs_a == r2.min_abs_a);
    CHECK(r1.worst_rel_err == r2.worst_rel_err);
}

TEST_CASE("a has constant sign on the scan range for passing specs") {
    for (const char* name : {"wiener-const", "wiener-sin", "ou", "gbm"}) {
        const ModelSpec m = make_preset(name);
        const auto rep = validate_model(m);
        REQUIRE(rep.pass);
        const double first = m.a(m.scan_lo);
        for (int i = 0; i <= 100; ++i) {
            const double x = m.scan_lo + (m.scan_hi - m.scan_lo) * i / 100.0;
            CHECK(m.a(x) * first > 0.0);
        }
    }
}

TEST_CASE("fd_check_derivatives on exact and broken pairs") {
    ModelSpec m = bare_spec();
    m.kernel = [](double x) { return std::sin(x); };
    m.kernel_d1 = [](double x) { return std::cos(x); };
    m.kernel_d2 = [](double x) { return -std::sin(x); };
    auto entries = fd_check_derivatives(m, {0.0});
    for (const auto& e : entries)
        if (e.handle == "c'") CHECK(e.max_rel_err <= 1e-9);

    ModelSpec q = bare_spec();
    q.kernel = [](double x) { return x * x; };
    q.kernel_d1 = [](double x) { return 2.0 * x; };
    q.kernel_d2 = c(2.0);
    for (const auto& e : fd_check_derivatives(q, {1.0}))
        if (e.handle == "c'") CHECK(e.max_rel_err <= 1e-10);

    ModelSpec w = bare_spec();
    w.kernel = [](double x) { return x * x; };
    w.kernel_d1 = [](double x) { return 3.0 * x; }; // claimed, wrong
    w.kernel_d2 = c(3.0);
    for (const auto& e : fd_check_derivatives(w, {1.0}))
        if (e.handle == "c'") CHECK(e.max_rel_err == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("presets carry consistent derivatives and cases") {
    CHECK(make_preset("wiener-const").stat_case == StatCase::wiener);
    CHECK(make_preset("wiener-sin").stat_case == StatCase::wiener);
    CHECK(make_preset("gbm").stat_case == StatCase::diffusion);
    CHECK(make_preset("ou").stat_case == StatCase::diffusion);
    CHECK_THROWS_AS(make_preset("nope"), std::invalid_argument);

    // gbm: a(x) = theta^2 x^2, beta = 2 a^2.
    const ModelSpec g = make_preset("gbm", {.theta = 0.5, .x0 = 1.0});
    CHECK(g.a(2.0) == doctest::Approx(1.0));
    CHECK(g.reference(2.0) == doctest::Approx(2.0));

    // ou drift is -x with unit diffusion.
    const ModelSpec ou = make_preset("ou");
    CHECK(ou.drift(2.0) == -2.0);
    CHECK(ou.a(7.0) == 1.0);
}

TEST_CASE("ito coefficients follow f^{[1]} = f' sigma and f^{[0]} = f'b + f''sigma^2/2") {
    const ModelSpec g = make_preset("gbm", {.theta = 0.5, .x0 = 1.0});
    // sigma^{[1]} = theta * theta x = theta^2 x
    CHECK(g.sigma_i1(3.0) == doctest::Approx(0.25 * 3.0));
    const ModelSpec ou = make_preset("ou");
    CHECK(ou.drift_i1(5.0) == doctest::Approx(-1.0));
    CHECK(ou.kernel_i0(5.0) == 0.0);
}
