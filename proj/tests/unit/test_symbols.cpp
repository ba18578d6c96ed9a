#include "doctest.h"

#include <cmath>
#include <complex>

#include "mnx/symbols.hpp"

using namespace mnx;

namespace {

struct PathBundle {
    TimeGrid grid;
    BrownianPath bp;
    DiffusionPath dp;
};

PathBundle make_bundle(const ModelSpec& m, int n, int R, int rep) {
    PathBundle b{build_grid(n, R), {}, {}};
    const RngStream s(4242, rep);
    b.bp = sample_brownian(b.grid, s);
    b.dp = euler_maruyama(m, b.bp, b.grid, s);
    return b;
}

} // namespace

TEST_CASE("wiener coefficients for constant kernels") {
    const ModelSpec one = make_preset("wiener-const");
    const PathBundle b = make_bundle(one, 4, 2, 0);
    const SymbolCoeffs c = wiener_coefficients(one, b.dp, b.grid);
    CHECK(c.c0 == 2.0);
    CHECK(c.c1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.c2 == 0.0);
    CHECK(c.c3 == 0.0);

    ModelSpec two = one;
    two.kernel = [](double) { return 2.0; };
    two.kernel_d1 = [](double) { return 0.0; };
    two.kernel_d2 = [](double) { return 0.0; };
    two.a_fused = {};
    const DiffusionPath dp2 = euler_maruyama(two, b.bp, b.grid, RngStream(4242, 0));
    const SymbolCoeffs c2 = wiener_coefficients(two, dp2, b.grid);
    CHECK(c2.c0 == 8.0);
    CHECK(c2.c1 == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(c2.c2 == 0.0);
    CHECK(c2.c3 == 0.0);
}

TEST_CASE("wiener coefficients match a brute-force double-loop quadrature") {
    const ModelSpec m = make_preset("wiener-sin");
    const PathBundle b = make_bundle(m, 8, 16, 3);
    const SymbolCoeffs c = wiener_coefficients(m, b.dp, b.grid);

    const int K = b.grid.fine_count();
    const double h = b.grid.fine_step;
    auto a_of = [&](int k) { return 2.0 + std::sin(b.dp.x_values[k]); };
    auto a1_of = [&](int k) { return std::cos(b.dp.x_values[k]); };
    auto a2_of = [&](int k) { return -std::sin(b.dp.x_values[k]); };

    double s2 = 0.0, s3 = 0.0;
    for (int k = 0; k < K; ++k) {
        s2 += a_of(k) * a_of(k);
        s3 += a_of(k) * a_of(k) * a_of(k);
    }
    CHECK(std::abs(c.c0 - 2.0 * h * s2) <= 1e-12);
    CHECK(std::abs(c.c1 - (2.0 / 3.0) * s3 / s2) <= 1e-12);

    double c2 = 0.0, c3 = 0.0;
    for (int j = 0; j < b.grid.n; ++j) {
        const int fj = b.grid.coarse_to_fine(j);
        double t1 = 0.0, t2 = 0.0;
        for (int l = fj; l < K; ++l) {
            t1 += a_of(l) * a1_of(l) * h;
            t2 += (a_of(l) * a2_of(l) + a1_of(l) * a1_of(l)) * h;
        }
        c2 += a_of(fj) * t1 * t1 / b.grid.n;
        c3 += a_of(fj) * t2 / b.grid.n;
    }
    CHECK(std::abs(c.c2 - c2) <= 1e-8);
    CHECK(std::abs(c.c3 - c3) <= 1e-8);
}

TEST_CASE("full symbol table expands the canonical factor with exact binomials") {
    const SymbolCoeffs c{2.0, 2.0 / 3.0, 0.7, -0.3};
    const RandomSymbol sym = full_symbol_wiener(c);

    CHECK(sym.coefficient(key1(2, 0, 1)) == doctest::Approx(2.0 / 3.0));
    CHECK(sym.coefficient(key1(5, 0)) == doctest::Approx(4.0 * 0.7));
    CHECK(sym.coefficient(key1(3, 1)) == doctest::Approx(16.0 * 0.7));
    CHECK(sym.coefficient(key1(1, 2)) == doctest::Approx(16.0 * 0.7));
    CHECK(sym.coefficient(key1(3, 0)) == doctest::Approx(2.0 * -0.3));
    CHECK(sym.coefficient(key1(1, 1)) == doctest::Approx(4.0 * -0.3));

    // Against the unexpanded closed form at random arguments.
    for (int i = 0; i < 10; ++i) {
        const double z = -1.0 + 0.3 * i;
        const double u = 0.2 + 0.1 * i;
        const double v = -0.5 + 0.13 * i;
        const std::complex<double> iu(0, u), iv(0, v);
        const std::complex<double> canon = -2.0 * u * u + 4.0 * iv;
        const std::complex<double> direct =
            c.c1 * z * iu * iu + c.c2 * iu * canon * canon + c.c3 * iu * canon;
        const std::complex<double> table = sym.evaluate(z, u, v);
        CHECK(std::abs(direct - table) <= 1e-12 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("a == 1 full symbol evaluates to -2/3 at (1, 1, 0)") {
    const RandomSymbol sym = full_symbol_wiener({2.0, 2.0 / 3.0, 0.0, 0.0});
    const auto val = sym.evaluate(1.0, 1.0, 0.0);
    CHECK(val.real() == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(val.imag() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("adaptive symbol and the decomposition full = adaptive + anticipative") {
    const SymbolCoeffs c{2.0, 0.41, 0.09, 0.12};
    const RandomSymbol full = full_symbol_wiener(c);
    const RandomSymbol adapt = adaptive_symbol_wiener(c);
    CHECK(adapt.terms().size() == 1);
    CHECK(adapt.coefficient(key1(2, 0, 1)) == doctest::Approx(0.41));
    const RandomSymbol anti = anticipative_symbol_wiener(c);
    RandomSymbol sum = adapt + anti;
    sum.prune();
    CHECK(sum.max_abs_diff(full) == 0.0);

    const SymbolCoeffs a2{8.0, 4.0 / 3.0, 0.0, 0.0};
    CHECK(adaptive_symbol_wiener(a2).coefficient(key1(2, 0, 1)) ==
          doctest::Approx(4.0 / 3.0));
}

TEST_CASE("zero coefficients give an empty symbol") {
    const RandomSymbol sym = full_symbol_wiener({2.0, 0.0, 0.0, 0.0});
    CHECK(sym.empty());
    CHECK(sym.evaluate(1.0, 2.0, 3.0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("symbol algebra: addition acts termwise on evaluations") {
    RandomSymbol s1, s2;
    s1.add_term(key1(2, 0, 1), 0.5);
    s1.add_term(key1(1, 1, 0), -1.5);
    s2.add_term(key1(2, 0, 1), 0.25);
    s2.add_term(key1(0, 2, 0), 2.0);
    const RandomSymbol sum = s1 + s2;
    for (int i = 0; i < 10; ++i) {
        const double z = -2.0 + 0.41 * i, u = 0.3 + 0.2 * i, v = 1.0 - 0.19 * i;
        const auto lhs = sum.evaluate(z, u, v);
        const auto rhs = s1.evaluate(z, u, v) + s2.evaluate(z, u, v);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("k and h processes for the named models") {
    const TimeGrid g = build_grid(4, 4);
    SUBCASE("unit model collapses") {
        const ModelSpec m = make_preset("wiener-const");
        const PathBundle b = make_bundle(m, 4, 4, 1);
        const KHPaths kh = diffusion_kh(m, b.dp, g);
        for (double v : kh.k) CHECK(v == 0.0);
        for (double v : kh.h) CHECK(v == 0.0);
    }
    SUBCASE("ou gives k = -2X and h = X^2 - 1") {
        const ModelSpec ou = make_preset("ou");
        const PathBundle b = make_bundle(ou, 4, 4, 2);
        const KHPaths kh = diffusion_kh(ou, b.dp, g);
        for (int i = 0; i <= g.fine_count(); ++i) {
            const double x = b.dp.x_values[i];
            CHECK(kh.k[i] == doctest::Approx(-2.0 * x).epsilon(1e-14));
            CHECK(kh.h[i] == doctest::Approx(x * x - 1.0).epsilon(1e-14));
        }
    }
    SUBCASE("gbm gives k = theta^3 X^2 and h = 0") {
        const double theta = 0.5;
        const ModelSpec gbm = make_preset("gbm", {.theta = theta, .x0 = 1.0});
        const PathBundle b = make_bundle(gbm, 4, 4, 3);
        const KHPaths kh = diffusion_kh(gbm, b.dp, g);
        for (int i = 0; i <= g.fine_count(); ++i) {
            const double x = b.dp.x_values[i];
            CHECK(kh.k[i] ==
                  doctest::Approx(theta * theta * theta * x * x).epsilon(1e-12));
            CHECK(kh.h[i] == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("adaptive diffusion symbol: unit reduction and OU Ito sum") {
    const ModelSpec one = make_preset("wiener-const");
    const PathBundle b = make_bundle(one, 4, 8, 4);
    const KHPaths kh0 = diffusion_kh(one, b.dp, b.grid);
    const RandomSymbol s0 = adaptive_symbol_diffusion(one, b.dp, b.bp, b.grid, kh0);
    CHECK(s0.terms().size() == 1);
    CHECK(s0.coefficient(key1(2, 0, 1)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const ModelSpec ou = make_preset("ou");
    const PathBundle bo = make_bundle(ou, 8, 8, 5);
    const KHPaths kh = diffusion_kh(ou, bo.dp, bo.grid);
    const RandomSymbol s = adaptive_symbol_diffusion(ou, bo.dp, bo.bp, bo.grid, kh);
    double expect = 0.0;
    for (int k = 0; k < bo.grid.fine_count(); ++k) {
        const double x = bo.dp.x_values[k];
        expect += -2.0 * x * bo.bp.fine_increments[k] +
                  (x * x - 1.0) * bo.grid.fine_step;
    }
    CHECK(s.coefficient(key1(1, 0, 0)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("adaptive diffusion symbol scales linearly in the kernel") {
    ModelSpec m = make_preset("ou");
    const PathBundle b = make_bundle(m, 8, 4, 6);
    const RandomSymbol s1 = adaptive_symbol_diffusion(m, b.dp, b.bp, b.grid,
                                                      diffusion_kh(m, b.dp, b.grid));
    ModelSpec m2 = m;
    m2.kernel = [](double) { return 2.0; };
    m2.a_fused = [](double) { return ModelSpec::ADerivs{2.0, 0.0, 0.0}; };
    const RandomSymbol s2 = adaptive_symbol_diffusion(m2, b.dp, b.bp, b.grid,
                                                      diffusion_kh(m2, b.dp, b.grid));
    // a -> 2a: the (iu)^2 z coefficient doubles (ratio of int a^3 to int a^2)
    // and so does the iu Ito-sum coefficient.
    CHECK(s2.coefficient(key1(2, 0, 1)) ==
          doctest::Approx(2.0 * s1.coefficient(key1(2, 0, 1))).epsilon(1e-12));
    CHECK(s2.coefficient(key1(1, 0, 0)) ==
          doctest::Approx(2.0 * s1.coefficient(key1(1, 0, 0))).epsilon(1e-12));
}

TEST_CASE("diagonal symbol term structure") {
    SUBCASE("constant-coefficient model vanishes") {
        const ModelSpec one = make_preset("wiener-const");
        const PathBundle b = make_bundle(one, 4, 8, 7);
        const DerivativeFlow flow = first_flow(one, b.dp, b.bp, b.grid, {8});
        const RandomSymbol ss = sigma_ss_diffusion(one, flow.slices[0], b.dp, b.grid);
        CHECK(ss.empty());
    }
    SUBCASE("beta = x with constant alpha keeps only the (0,2) term") {
        ModelSpec m = make_preset("wiener-const");
        m.reference = [](double x) { return x; };
        m.reference_d1 = [](double) { return 1.0; };
        m.reference_d2 = [](double) { return 0.0; };
        const PathBundle b = make_bundle(m, 4, 8, 8);
        const int s = 8;
        const DerivativeFlow flow = first_flow(m, b.dp, b.bp, b.grid, {s});
        const RandomSymbol ss = sigma_ss_diffusion(m, flow.slices[0], b.dp, b.grid);
        const double tail = (b.grid.fine_count() - s) * b.grid.fine_step; // 1 - s
        CHECK(ss.coefficient(key1(0, 2)) == doctest::Approx(tail * tail).epsilon(1e-12));
        CHECK(ss.coefficient(key1(0, 1)) == 0.0);
        CHECK(ss.coefficient(key1(4, 0)) == 0.0);
        CHECK(ss.coefficient(key1(2, 1)) == 0.0);
        CHECK(ss.coefficient(key1(2, 0)) == 0.0);
    }
    SUBCASE("the (4,0) coefficient is a square") {
        const ModelSpec m = make_preset("wiener-sin");
        const PathBundle b = make_bundle(m, 8, 8, 9);
        for (int j = 0; j < 8; ++j) {
            const DerivativeFlow flow =
                first_flow(m, b.dp, b.bp, b.grid, {b.grid.coarse_to_fine(j)});
            const RandomSymbol ss = sigma_ss_diffusion(m, flow.slices[0], b.dp, b.grid);
            CHECK(ss.coefficient(key1(4, 0)) >= 0.0);
        }
    }
}

TEST_CASE("diffusion pipeline specialized to the wiener case matches closed forms") {
    const ModelSpec m = make_preset("wiener-sin"); // beta = 2 alpha installed
    for (int rep = 0; rep < 5; ++rep) {
        const PathBundle b = make_bundle(m, 8, 16, 100 + rep);
        const SymbolCoeffs c = wiener_coefficients(m, b.dp, b.grid);
        const RandomSymbol closed = anticipative_symbol_wiener(c);

        std::vector<int> s_idx;
        for (int j = 0; j < b.grid.n; ++j) s_idx.push_back(b.grid.coarse_to_fine(j));
        const DerivativeFlow flow = first_flow(m, b.dp, b.bp, b.grid, s_idx);
        const RandomSymbol generic =
            anticipative_symbol_diffusion(m, flow, b.dp, b.grid);
        CHECK(generic.max_abs_diff(closed) <= 1e-6);
    }
}

TEST_CASE("symbol JSON round-trip") {
    RandomSymbol s;
    s.add_term(key1(5, 0, 0), 1.25);
    s.add_term(key1(2, 1, 1), -0.375);
    const RandomSymbol back = symbol_from_json(symbol_to_json(s));
    CHECK(back.max_abs_diff(s) == 0.0);
}

TEST_CASE("degeneracy error on nonpositive c0") {
    ModelSpec zero = make_preset("wiener-const");
    zero.kernel = [](double) { return 0.0; };
    zero.a_fused = [](double) { return ModelSpec::ADerivs{0.0, 0.0, 0.0}; };
    const PathBundle b = make_bundle(zero, 4, 2, 11);
    CHECK_THROWS_AS(wiener_coefficients(zero, b.dp, b.grid), DegeneracyError);
}
