#include "mnx/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mnx/gauss_hermite.hpp"

namespace mnx {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014326779;

double hermite_prob(int k, double y) {
    double h0 = 1.0, h1 = y;
    if (k == 0) return h0;
    for (int i = 1; i < k; ++i) {
        const double h2 = y * h1 - i * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1));
}

} // namespace

double gaussian_derivatives(double z, double mean, double variance, int order) {
    if (variance <= 0.0) throw std::invalid_argument("gaussian_derivatives: variance <= 0");
    if (order < 0 || order > 6)
        throw std::invalid_argument("gaussian_derivatives: order must be in [0, 6]");
    const double sd = std::sqrt(variance);
    const double y = (z - mean) / sd;
    const double phi = inv_sqrt_2pi / sd * std::exp(-0.5 * y * y);
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(sd, -order) * hermite_prob(order, y) * phi;
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t * 0.7071067811865475244); }

bool CoeffStore::degenerate_reference() const {
    if (c0.size() < 2) return true;
    const auto [lo, hi] = std::minmax_element(c0.begin(), c0.end());
    const double scale = std::max(1.0, std::abs(*hi));
    return (*hi - *lo) <= 1e-12 * scale;
}

Moments coefficient_moments(const CoeffStore& store) {
    const std::size_t N = store.N();
    if (N < 2) throw std::invalid_argument("coefficient_moments: need N >= 2");
    std::vector<double> r1(N), r2(N), r3(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double c0 = store.c0[i];
        if (c0 <= 0.0)
            throw DegeneracyError("coefficient_moments: c0 <= 0 at replication " +
                                  std::to_string(i));
        const double rt = std::sqrt(c0);
        r1[i] = store.c1[i] / rt;
        r2[i] = store.c2[i] / (c0 * c0 * rt);
        r3[i] = store.c3[i] / (c0 * rt);
    }
    Moments m;
    m.N = N;
    m.m1 = std::accumulate(r1.begin(), r1.end(), 0.0) / N;
    m.m2 = std::accumulate(r2.begin(), r2.end(), 0.0) / N;
    m.m3 = std::accumulate(r3.begin(), r3.end(), 0.0) / N;
    const double rn = std::sqrt(static_cast<double>(N));
    m.se1 = sample_sd(r1) / rn;
    m.se2 = sample_sd(r2) / rn;
    m.se3 = sample_sd(r3) / rn;
    return m;
}

double studentized_qn(double z, int n, const Moments& m) {
    if (n < 2) throw std::invalid_argument("studentized_qn: n >= 2 required");
    const double rn = 1.0 / std::sqrt(static_cast<double>(n));
    const double phi = inv_sqrt_2pi * std::exp(-0.5 * z * z);
    const double corr = m.m1 * (z * z * z - 3.0 * z) + (12.0 * m.m2 - 2.0 * m.m3) * z;
    return phi * (1.0 + rn * corr);
}

double qn_cdf(double t, int n, const Moments& m) {
    const double rn = 1.0 / std::sqrt(static_cast<double>(n));
    const double phi = inv_sqrt_2pi * std::exp(-0.5 * t * t);
    return normal_cdf(t) +
           rn * (-m.m1 * (t * t - 1.0) * phi - (12.0 * m.m2 - 2.0 * m.m3) * phi);
}

Bandwidths silverman_bandwidths(const CoeffStore& store) {
    const double sd = std::max(sample_sd(store.c0), 1e-8);
    const double N = static_cast<double>(store.N());
    Bandwidths bw;
    bw.h0 = 1.06 * sd * std::pow(N, -1.0 / 5.0);
    bw.h1 = sd * std::pow(N, -1.0 / 7.0);
    bw.h2 = sd * std::pow(N, -1.0 / 9.0);
    return bw;
}

double delta_kde(const CoeffStore& store, int j, double x, int deriv_order,
                 double bandwidth) {
    if (bandwidth <= 0.0) throw std::invalid_argument("delta_kde: bandwidth <= 0");
    if (deriv_order < 0 || deriv_order > 2)
        throw std::invalid_argument("delta_kde: derivative order <= 2");
    const std::vector<double>* cj = nullptr;
    switch (j) {
        case 0: cj = &store.c0; break;
        case 1: cj = &store.c1; break;
        case 2: cj = &store.c2; break;
        case 3: cj = &store.c3; break;
        default: throw std::invalid_argument("delta_kde: j in 0..3");
    }
    const double var = bandwidth * bandwidth;
    double sum = 0.0;
    for (std::size_t i = 0; i < store.N(); ++i)
        sum += (*cj)[i] * gaussian_derivatives(x - store.c0[i], 0.0, var, deriv_order);
    return sum / static_cast<double>(store.N());
}

PnValue joint_pn_density(double z, double x, int n, const CoeffStore& store,
                         const std::optional<Bandwidths>& bw_in) {
    if (n < 2) throw std::invalid_argument("joint_pn_density: n >= 2 required");
    const Bandwidths bw = bw_in ? *bw_in : silverman_bandwidths(store);
    const double rn = 1.0 / std::sqrt(static_cast<double>(n));

    // E[delta_x(c0)]: plain unit-weight kernel estimate.
    double e_delta = 0.0;
    const double var0 = bw.h0 * bw.h0;
    for (std::size_t i = 0; i < store.N(); ++i)
        e_delta += gaussian_derivatives(x - store.c0[i], 0.0, var0, 0);
    e_delta /= static_cast<double>(store.N());

    const double e1 = delta_kde(store, 1, x, 0, bw.h0);
    const double e2_xx = delta_kde(store, 2, x, 2, bw.h2);
    const double e3_x = delta_kde(store, 3, x, 1, bw.h1);

    PnValue out;
    if (x <= 0.0) {
        out.value = 0.0;
        out.reliable = false;
        return out;
    }
    const double phi0 = gaussian_derivatives(z, 0.0, x, 0);
    const double phi1 = gaussian_derivatives(z, 0.0, x, 1);
    const double phi2 = gaussian_derivatives(z, 0.0, x, 2);
    const double dz2_zphi = 2.0 * phi1 + z * phi2; // dz^2 { z phi(z;0,x) }

    const double p1 = e1 * dz2_zphi;
    const double p2 = -16.0 * e2_xx * phi1;
    const double p3 = 4.0 * e3_x * phi1;
    out.value = phi0 * e_delta + rn * (p1 + p2 + p3);

    const auto [lo, hi] = std::minmax_element(store.c0.begin(), store.c0.end());
    out.reliable = (x >= *lo - 3.0 * bw.h0) && (x <= *hi + 3.0 * bw.h0);
    return out;
}

TestFunction test_function(const std::string& name) {
    TestFunction f;
    f.name = name;
    if (name == "one") {
        f.eval = [](double, double, int dz, int dx) {
            return (dz == 0 && dx == 0) ? 1.0 : 0.0;
        };
    } else if (name == "z") {
        f.eval = [](double z, double, int dz, int dx) -> double {
            if (dx > 0) return 0.0;
            if (dz == 0) return z;
            if (dz == 1) return 1.0;
            return 0.0;
        };
    } else if (name == "z2") {
        f.eval = [](double z, double, int dz, int dx) -> double {
            if (dx > 0) return 0.0;
            if (dz == 0) return z * z;
            if (dz == 1) return 2.0 * z;
            if (dz == 2) return 2.0;
            return 0.0;
        };
    } else if (name == "z3") {
        f.eval = [](double z, double, int dz, int dx) -> double {
            if (dx > 0) return 0.0;
            if (dz == 0) return z * z * z;
            if (dz == 1) return 3.0 * z * z;
            if (dz == 2) return 6.0 * z;
            if (dz == 3) return 6.0;
            return 0.0;
        };
    } else if (name == "sinz") {
        f.eval = [](double z, double, int dz, int dx) -> double {
            if (dx > 0) return 0.0;
            switch (dz % 4) {
                case 0: return std::sin(z);
                case 1: return std::cos(z);
                case 2: return -std::sin(z);
                default: return -std::cos(z);
            }
        };
        f.max_dz = 3;
    } else {
        throw std::invalid_argument("test_function: unknown name " + name);
    }
    return f;
}

WeakFormStore weak_form_store(const CoeffStore& store) {
    WeakFormStore w;
    const std::size_t N = store.N();
    w.c_inf.resize(N);
    w.f_inf.resize(N);
    w.symbols.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (store.c0[i] <= 0.0)
            throw DegeneracyError("weak_form_store: c0 <= 0 at replication " +
                                  std::to_string(i));
        w.c_inf[i] = store.c0[i];
        w.f_inf[i] = store.c0[i];
        w.symbols[i] = full_symbol_wiener(
            {store.c0[i], store.c1[i], store.c2[i], store.c3[i]});
    }
    return w;
}

namespace {

// d^e/dz^e { z^zdeg phi(z; 0, var) } for zdeg in {0, 1}.
double gaussian_poly_derivative(double z, double var, int zdeg, int e) {
    if (zdeg == 0) return gaussian_derivatives(z, 0.0, var, e);
    if (zdeg == 1) {
        const double lower = e > 0 ? e * gaussian_derivatives(z, 0.0, var, e - 1) : 0.0;
        return lower + z * gaussian_derivatives(z, 0.0, var, e);
    }
    throw std::invalid_argument("weak form: z-degree above 1 not implemented");
}

} // namespace

double mixed_normal_expectation(const TestFunction& f, const WeakFormStore& store,
                                int gh_order) {
    double total = 0.0;
    for (std::size_t i = 0; i < store.N(); ++i) {
        const double fx = store.f_inf[i];
        total += gh_gaussian_integral(
            [&](double z) { return f.eval(z, fx, 0, 0); }, store.c_inf[i], gh_order);
    }
    return total / static_cast<double>(store.N());
}

double weak_form_expectation(const TestFunction& f, int n, const WeakFormStore& store,
                             int gh_order) {
    if (store.N() == 0) throw std::invalid_argument("weak_form_expectation: empty store");
    const double rn = 1.0 / std::sqrt(static_cast<double>(n));
    double total = 0.0;
    for (std::size_t i = 0; i < store.N(); ++i) {
        const double cv = store.c_inf[i];
        const double fx = store.f_inf[i];
        double value = gh_gaussian_integral(
            [&](double z) { return f.eval(z, fx, 0, 0); }, cv, gh_order);
        for (const auto& [key, coef] : store.symbols[i].terms()) {
            const int kx = key.k_total();
            if (kx > f.max_dx)
                throw std::invalid_argument(
                    "weak_form_expectation: missing x-derivative handle of order " +
                    std::to_string(kx));
            const int dz_f = std::min(key.m, f.max_dz);
            const int extra = key.m - dz_f;
            const double sign = (extra % 2 == 0) ? 1.0 : -1.0;
            // int dz^m dx^k f . z^zdeg phi dz, with `extra` z-derivatives moved
            // onto the polynomial-Gaussian factor by parts.
            const double q = gh_gaussian_integral(
                [&](double z) {
                    const double fd = f.eval(z, fx, dz_f, kx);
                    if (extra == 0) {
                        const double zfac =
                            key.z_degree == 0 ? 1.0 : std::pow(z, key.z_degree);
                        return fd * zfac;
                    }
                    const double phi0 = gaussian_derivatives(z, 0.0, cv, 0);
                    return fd * sign *
                           gaussian_poly_derivative(z, cv, key.z_degree, extra) / phi0;
                },
                cv, gh_order);
            value += rn * coef * q;
        }
        total += value;
    }
    return total / static_cast<double>(store.N());
}

} // namespace mnx
