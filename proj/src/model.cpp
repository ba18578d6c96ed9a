#include "mnx/model.hpp"

#include <algorithm>
#include <cmath>

namespace mnx {

namespace {

struct NamedPair {
    const char* name;
    const Handle* f;
    const Handle* d;
};

std::vector<NamedPair> derivative_pairs(const ModelSpec& s) {
    return {
        {"b'", &s.drift, &s.drift_d1},
        {"b''", &s.drift_d1, &s.drift_d2},
        {"sigma'", &s.diffusion, &s.diffusion_d1},
        {"sigma''", &s.diffusion_d1, &s.diffusion_d2},
        {"c'", &s.kernel, &s.kernel_d1},
        {"c''", &s.kernel_d1, &s.kernel_d2},
        {"beta'", &s.reference, &s.reference_d1},
        {"beta''", &s.reference_d1, &s.reference_d2},
    };
}

} // namespace

std::vector<FdCheckEntry> fd_check_derivatives(const ModelSpec& spec,
                                               const std::vector<double>& points) {
    const double h = 1e-5;
    std::vector<FdCheckEntry> out;
    for (const auto& pair : derivative_pairs(spec)) {
        if (!*pair.f || !*pair.d) continue;
        FdCheckEntry e;
        e.handle = pair.name;
        for (double x : points) {
            const double fd = ((*pair.f)(x + h) - (*pair.f)(x - h)) / (2.0 * h);
            const double claimed = (*pair.d)(x);
            const double err = std::abs(claimed - fd) / (1.0 + std::abs(fd));
            if (err > e.max_rel_err) {
                e.max_rel_err = err;
                e.worst_point = x;
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport rep;
    const int scan_points = 201;
    const double lo = spec.scan_lo, hi = spec.scan_hi;

    // Finiteness scan of every handle; non-finite values are a hard failure
    // reporting the offending x.
    const Handle* handles[] = {&spec.drift,     &spec.drift_d1,     &spec.drift_d2,
                               &spec.diffusion, &spec.diffusion_d1, &spec.diffusion_d2,
                               &spec.kernel,    &spec.kernel_d1,    &spec.kernel_d2,
                               &spec.reference, &spec.reference_d1, &spec.reference_d2};
    const char* hnames[] = {"b",     "b'",     "b''",  "sigma", "sigma'", "sigma''",
                            "c",     "c'",     "c''",  "beta",  "beta'",  "beta''"};
    rep.min_abs_a = std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan_points; ++i) {
        const double x = lo + (hi - lo) * i / (scan_points - 1);
        for (int k = 0; k < 12; ++k) {
            if (!*handles[k]) continue;
            const double v = (*handles[k])(x);
            if (!std::isfinite(v)) {
                rep.nonfinite = true;
                rep.nonfinite_at = x;
                rep.nonfinite_handle = hnames[k];
                rep.diagnostics.push_back(std::string("non-finite ") + hnames[k] +
                                          " at x = " + std::to_string(x));
                rep.pass = false;
                return rep;
            }
        }
        rep.min_abs_a = std::min(rep.min_abs_a, std::abs(spec.a(x)));
    }

    std::vector<double> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(lo + (hi - lo) * (i + 0.5) / 10.0);
    for (const auto& e : fd_check_derivatives(spec, pts)) {
        if (e.max_rel_err > rep.worst_rel_err) {
            rep.worst_rel_err = e.max_rel_err;
            rep.worst_handle = e.handle;
        }
    }

    bool ok = true;
    if (rep.min_abs_a <= 0.0) {
        ok = false;
        rep.diagnostics.push_back("min |a| over scan range is 0 (nondegeneracy guard)");
    }
    if (rep.worst_rel_err > 1e-5) {
        ok = false;
        rep.diagnostics.push_back("derivative handle " + rep.worst_handle +
                                  " disagrees with finite difference (rel err " +
                                  std::to_string(rep.worst_rel_err) + ")");
    }
    if (!spec.initial.is_point && spec.initial.support_lo >= spec.initial.support_hi) {
        ok = false;
        rep.diagnostics.push_back("initial sampler support is empty");
    }
    rep.pass = ok;
    return rep;
}

namespace {

Handle constant(double v) {
    return [v](double) { return v; };
}

void install_beta_from_alpha(ModelSpec& m) {
    // beta = 2 alpha = 2 a^2, the reference variable whose limit matches the
    // asymptotic conditional variance.
    m.reference = [m2 = m](double x) { return 2.0 * m2.alpha(x); };
    m.reference_d1 = [m2 = m](double x) { return 2.0 * m2.alpha_d1(x); };
    m.reference_d2 = [m2 = m](double x) { return 2.0 * m2.alpha_d2(x); };
}

} // namespace

bool is_preset_name(const std::string& name) {
    return name == "wiener-const" || name == "wiener-sin" || name == "gbm" ||
           name == "ou";
}

ModelSpec make_preset(const std::string& name, const PresetParams& params) {
    ModelSpec m;
    m.name = name;
    if (name == "wiener-const") {
        m.stat_case = StatCase::wiener;
        m.drift = constant(0.0);
        m.drift_d1 = constant(0.0);
        m.drift_d2 = constant(0.0);
        m.diffusion = constant(1.0);
        m.diffusion_d1 = constant(0.0);
        m.diffusion_d2 = constant(0.0);
        m.kernel = constant(1.0);
        m.kernel_d1 = constant(0.0);
        m.kernel_d2 = constant(0.0);
        m.initial = Initial::point(params.x0.value_or(0.0));
        m.a_fused = [](double) { return ModelSpec::ADerivs{1.0, 0.0, 0.0}; };
    } else if (name == "wiener-sin") {
        // a(x) = 2 + sin x realized via c = a, sigma = 1, b = 0.
        m.stat_case = StatCase::wiener;
        m.drift = constant(0.0);
        m.drift_d1 = constant(0.0);
        m.drift_d2 = constant(0.0);
        m.diffusion = constant(1.0);
        m.diffusion_d1 = constant(0.0);
        m.diffusion_d2 = constant(0.0);
        m.kernel = [](double x) { return 2.0 + std::sin(x); };
        m.kernel_d1 = [](double x) { return std::cos(x); };
        m.kernel_d2 = [](double x) { return -std::sin(x); };
        m.initial = Initial::point(params.x0.value_or(0.0));
        m.a_fused = [](double x) {
            const double s = std::sin(x);
            return ModelSpec::ADerivs{2.0 + s, std::cos(x), -s};
        };
    } else if (name == "gbm") {
        const double th = params.theta;
        m.stat_case = StatCase::diffusion;
        m.drift = constant(0.0);
        m.drift_d1 = constant(0.0);
        m.drift_d2 = constant(0.0);
        m.diffusion = [th](double x) { return th * x; };
        m.diffusion_d1 = constant(th);
        m.diffusion_d2 = constant(0.0);
        m.kernel = constant(1.0);
        m.kernel_d1 = constant(0.0);
        m.kernel_d2 = constant(0.0);
        const double x0 = params.x0.value_or(1.0);
        m.initial = Initial::point(x0);
        // a(x) = theta^2 x^2 vanishes at 0; the nondegeneracy guard is scanned
        // over a positive range around x0 where the process actually lives.
        m.scan_lo = x0 / 20.0;
        m.scan_hi = x0 * 20.0;
    } else if (name == "ou") {
        m.stat_case = StatCase::diffusion;
        m.drift = [](double x) { return -x; };
        m.drift_d1 = constant(-1.0);
        m.drift_d2 = constant(0.0);
        m.diffusion = constant(1.0);
        m.diffusion_d1 = constant(0.0);
        m.diffusion_d2 = constant(0.0);
        m.kernel = constant(1.0);
        m.kernel_d1 = constant(0.0);
        m.kernel_d2 = constant(0.0);
        m.initial = Initial::point(params.x0.value_or(1.0));
        m.a_fused = [](double) { return ModelSpec::ADerivs{1.0, 0.0, 0.0}; };
    } else {
        throw std::invalid_argument("unknown model preset: " + name);
    }
    if (m.initial.is_point) {
        if (name != "gbm") {
            m.scan_lo = m.initial.value - 5.0;
            m.scan_hi = m.initial.value + 5.0;
        }
    }
    install_beta_from_alpha(m);
    return m;
}

} // namespace mnx
