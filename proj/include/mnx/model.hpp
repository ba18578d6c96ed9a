#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnx {

using Handle = std::function<double(double)>;

// Initial condition: a point mass or a sampler with declared compact support.
struct Initial {
    bool is_point = true;
    double value = 0.0;
    std::function<double(double)> sampler; // maps a uniform in [0,1) to a value
    double support_lo = 0.0;
    double support_hi = 0.0;

    static Initial point(double v) {
        Initial ic;
        ic.is_point = true;
        ic.value = v;
        return ic;
    }
    static Initial sampled(std::function<double(double)> s, double lo, double hi) {
        Initial ic;
        ic.is_point = false;
        ic.sampler = std::move(s);
        ic.support_lo = lo;
        ic.support_hi = hi;
        ic.value = 0.5 * (lo + hi);
        return ic;
    }
};

enum class StatCase { wiener, diffusion };

// Coefficient functions of dX = b(X)dt + sigma(X)dw with the quadratic-form
// weight c and the reference function beta, plus their first two derivatives.
// Derivatives are supplied analytically; finite differences only cross-check
// them (second derivatives feed the symbol formulas, so FD noise is not an
// acceptable substitute).
//
// Immutable after construction; handles must be pure. Safe to share
// read-only across workers.
struct ModelSpec {
    std::string name = "custom";
    StatCase stat_case = StatCase::diffusion;

    Handle drift, drift_d1, drift_d2;          // b, b', b''
    Handle diffusion, diffusion_d1, diffusion_d2; // sigma
    Handle kernel, kernel_d1, kernel_d2;       // c
    Handle reference, reference_d1, reference_d2; // beta (scalar, d1 = 1)

    Initial initial;
    double scan_lo = -5.0;
    double scan_hi = 5.0;

    // Hoermander-type spanning conditions are user-asserted, not checked.
    bool hormander_asserted = true;

    // a = c sigma^2 and alpha = a^2 with derivatives by the chain rule.
    double a(double x) const {
        const double s = diffusion(x);
        return kernel(x) * s * s;
    }
    double a_d1(double x) const {
        const double s = diffusion(x), s1 = diffusion_d1(x);
        return kernel_d1(x) * s * s + 2.0 * kernel(x) * s * s1;
    }
    double a_d2(double x) const {
        const double s = diffusion(x), s1 = diffusion_d1(x), s2 = diffusion_d2(x);
        return kernel_d2(x) * s * s + 4.0 * kernel_d1(x) * s * s1 +
               2.0 * kernel(x) * (s1 * s1 + s * s2);
    }
    double alpha(double x) const {
        const double v = a(x);
        return v * v;
    }
    double alpha_d1(double x) const { return 2.0 * a(x) * a_d1(x); }
    double alpha_d2(double x) const {
        const double a1 = a_d1(x);
        return 2.0 * (a(x) * a_d2(x) + a1 * a1);
    }

    struct ADerivs {
        double a, a1, a2;
    };
    // Fused evaluator for the per-node hot loops; presets may install a
    // cheaper implementation.
    std::function<ADerivs(double)> a_fused;
    ADerivs a_derivs(double x) const {
        if (a_fused) return a_fused(x);
        return {a(x), a_d1(x), a_d2(x)};
    }

    // Ito decomposition coefficients f^{[1]} = f' sigma, f^{[0]} = f' b + f'' sigma^2 / 2.
    double sigma_i1(double x) const { return diffusion_d1(x) * diffusion(x); }
    double sigma_i0(double x) const {
        const double s = diffusion(x);
        return diffusion_d1(x) * drift(x) + 0.5 * diffusion_d2(x) * s * s;
    }
    double kernel_i1(double x) const { return kernel_d1(x) * diffusion(x); }
    double kernel_i0(double x) const {
        const double s = diffusion(x);
        return kernel_d1(x) * drift(x) + 0.5 * kernel_d2(x) * s * s;
    }
    double drift_i1(double x) const { return drift_d1(x) * diffusion(x); }

    bool has_second_order_handles() const {
        return drift_d1 && drift_d2 && diffusion_d1 && diffusion_d2 && kernel_d1 &&
               kernel_d2;
    }
};

struct ValidationReport {
    bool pass = false;
    double min_abs_a = 0.0;
    double worst_rel_err = 0.0;
    std::string worst_handle;
    bool nonfinite = false;
    double nonfinite_at = 0.0;
    std::string nonfinite_handle;
    std::vector<std::string> diagnostics;
};

struct FdCheckEntry {
    std::string handle;
    double max_rel_err = 0.0;
    double worst_point = 0.0;
};

// Max over points of |f'(x) - central difference| / (1 + |fd|), h = 1e-5.
std::vector<FdCheckEntry> fd_check_derivatives(const ModelSpec& spec,
                                               const std::vector<double>& points);

ValidationReport validate_model(const ModelSpec& spec);

struct PresetParams {
    double theta = 0.5; // gbm volatility
    std::optional<double> x0;
};

// Presets addressable from config files: wiener-const, wiener-sin, gbm, ou.
ModelSpec make_preset(const std::string& name, const PresetParams& params = {});

bool is_preset_name(const std::string& name);

} // namespace mnx
