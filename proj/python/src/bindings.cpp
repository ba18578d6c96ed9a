#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "mnx/density.hpp"
#include "mnx/harness.hpp"
#include "mnx/io.hpp"
#include "mnx/malliavin.hpp"
#include "mnx/studentize.hpp"
#include "mnx/symbols.hpp"

namespace py = pybind11;
using namespace mnx;

namespace {

using ModelPtr = std::shared_ptr<ModelSpec>;

ModelPtr make_model(const std::string& preset, double theta,
                    std::optional<double> x0) {
    PresetParams p;
    p.theta = theta;
    p.x0 = x0;
    return std::make_shared<ModelSpec>(make_preset(preset, p));
}

py::dict validate(const ModelPtr& m) {
    const ValidationReport r = validate_model(*m);
    py::dict d;
    d["pass"] = r.pass;
    d["min_abs_a"] = r.min_abs_a;
    d["worst_rel_err"] = r.worst_rel_err;
    d["worst_handle"] = r.worst_handle;
    d["diagnostics"] = r.diagnostics;
    return d;
}

struct SimulatedPath {
    TimeGrid grid;
    BrownianPath bp;
    DiffusionPath dp;
};

SimulatedPath simulate(const ModelPtr& m, int n, int R, std::uint64_t seed,
                       std::uint32_t rep) {
    SimulatedPath s{build_grid(n, R), {}, {}};
    const RngStream stream(seed, rep);
    s.bp = sample_brownian(s.grid, stream);
    s.dp = euler_maruyama(*m, s.bp, s.grid, stream);
    return s;
}

py::dict simulate_path(const ModelPtr& m, int n, int R, std::uint64_t seed,
                       std::uint32_t rep) {
    const SimulatedPath s = simulate(m, n, R, seed, rep);
    py::dict d;
    d["w"] = s.bp.cumulative;
    d["x"] = s.dp.x_values;
    d["frozen_coarse"] = s.dp.frozen_coarse;
    d["fine_step"] = s.grid.fine_step;
    return d;
}

py::dict statistics(const ModelPtr& m, int n, int R, std::uint64_t seed,
                    std::uint32_t rep, bool with_remainder) {
    const SimulatedPath s = simulate(m, n, R, seed, rep);
    const RngStream stream(seed, rep);
    py::dict d;
    StatisticSample st;
    if (with_remainder) {
        const BlockGaussians blocks = sample_block_pair(s.grid, stream);
        st = compute_statistics(*m, s.bp, s.dp, s.grid, &blocks);
        d["n_n"] = st.n_n;
    } else {
        st = compute_statistics(*m, s.bp, s.dp, s.grid, nullptr);
    }
    d["u_n"] = st.u_n;
    d["u_inf"] = st.u_inf;
    d["z_n"] = st.z_n;
    d["m1n"] = st.m1n;
    d["f_n"] = st.f_n;
    d["w_n"] = st.w_n;
    return d;
}

py::tuple coefficients(const ModelPtr& m, int n, int R, std::uint64_t seed,
                       std::uint32_t rep) {
    const SimulatedPath s = simulate(m, n, R, seed, rep);
    const SymbolCoeffs c = wiener_coefficients(*m, s.dp, s.grid);
    return py::make_tuple(c.c0, c.c1, c.c2, c.c3);
}

py::list symbol_terms(const RandomSymbol& sym) {
    py::list out;
    for (const auto& [key, coef] : sym.terms()) {
        py::dict t;
        t["m"] = key.m;
        t["k"] = key.k;
        t["z_degree"] = key.z_degree;
        t["coefficient"] = coef;
        out.append(t);
    }
    return out;
}

py::list path_symbol(const ModelPtr& m, int n, int R, std::uint64_t seed,
                     std::uint32_t rep) {
    const SimulatedPath s = simulate(m, n, R, seed, rep);
    if (m->stat_case == StatCase::wiener)
        return symbol_terms(full_symbol_wiener(wiener_coefficients(*m, s.dp, s.grid)));
    return symbol_terms(full_symbol_diffusion(*m, s.dp, s.bp, s.grid));
}

py::dict run_density(const ModelPtr& m, int n, int R, std::size_t N,
                     std::uint64_t seed, int threads) {
    const TimeGrid grid = build_grid(n, R);
    ReplicationOutputs out;
    out.collect_statistics = false;
    out.collect_coeffs = true;
    const MCResult mc =
        run_replications(*m, grid, N, seed, resolve_threads(threads), out);
    const Moments mo = coefficient_moments(mc.coeffs);
    py::dict d;
    d["m1"] = mo.m1;
    d["m2"] = mo.m2;
    d["m3"] = mo.m3;
    d["se1"] = mo.se1;
    d["se2"] = mo.se2;
    d["se3"] = mo.se3;
    d["N"] = mo.N;
    d["degenerate_reference"] = mc.coeffs.degenerate_reference();
    return d;
}

double weak_form(const ModelPtr& m, const std::string& f_name, int n, int R,
                 std::size_t N, std::uint64_t seed, int threads) {
    const TimeGrid grid = build_grid(n, R);
    ReplicationOutputs out;
    out.collect_statistics = false;
    out.collect_coeffs = true;
    const MCResult mc =
        run_replications(*m, grid, N, seed, resolve_threads(threads), out);
    return weak_form_expectation(test_function(f_name), n,
                                 weak_form_store(mc.coeffs));
}

py::list oracle_study(const std::vector<int>& n_list) {
    py::list out;
    for (const auto& r : convergence_study_oracle(n_list)) {
        py::dict d;
        d["n"] = r.n;
        d["order"] = r.order;
        d["error"] = r.error;
        d["scaled_error"] = r.scaled_error;
        out.append(d);
    }
    return out;
}

py::list residual(const ModelPtr& m, const std::vector<int>& n_list, int R,
                  std::size_t N, std::uint64_t seed, int threads) {
    py::list out;
    for (const auto& r :
         expansion_residual(*m, n_list, R, N, seed, resolve_threads(threads))) {
        py::dict d;
        d["n"] = r.n;
        d["R"] = r.R;
        d["scaled_rms"] = r.scaled_rms;
        d["se"] = r.se;
        out.append(d);
    }
    return out;
}

py::list q_table(int alpha, int beta, int nu) {
    py::list out;
    for (const auto& [key, c] : studentize_reduction(alpha, beta, nu)) {
        py::dict d;
        d["y_degree"] = key.first;
        d["x_degree"] = key.second;
        d["num"] = c.num;
        d["den"] = c.den;
        out.append(d);
    }
    return out;
}

double qn_py(double z, int n, double m1, double m2, double m3) {
    Moments m;
    m.m1 = m1;
    m.m2 = m2;
    m.m3 = m3;
    return studentized_qn(z, n, m);
}

double qn_cdf_py(double t, int n, double m1, double m2, double m3) {
    Moments m;
    m.m1 = m1;
    m.m2 = m2;
    m.m3 = m3;
    return qn_cdf(t, n, m);
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Second-order expansion densities for quadratic forms of "
                "Wiener and diffusion paths";
    mod.attr("__version__") = "0.1.0";

    py::class_<ModelSpec, ModelPtr>(mod, "Model")
        .def_property_readonly("name", [](const ModelSpec& m) { return m.name; })
        .def_property_readonly("is_wiener_case", [](const ModelSpec& m) {
            return m.stat_case == StatCase::wiener;
        });

    mod.def("make_model", &make_model, py::arg("preset"), py::arg("theta") = 0.5,
            py::arg("x0") = py::none(),
            "Model preset: wiener-const, wiener-sin, gbm, ou");
    mod.def("validate", &validate, py::arg("model"));
    mod.def("simulate_path", &simulate_path, py::arg("model"), py::arg("n"),
            py::arg("R"), py::arg("seed"), py::arg("rep") = 0);
    mod.def("statistics", &statistics, py::arg("model"), py::arg("n"), py::arg("R"),
            py::arg("seed"), py::arg("rep") = 0, py::arg("with_remainder") = false);
    mod.def("wiener_coefficients", &coefficients, py::arg("model"), py::arg("n"),
            py::arg("R"), py::arg("seed"), py::arg("rep") = 0);
    mod.def("path_symbol", &path_symbol, py::arg("model"), py::arg("n"), py::arg("R"),
            py::arg("seed"), py::arg("rep") = 0);
    mod.def("run_density", &run_density, py::arg("model"), py::arg("n"), py::arg("R"),
            py::arg("N"), py::arg("seed"), py::arg("threads") = 0);
    mod.def("weak_form_expectation", &weak_form, py::arg("model"), py::arg("f"),
            py::arg("n"), py::arg("R"), py::arg("N"), py::arg("seed"),
            py::arg("threads") = 0);
    mod.def("convergence_study_oracle", &oracle_study, py::arg("n_list"));
    mod.def("expansion_residual", &residual, py::arg("model"), py::arg("n_list"),
            py::arg("R"), py::arg("N"), py::arg("seed"), py::arg("threads") = 0);
    mod.def("studentize_reduction", &q_table, py::arg("alpha"), py::arg("beta"),
            py::arg("nu"));
    mod.def("studentized_qn", &qn_py, py::arg("z"), py::arg("n"), py::arg("m1"),
            py::arg("m2") = 0.0, py::arg("m3") = 0.0);
    mod.def("qn_cdf", &qn_cdf_py, py::arg("t"), py::arg("n"), py::arg("m1"),
            py::arg("m2") = 0.0, py::arg("m3") = 0.0);
    mod.def("gaussian_derivatives", &gaussian_derivatives, py::arg("z"),
            py::arg("mean"), py::arg("variance"), py::arg("order"));
    mod.def("normal_cdf", &normal_cdf, py::arg("t"));
    mod.def("chisq_oracle_cdf", &chisq_oracle_cdf, py::arg("t"), py::arg("n"));
}
