// mnx command-line front end: validate / coeffs / density / study / residual.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mnx/density.hpp"
#include "mnx/harness.hpp"
#include "mnx/io.hpp"
#include "mnx/model.hpp"
#include "mnx/symbols.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string model = "wiener-const";
    double theta = 0.5;
    std::optional<double> x0;
    bool hormander_asserted = true;
    int n = 64;
    std::vector<int> n_list;
    int R = 32;
    long long N = 10000;
    std::uint64_t seed = 1;
    int threads = 0; // 0: MNX_THREADS env or hardware
    std::vector<std::string> f_family = {"z", "z2", "z3", "sinz"};
    std::string out = "./out";
    bool emit_svg = false;
    int paths = 1; // coeffs subcommand

    json canonical() const {
        json j;
        j["model"] = {{"preset", model}, {"theta", theta}};
        if (x0) j["model"]["x0"] = *x0;
        j["model"]["hormander_asserted"] = hormander_asserted;
        j["n"] = n;
        j["n_list"] = n_list;
        j["R"] = R;
        j["N"] = N;
        j["seed"] = seed;
        j["f_family"] = f_family;
        j["emit_svg"] = emit_svg;
        j["paths"] = paths;
        return j;
    }
    std::string config_hash() const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(mnx::fnv1a64(canonical().dump())));
        return buf;
    }
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw UsageError("unknown config key '" + it.key() + "' in " + where);
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }
    check_keys(j, {"version", "model", "n", "n_list", "R", "N", "seed", "threads",
                   "f_family", "out", "emit_svg", "paths"},
               path);
    if (!j.contains("version")) throw UsageError("config file missing 'version'");
    if (j["version"].get<int>() != 1) throw UsageError("unsupported config version");
    if (j.contains("model")) {
        const json& m = j["model"];
        check_keys(m, {"preset", "theta", "x0", "hormander_asserted"}, "model");
        if (m.contains("preset")) cfg.model = m["preset"].get<std::string>();
        if (m.contains("theta")) cfg.theta = m["theta"].get<double>();
        if (m.contains("x0")) cfg.x0 = m["x0"].get<double>();
        if (m.contains("hormander_asserted"))
            cfg.hormander_asserted = m["hormander_asserted"].get<bool>();
    }
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("R")) cfg.R = j["R"].get<int>();
    if (j.contains("N")) cfg.N = j["N"].get<long long>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("f_family")) cfg.f_family = j["f_family"].get<std::vector<std::string>>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("emit_svg")) cfg.emit_svg = j["emit_svg"].get<bool>();
    if (j.contains("paths")) cfg.paths = j["paths"].get<int>();
}

void validate_ranges(const RunConfig& cfg, bool needs_sweep) {
    if (!mnx::is_preset_name(cfg.model)) throw UsageError("unknown model preset: " + cfg.model);
    if (cfg.n < 2) throw UsageError("n must be >= 2");
    for (int n : cfg.n_list)
        if (n < 2) throw UsageError("n_list entries must be >= 2");
    if (cfg.R < 1) throw UsageError("R must be >= 1");
    if (needs_sweep && cfg.N < 100) throw UsageError("N must be >= 100");
    if (cfg.threads < 0) throw UsageError("threads must be >= 0");
    if (cfg.paths < 1) throw UsageError("paths must be >= 1");
    for (const auto& f : cfg.f_family)
        if (f != "z" && f != "z2" && f != "z3" && f != "sinz" && f != "one")
            throw UsageError("unknown f-family entry: " + f);
}

mnx::ModelSpec build_model(const RunConfig& cfg) {
    mnx::PresetParams p;
    p.theta = cfg.theta;
    p.x0 = cfg.x0;
    mnx::ModelSpec spec = mnx::make_preset(cfg.model, p);
    spec.hormander_asserted = cfg.hormander_asserted;
    return spec;
}

std::string csv_header_comment(const RunConfig& cfg) {
    return "# config_hash=" + cfg.config_hash() + " master_seed=" +
           std::to_string(cfg.seed) + " version=" + mnx::kArtifactVersion + "\n";
}

json meta(const RunConfig& cfg) {
    return {{"config_hash", cfg.config_hash()},
            {"master_seed", cfg.seed},
            {"version", mnx::kArtifactVersion}};
}

int cmd_validate(const RunConfig& cfg) {
    const mnx::ModelSpec spec = build_model(cfg);
    const mnx::ValidationReport rep = mnx::validate_model(spec);
    std::cout << "model: " << spec.name << "\n"
              << "scan range: [" << spec.scan_lo << ", " << spec.scan_hi << "]\n"
              << "min |a|: " << rep.min_abs_a << "\n"
              << "worst derivative mismatch: " << rep.worst_rel_err;
    if (!rep.worst_handle.empty()) std::cout << " (" << rep.worst_handle << ")";
    std::cout << "\nhormander condition: " << (spec.hormander_asserted ? "asserted" : "not asserted")
              << " (user flag, not checked)\n";
    for (const auto& d : rep.diagnostics) std::cout << "note: " << d << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_coeffs(const RunConfig& cfg) {
    const mnx::ModelSpec spec = build_model(cfg);
    const mnx::TimeGrid grid = mnx::build_grid(cfg.n, cfg.R);
    json arr = json::array();
    for (int i = 0; i < cfg.paths; ++i) {
        const mnx::RngStream stream(cfg.seed, static_cast<std::uint32_t>(i));
        const mnx::BrownianPath bp = mnx::sample_brownian(grid, stream);
        const mnx::DiffusionPath dp = mnx::euler_maruyama(spec, bp, grid, stream);
        json rec;
        rec["replication"] = i;
        rec["n"] = cfg.n;
        rec["R"] = cfg.R;
        mnx::RandomSymbol sym;
        if (spec.stat_case == mnx::StatCase::wiener) {
            const mnx::SymbolCoeffs c = mnx::wiener_coefficients(spec, dp, grid);
            rec["c0"] = c.c0;
            rec["c1"] = c.c1;
            rec["c2"] = c.c2;
            rec["c3"] = c.c3;
            sym = mnx::full_symbol_wiener(c);
        } else {
            sym = mnx::full_symbol_diffusion(spec, dp, bp, grid);
        }
        rec["symbol"] = json::parse(mnx::symbol_to_json(sym));
        arr.push_back(rec);
    }
    json out;
    out["_meta"] = meta(cfg);
    out["paths"] = arr;
    mnx::atomic_write(fs::path(cfg.out) / "coeffs.json", out.dump(2) + "\n");
    std::cout << "wrote " << (fs::path(cfg.out) / "coeffs.json").string() << "\n";
    return 0;
}

int cmd_density(const RunConfig& cfg) {
    const mnx::ModelSpec spec = build_model(cfg);
    const mnx::TimeGrid grid = mnx::build_grid(cfg.n, cfg.R);
    mnx::ReplicationOutputs outputs;
    outputs.collect_statistics = false;
    outputs.collect_coeffs = true;
    const mnx::MCResult mc = mnx::run_replications(
        spec, grid, static_cast<std::size_t>(cfg.N), cfg.seed,
        mnx::resolve_threads(cfg.threads), outputs);
    const mnx::Moments m = mnx::coefficient_moments(mc.coeffs);

    json mj;
    mj["_meta"] = meta(cfg);
    mj["m1"] = m.m1;
    mj["m2"] = m.m2;
    mj["m3"] = m.m3;
    mj["se1"] = m.se1;
    mj["se2"] = m.se2;
    mj["se3"] = m.se3;
    mj["N"] = m.N;
    mj["degenerate_reference"] = mc.coeffs.degenerate_reference();
    mnx::atomic_write(fs::path(cfg.out) / "moments.json", mj.dump(2) + "\n");

    std::string curve = csv_header_comment(cfg);
    curve += "z,first_order,second_order,n,N,seed\n";
    std::string cdf = csv_header_comment(cfg);
    cdf += "z,first_order,second_order,n,N,seed\n";
    const std::string tail = "," + std::to_string(cfg.n) + "," + std::to_string(cfg.N) +
                             "," + std::to_string(cfg.seed) + "\n";
    std::vector<double> zs, q1, q2;
    for (int i = 0; i <= 160; ++i) {
        const double z = -4.0 + 0.05 * i;
        const double first = mnx::gaussian_derivatives(z, 0.0, 1.0, 0);
        const double second = mnx::studentized_qn(z, cfg.n, m);
        curve += mnx::format_double(z) + "," + mnx::format_double(first) + "," +
                 mnx::format_double(second) + tail;
        cdf += mnx::format_double(z) + "," + mnx::format_double(mnx::normal_cdf(z)) +
               "," + mnx::format_double(mnx::qn_cdf(z, cfg.n, m)) + tail;
        zs.push_back(z);
        q1.push_back(first);
        q2.push_back(second);
    }
    mnx::atomic_write(fs::path(cfg.out) / "qn_curve.csv", curve);
    mnx::atomic_write(fs::path(cfg.out) / "qn_cdf.csv", cdf);
    if (cfg.emit_svg) {
        const std::string svg = mnx::render_svg_lines(
            "studentized density, n=" + std::to_string(cfg.n),
            {{"first order", zs, q1}, {"second order", zs, q2}});
        mnx::atomic_write(fs::path(cfg.out) / "qn_curve.svg", svg);
    }
    std::cout << "m1=" << m.m1 << " m2=" << m.m2 << " m3=" << m.m3 << " (N=" << m.N
              << ")\n";
    if (mc.coeffs.degenerate_reference())
        std::cout << "note: degenerate-reference model (constant c0); density-form "
                     "outputs excluded from quantitative use\n";
    return 0;
}

int cmd_study(const RunConfig& cfg) {
    const mnx::ModelSpec spec = build_model(cfg);
    std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{16, 64, 256} : cfg.n_list;
    std::vector<mnx::StudyRow> rows;
    if (cfg.model == "wiener-const") {
        rows = mnx::convergence_study_oracle(ns);
    } else {
        rows = mnx::convergence_study_mc(spec, ns, cfg.R,
                                         static_cast<std::size_t>(cfg.N), cfg.seed,
                                         mnx::resolve_threads(cfg.threads),
                                         cfg.f_family);
    }
    std::string csv = csv_header_comment(cfg);
    csv += "n,f,order,error,scaled_error,se\n";
    for (const auto& r : rows)
        csv += std::to_string(r.n) + "," + mnx::csv_field(r.f) + "," +
               std::to_string(r.order) + "," + mnx::format_double(r.error) + "," +
               mnx::format_double(r.scaled_error) + "," + mnx::format_double(r.se) +
               "\n";
    mnx::atomic_write(fs::path(cfg.out) / "errors.csv", csv);
    if (cfg.emit_svg) {
        std::vector<mnx::SvgSeries> series(2);
        series[0].label = "first order";
        series[1].label = "second order";
        for (const auto& r : rows) {
            if (r.f != rows.front().f) continue;
            auto& s = series[r.order - 1];
            s.x.push_back(std::log2(static_cast<double>(r.n)));
            s.y.push_back(std::log10(std::max(r.error, 1e-16)));
        }
        mnx::atomic_write(fs::path(cfg.out) / "errors.svg",
                          mnx::render_svg_lines("log10 error vs log2 n", series));
    }
    for (const auto& r : rows)
        std::cout << "n=" << r.n << " f=" << r.f << " order=" << r.order
                  << " error=" << r.error << " scaled=" << r.scaled_error
                  << " se=" << r.se << "\n";
    return 0;
}

int cmd_residual(const RunConfig& cfg) {
    const mnx::ModelSpec spec = build_model(cfg);
    std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{64, 256, 1024} : cfg.n_list;
    const auto rows = mnx::expansion_residual(spec, ns, cfg.R,
                                              static_cast<std::size_t>(cfg.N), cfg.seed,
                                              mnx::resolve_threads(cfg.threads));
    std::string csv = csv_header_comment(cfg);
    csv += "n,R,scaled_rms,se\n";
    for (const auto& r : rows)
        csv += std::to_string(r.n) + "," + std::to_string(r.R) + "," +
               mnx::format_double(r.scaled_rms) + "," + mnx::format_double(r.se) + "\n";
    mnx::atomic_write(fs::path(cfg.out) / "residual.csv", csv);
    for (const auto& r : rows)
        std::cout << "n=" << r.n << " R=" << r.R << " sqrt(n)*rms=" << r.scaled_rms
                  << " se=" << r.se << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"second-order expansion densities for quadratic forms of diffusion paths"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::optional<std::string> model;
    std::optional<double> theta, x0;
    std::optional<int> n, R, threads, paths;
    std::optional<long long> N;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<int> n_list;
    std::vector<std::string> f_family;
    bool emit_svg = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override)");
        sub->add_option("--model", model, "model preset: wiener-const, wiener-sin, gbm, ou");
        sub->add_option("--theta", theta, "gbm volatility parameter");
        sub->add_option("--x0", x0, "initial condition");
        sub->add_option("--n", n, "coarse interval count (>= 2)");
        sub->add_option("--n-list", n_list, "list of n values")->delimiter(',');
        sub->add_option("--R", R, "fine steps per coarse interval (>= 1)");
        sub->add_option("--N", N, "replication count");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--threads", threads, "worker threads (0: MNX_THREADS or hardware)");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--f", f_family, "test-function family")->delimiter(',');
        sub->add_option("--paths", paths, "path count for coeffs dump");
        sub->add_flag("--emit-svg", emit_svg, "emit SVG plots");
    };

    CLI::App* c_validate = app.add_subcommand("validate", "run model guards");
    CLI::App* c_coeffs = app.add_subcommand("coeffs", "per-path symbol dump");
    CLI::App* c_density = app.add_subcommand("density", "coefficient moments and q_n curves");
    CLI::App* c_study = app.add_subcommand("study", "convergence error tables");
    CLI::App* c_residual = app.add_subcommand("residual", "stochastic expansion residuals");
    for (CLI::App* sub : {c_validate, c_coeffs, c_density, c_study, c_residual})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (model) cfg.model = *model;
        if (theta) cfg.theta = *theta;
        if (x0) cfg.x0 = *x0;
        if (n) cfg.n = *n;
        if (!n_list.empty()) cfg.n_list = n_list;
        if (R) cfg.R = *R;
        if (N) cfg.N = *N;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (out) cfg.out = *out;
        if (!f_family.empty()) cfg.f_family = f_family;
        if (paths) cfg.paths = *paths;
        if (emit_svg) cfg.emit_svg = true;

        const bool needs_sweep = c_density->parsed() || c_study->parsed() ||
                                 c_residual->parsed();
        validate_ranges(cfg, needs_sweep);

        if (c_validate->parsed()) return cmd_validate(cfg);
        if (c_coeffs->parsed()) return cmd_coeffs(cfg);
        if (c_density->parsed()) return cmd_density(cfg);
        if (c_study->parsed()) return cmd_study(cfg);
        if (c_residual->parsed()) return cmd_residual(cfg);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
