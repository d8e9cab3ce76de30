// Command-line front end: one workflow per invocation, driven by a resolved
// RunConfig. Every output file starts with the full "# section.key = value"
// header so runs are reproducible from their artifacts alone.
//
// Exit codes: 0 success, 1 validation error, 2 runtime abort, 3 verify failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "chemotax/config.hpp"
#include "chemotax/continuum.hpp"
#include "chemotax/dispersion.hpp"
#include "chemotax/field.hpp"
#include "chemotax/ks.hpp"
#include "chemotax/mc.hpp"
#include "chemotax/model.hpp"
#include "chemotax/rng.hpp"
#include "chemotax/snapshot.hpp"
#include "chemotax/spectrum.hpp"

namespace {

using namespace chemotax;

void write_config_header(std::ostream& os, const RunConfig& cfg) {
    for (const auto& [key, value] : cfg.resolved()) os << "# " << key << " = " << value << "\n";
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name, bool binary = false) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / name;
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    return os;
}

void write_spectrum_csv(std::ostream& os, const RunConfig& cfg, const SpectrumResult& spec) {
    write_config_header(os, cfg);
    os << "# window_start = " << spec.window_start << "\n";
    os << "# window_end = " << spec.window_end << "\n";
    os << "# window_interval = " << spec.window_interval << "\n";
    os << "# columns: lambda,power\n";
    os.precision(17);
    for (std::size_t i = 0; i < spec.lambda.size(); ++i) os << spec.lambda[i] << ',' << spec.power[i] << "\n";
}

void write_metrics_csv(std::ostream& os, const RunConfig& cfg, const SnapshotSeries& series) {
    write_config_header(os, cfg);
    os << "# columns: t,min,max,class\n";
    os.precision(17);
    for (const auto& frame : series.frames) {
        const PatternMetrics m = pattern_metrics(frame);
        os << frame.t << ',' << m.min << ',' << m.max << ',' << m.classification << "\n";
    }
}

// Averaging window for a finished run: configured values, or the final
// quarter of the run when left at the -1 sentinels.
struct Window {
    double start, end, interval;
};

Window resolve_window(const RunConfig& cfg, double t_first, double t_last) {
    Window w;
    w.start = cfg.window_start >= 0.0 ? cfg.window_start : t_first + 0.75 * (t_last - t_first);
    w.end = cfg.window_end >= 0.0 ? cfg.window_end : t_last;
    w.interval = cfg.window_interval;
    return w;
}

// Spectra are normalized per the density-fluctuation convention |rho_hat|^2/k:
// particle runs divide by the model k, continuum runs are already in scaled
// units and use 1.
double spectrum_norm(const SnapshotSeries& series, const RunConfig& cfg) {
    if (series.solver == "mc") return cfg.params.k;
    return 1.0;
}

void report_spectrum(std::ostream& os, const SpectrumResult& spec, double lambda_max) {
    const auto peak = detect_first_peak(spec, lambda_max);
    if (peak) {
        os << "peak_lambda = " << peak->lambda << "\n";
        os << "peak_mode = " << peak->mode << "\n";
        os << "peak_power = " << peak->power << "\n";
        os << "peak_prominence = " << peak->prominence << "\n";
    } else {
        os << "peak_lambda = none\n";
    }
    os << "plateau_median = " << plateau_median(spec) << "\n";
}

void finish_series_outputs(const RunConfig& cfg, const SnapshotSeries& series) {
    {
        auto os = open_output(cfg, series.solver + "_snapshots" +
                                       (cfg.format == RunConfig::Format::binary ? ".bin" : ".csv"),
                              cfg.format == RunConfig::Format::binary);
        if (cfg.format == RunConfig::Format::binary)
            write_snapshots_binary(os, series);
        else
            write_snapshots_csv(os, series);
    }
    if (cfg.write_spacetime) {
        auto os = open_output(cfg, "spacetime.csv");
        write_config_header(os, cfg);
        write_spacetime_csv(os, series);
    }
    {
        auto os = open_output(cfg, "metrics.csv");
        write_metrics_csv(os, cfg, series);
    }
    const Window w = resolve_window(cfg, series.frames.front().t, series.frames.back().t);
    const SpectrumResult spec =
        time_averaged_spectrum(series, w.start, w.end, w.interval, spectrum_norm(series, cfg));
    {
        auto os = open_output(cfg, "spectrum.csv");
        write_spectrum_csv(os, cfg, spec);
    }
    report_spectrum(std::cout, spec, cfg.lambda_max);
    const PatternMetrics m = pattern_metrics(series.frames.back());
    std::cout << "final_min = " << m.min << "\n";
    std::cout << "final_max = " << m.max << "\n";
    std::cout << "final_class = " << m.classification << "\n";
}

int cmd_stability_diagram(const RunConfig& cfg) {
    {
        auto os = open_output(cfg, "stability_diagram.csv");
        write_config_header(os, cfg);
        os << "# columns: k,d,lambda_argmin,critical_stiffness\n";
        os.precision(17);
        for (double k : cfg.diagram_k) {
            for (int i = 0; i < cfg.diagram_dhat_count; ++i) {
                const double f = cfg.diagram_dhat_count == 1
                                     ? 0.0
                                     : static_cast<double>(i) / (cfg.diagram_dhat_count - 1);
                const double d_hat = cfg.diagram_dhat_min *
                                     std::pow(cfg.diagram_dhat_max / cfg.diagram_dhat_min, f);
                const CriticalCurvePoint pt = critical_stiffness(k, d_hat * k);
                os << pt.k << ',' << pt.d << ',' << pt.lambda_argmin << ',' << pt.critical_stiffness << "\n";
            }
        }
    }
    {
        auto os = open_output(cfg, "continuum_threshold.csv");
        write_config_header(os, cfg);
        os << "# columns: d_hat,lambda_hat_argmin,threshold\n";
        os.precision(17);
        for (int i = 0; i < cfg.diagram_dhat_count; ++i) {
            const double f =
                cfg.diagram_dhat_count == 1 ? 0.0 : static_cast<double>(i) / (cfg.diagram_dhat_count - 1);
            const double d_hat =
                cfg.diagram_dhat_min * std::pow(cfg.diagram_dhat_max / cfg.diagram_dhat_min, f);
            os << d_hat << ',' << std::pow(3.0 / d_hat, 0.25) << ',' << continuum_threshold(d_hat) << "\n";
        }
    }
    std::cout << "wrote " << cfg.output_dir << "/stability_diagram.csv and continuum_threshold.csv\n";
    return 0;
}

int cmd_dispersion(const RunConfig& cfg) {
    auto os = open_output(cfg, "dispersion.csv");
    write_config_header(os, cfg);
    os << "# columns: lambda,xi,mu1,mu2,unstable,instability_rhs\n";
    os.precision(17);
    for (int i = 0; i < cfg.disp_count; ++i) {
        const double lam = cfg.disp_lambda_min + (cfg.disp_lambda_max - cfg.disp_lambda_min) * i /
                                                     (cfg.disp_count - 1);
        const DispersionResult r = growth_rate(lam, cfg.params);
        os << lam << ',';
        if (r.xi) os << *r.xi;
        else os << "nan";
        os << ',';
        if (r.mu1) os << *r.mu1;
        else os << "nan";
        os << ',' << r.mu2 << ',' << (r.unstable ? 1 : 0) << ','
           << instability_rhs(lam, cfg.params.k, cfg.params.d) << "\n";
    }
    std::cout << "wrote " << cfg.output_dir << "/dispersion.csv\n";
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    write_config_header(out, cfg);
    const double ratio = stiffness_ratio(cfg.params);
    const CriticalCurvePoint crit = critical_stiffness(cfg.params.k, cfg.params.d);
    const bool unstable = ratio > crit.critical_stiffness;
    out << "stiffness_ratio = " << ratio << "\n";
    out << "critical_stiffness = " << crit.critical_stiffness << "\n";
    out << "critical_lambda = " << crit.lambda_argmin << "\n";
    out << "unstable = " << (unstable ? "true" : "false") << "\n";
    if (const auto band = unstable_band(cfg.params)) {
        out << "band_lambda_lo = " << band->lambda_lo << "\n";
        out << "band_lambda_hi = " << band->lambda_hi << "\n";
        const auto peak = most_unstable_mode(cfg.params);
        out << "most_unstable_lambda = " << peak->lambda << "\n";
        out << "max_mu1 = " << peak->mu1 << "\n";
    } else {
        out << "band_lambda_lo = none\n";
        out << "band_lambda_hi = none\n";
        out << "most_unstable_lambda = none\n";
        out << "max_mu1 = none\n";
    }
    std::cout << out.str();
    auto os = open_output(cfg, "classify.txt");
    os << out.str();
    return 0;
}

int cmd_mc_run(const RunConfig& cfg) {
    McEngine engine(cfg.mc);
    McRunResult result = engine.run();
    for (const auto& [key, value] : cfg.resolved()) result.snapshots.meta.emplace_back(key, value);
    std::cout.precision(17);
    std::cout << "final_count = " << result.final_count << "\n";
    std::cout << "tumbles = " << result.diagnostics.tumbles << "\n";
    std::cout << "births = " << result.diagnostics.births << "\n";
    std::cout << "deaths = " << result.diagnostics.deaths << "\n";
    std::cout << "max_density = " << result.diagnostics.max_density << "\n";
    finish_series_outputs(cfg, result.snapshots);
    return 0;
}

int cmd_ks_run(const RunConfig& cfg) {
    KsSolver solver(cfg.ks);
    KsRunResult result = solver.run();
    for (const auto& [key, value] : cfg.resolved()) result.snapshots.meta.emplace_back(key, value);
    std::cout.precision(17);
    std::cout << "negative_clamps = " << result.negative_clamps << "\n";
    std::cout << "max_abs_flux = " << result.max_abs_flux << "\n";
    finish_series_outputs(cfg, result.snapshots);
    return 0;
}

SnapshotSeries read_series(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::invalid_argument("cannot open snapshot input " + path);
    char magic[8] = {};
    probe.read(magic, sizeof magic);
    probe.close();
    std::ifstream is(path, std::ios::binary);
    if (std::string_view(magic, 8) == "CTAXSNP1") return read_snapshots_binary(is);
    return read_snapshots_csv(is);
}

int cmd_spectrum(const RunConfig& cfg) {
    if (cfg.spectrum_input.empty())
        throw std::invalid_argument("spectrum mode requires spectrum.input (the snapshot file to analyze)");
    const SnapshotSeries series = read_series(cfg.spectrum_input);
    if (series.frames.empty()) throw std::invalid_argument("snapshot input has no frames");

    // Normalization k comes from the run that produced the file, not from
    // this invocation's model block.
    double k_norm = 1.0;
    if (series.solver == "mc") {
        k_norm = 0.0;
        for (const auto& [key, value] : series.meta)
            if (key == "model.k") k_norm = std::stod(value);
        if (k_norm <= 0.0) throw std::invalid_argument("mc snapshot input lacks a model.k header");
    }

    const Window w = resolve_window(cfg, series.frames.front().t, series.frames.back().t);
    const SpectrumResult spec = time_averaged_spectrum(series, w.start, w.end, w.interval, k_norm);
    {
        auto os = open_output(cfg, "spectrum.csv");
        write_spectrum_csv(os, cfg, spec);
    }
    if (cfg.write_spacetime) {
        auto os = open_output(cfg, "spacetime.csv");
        write_config_header(os, cfg);
        write_spacetime_csv(os, series);
    }
    {
        auto os = open_output(cfg, "metrics.csv");
        write_metrics_csv(os, cfg, series);
    }
    std::cout.precision(17);
    report_spectrum(std::cout, spec, cfg.lambda_max);
    const PatternMetrics m = pattern_metrics(series.frames.back());
    std::cout << "final_min = " << m.min << "\n";
    std::cout << "final_max = " << m.max << "\n";
    std::cout << "final_class = " << m.classification << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify: fast self-checks with frozen expectations. Independent of the unit
// tests so a shipped binary can prove itself on site.

struct VerifyReport {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << ": " << detail;
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

int cmd_verify(const RunConfig& cfg, double debug_ks_diffusion) {
    VerifyReport rep;
    std::ostringstream detail;
    detail.precision(17);

    { // Field solver: discrete cosine eigenfunction of the screened Laplacian.
        const FieldGrid grid{64, 0.125};
        const ChemoattractantSolver solver(grid, 0.8);
        const double two_pi = 6.283185307179586476925286766559;
        const double lam = two_pi * 3.0 / grid.length();
        std::vector<double> rho(grid.sites), s(grid.sites);
        for (int i = 0; i < grid.sites; ++i) rho[i] = 1.0 + 0.25 * std::cos(lam * grid.center(i));
        solver.solve(rho, s);
        const double symbol =
            1.0 + 0.8 * (2.0 - 2.0 * std::cos(lam * grid.dx)) / (grid.dx * grid.dx);
        double err = 0.0;
        for (int i = 0; i < grid.sites; ++i)
            err = std::max(err, std::fabs(s[i] - (1.0 + 0.25 * std::cos(lam * grid.center(i)) / symbol)));
        detail.str("");
        detail << "max error " << err;
        rep.check("field cosine eigenfunction", err < 1e-12, detail.str());

        const double mass = mass_identity_check(s, rho);
        detail.str("");
        detail << "sum |S - rho| imbalance " << mass;
        rep.check("field mass identity", std::fabs(mass) < 1e-10, detail.str());
    }

    { // Dispersion: frozen stability-boundary and critical-curve values.
        const double rhs = instability_rhs(std::sqrt(3.0), 1.0, 1.0);
        detail.str("");
        detail << "got " << rhs;
        rep.check("stability boundary at k=1, d=1, lambda=sqrt(3)",
                  std::fabs(rhs - 10.116332463650294) < 1e-12, detail.str());

        const CriticalCurvePoint crit = critical_stiffness(1.0, 1.0);
        detail.str("");
        detail << "got " << crit.critical_stiffness;
        rep.check("critical stiffness at k=1, d=1",
                  std::fabs(crit.critical_stiffness - 9.038568837868272) < 1e-8, detail.str());
    }

    { // Classification table: 7 parameter-set/k combinations.
        const struct {
            ScaledParams scaled;
            double k;
            bool unstable;
        } cases[] = {
            {{1.0, 0.5, 0.05}, 1.0, true},    {{1.0, 0.5, 0.05}, 2.0, false},
            {{1.0, 0.5, 0.0625}, 0.1, true},  {{1.0, 0.5, 0.0625}, 1.0, false},
            {{0.7, 0.5, 0.0625}, 1.0, true},  {{0.7, 0.5, 0.0625}, 2.0, false},
            {{1.0, 0.5, 0.1}, 1.0, false},
        };
        int agree = 0;
        for (const auto& c : cases) {
            const ModelParams p = to_model(c.scaled, c.k);
            const bool unstable = stiffness_ratio(p) > critical_stiffness(p.k, p.d).critical_stiffness;
            if (unstable == c.unstable) ++agree;
        }
        detail.str("");
        detail << agree << "/7 match";
        rep.check("parameter-table classification", agree == 7, detail.str());
    }

    { // Continuum threshold closed form.
        const double thr = continuum_threshold(1.0);
        detail.str("");
        detail << "got " << thr;
        rep.check("continuum threshold at d_hat=1",
                  std::fabs(thr - 7.4641016151377546) < 1e-12, detail.str());
    }

    { // Bounded drift: frozen quadrature values and the chi/2 bound. In the
      // saturated regime the fixed rule carries ~1e-6 truncation, so the
      // large-gradient expectation is loosened to that scale.
        const double u_small = flux_velocity(0.01, 0.5, 0.05);
        const double u_mid = flux_velocity(0.2, 0.5, 0.05);
        const double u_large = flux_velocity(5.0, 0.5, 0.05);
        detail.str("");
        detail << "U(0.01) = " << u_small << ", U(0.2) = " << u_mid << ", U(5) = " << u_large;
        rep.check("drift quadrature",
                  std::fabs(u_small - 0.03306967641036709) < 1e-12 &&
                      std::fabs(u_mid - 0.23719611956339618) < 1e-12 &&
                      std::fabs(u_large - 0.24997943832416440) < 5e-6 && u_large <= 0.25,
                  detail.str());
    }

    { // Continuum solver vs the linear growth rate (the debug hook perturbs
      // the diffusion constant here; any mismatch trips this check).
        KsConfig kcfg;
        kcfg.d_hat = 1.0;
        kcfg.chi = 0.15811388300841897;     // sqrt(0.1)/2
        kcfg.delta_hat = kcfg.chi / 8.0;    // response slope exactly 8
        kcfg.grid = FieldGrid{500, 0.05};
        kcfg.dt = 0.002;
        kcfg.t_end = 6.0;
        kcfg.snapshot_every = 0.0;
        kcfg.init = KsConfig::Init::mode;
        kcfg.mode_number = 5;
        kcfg.init_amplitude = 1e-4;
        kcfg.diffusion = debug_ks_diffusion > 0.0 ? debug_ks_diffusion : kcfg.diffusion;
        KsSolver solver(kcfg);

        const double k_norm = 1.0;
        const int mode = kcfg.mode_number;
        const SpectrumResult s0 = power_spectrum(solver.rho(), kcfg.grid.dx, k_norm);
        const double a0 = std::sqrt(s0.power[mode]);
        KsRunResult run = solver.run();
        const SpectrumResult s1 =
            power_spectrum(run.snapshots.frames.back().rho, kcfg.grid.dx, k_norm);
        const double a1 = std::sqrt(s1.power[mode]);
        const double measured = std::log(a1 / a0) / kcfg.t_end;
        const double lam = 2.0 * 3.14159265358979323846 * mode / kcfg.grid.length();
        const double predicted = continuum_growth_rate(lam, continuum_params(kcfg));
        detail.str("");
        detail << "measured " << measured << ", predicted " << predicted;
        rep.check("continuum mode growth vs linear theory",
                  std::fabs(measured - predicted) < 0.05 * std::fabs(predicted), detail.str());
    }

    { // RNG stream: velocity samples stay unit speed and reproduce exactly.
        const std::uint64_t key = rng::stream_key(cfg.seed, 0);
        bool ok = true;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const Vec3 v = sample_velocity(rng::uniform01(key, i, 1), rng::uniform01(key, i, 2));
            const double n = v.x * v.x + v.y * v.y + v.z * v.z;
            if (std::fabs(n - 1.0) > 1e-12) ok = false;
        }
        const Vec3 again = sample_velocity(rng::uniform01(key, 17, 1), rng::uniform01(key, 17, 2));
        const Vec3 first = sample_velocity(rng::uniform01(key, 17, 1), rng::uniform01(key, 17, 2));
        ok = ok && again.x == first.x && again.y == first.y && again.z == first.z;
        rep.check("velocity sampling unit speed and determinism", ok, "");
    }

    std::cout << (rep.failures == 0 ? "verify: all checks passed\n"
                                    : "verify: " + std::to_string(rep.failures) + " check(s) failed\n");
    return rep.failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and stability-analysis toolkit for run-and-tumble chemotaxis"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    double debug_ks_diffusion = 0.0;

    app.add_option("-c,--config", config_path, "Config file (INI-style sections)");
    app.add_option("-s,--set", overrides, "Override a config entry as section.key=value (repeatable)");
    app.add_option("--seed", seed, "Random seed (shorthand for run.seed)");
    app.add_option("--threads", threads, "Worker threads (shorthand for run.threads)");
    app.add_option("-o,--out", out_dir, "Output directory (shorthand for run.output_dir)");

    auto* diagram = app.add_subcommand("stability-diagram", "Critical stiffness curves over (k, d/k) grids");
    auto* dispersion = app.add_subcommand("dispersion", "Growth rates over a wavenumber grid");
    auto* classify = app.add_subcommand("classify", "Stability report for one parameter set");
    auto* mc = app.add_subcommand("mc-run", "Stochastic particle simulation");
    auto* ks = app.add_subcommand("ks-run", "Continuum (flux-limited) simulation");
    auto* spectrum = app.add_subcommand("spectrum", "Power spectrum of a stored snapshot file");
    std::string spectrum_input;
    spectrum->add_option("input", spectrum_input, "Snapshot file (CSV or binary)");
    auto* verify = app.add_subcommand("verify", "Built-in self checks against frozen expectations");
    verify->add_option("--debug-ks-diffusion", debug_ks_diffusion, "Perturb the continuum diffusion constant")
        ->group(""); // hidden: mutation hook for testing the checks themselves

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints message or help text
        return code == 0 ? 0 : 1;    // --help exits 0; bad flags are validation errors
    }

    try {
        std::vector<chemotax::ConfigEntry> entries;
        if (const char* env = std::getenv("CHEMOTAX_OUT"); env && *env)
            chemotax::apply_override(entries, std::string("run.output_dir=") + env);
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::invalid_argument("cannot open config file " + config_path);
            auto file_entries = chemotax::parse_ini(is);
            entries.insert(entries.end(), file_entries.begin(), file_entries.end());
        }
        for (const auto& spec : overrides) chemotax::apply_override(entries, spec);
        if (seed) chemotax::apply_override(entries, "run.seed=" + std::to_string(*seed));
        if (threads) chemotax::apply_override(entries, "run.threads=" + std::to_string(*threads));
        if (out_dir) chemotax::apply_override(entries, "run.output_dir=" + *out_dir);
        if (!spectrum_input.empty()) chemotax::apply_override(entries, "spectrum.input=" + spectrum_input);

        std::string mode;
        if (diagram->parsed()) mode = "stability-diagram";
        else if (dispersion->parsed()) mode = "dispersion";
        else if (classify->parsed()) mode = "classify";
        else if (mc->parsed()) mode = "mc-run";
        else if (ks->parsed()) mode = "ks-run";
        else if (spectrum->parsed()) mode = "spectrum";
        else if (verify->parsed()) mode = "verify";
        chemotax::apply_override(entries, "run.mode=" + mode);

        const RunConfig cfg = RunConfig::from_entries(entries);
        switch (cfg.mode) {
            case RunConfig::Mode::stability_diagram: return cmd_stability_diagram(cfg);
            case RunConfig::Mode::dispersion: return cmd_dispersion(cfg);
            case RunConfig::Mode::classify: return cmd_classify(cfg);
            case RunConfig::Mode::mc_run: return cmd_mc_run(cfg);
            case RunConfig::Mode::ks_run: return cmd_ks_run(cfg);
            case RunConfig::Mode::spectrum: return cmd_spectrum(cfg);
            case RunConfig::Mode::verify: return cmd_verify(cfg, debug_ks_diffusion);
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "abort: " << e.what() << "\n";
        return 2;
    }
}
