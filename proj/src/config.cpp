#include "chemotax/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace chemotax {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const ConfigEntry& e, const std::string& why) {
    throw std::invalid_argument("config: " + e.section + "." + e.key + " = \"" + e.value + "\": " + why);
}

double parse_double(const ConfigEntry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_value(e, "expected a number");
    }
}

int parse_int(const ConfigEntry& e) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        bad_value(e, "expected an integer");
    }
}

std::uint64_t parse_u64(const ConfigEntry& e) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_value(e, "expected a non-negative integer");
    }
}

bool parse_bool(const ConfigEntry& e) {
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(e, "expected a boolean");
}

std::vector<double> parse_double_list(const ConfigEntry& e) {
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) bad_value(e, "empty list element");
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            bad_value(e, "expected comma-separated numbers");
        }
    }
    if (out.empty()) bad_value(e, "expected a non-empty list");
    return out;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_double_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += format_double(vs[i]);
    }
    return out;
}

} // namespace

std::vector<ConfigEntry> parse_ini(std::istream& is) {
    std::vector<ConfigEntry> entries;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        ConfigEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

void apply_override(std::vector<ConfigEntry>& entries, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override \"" + spec + "\": expected section.key=value");
    const std::string path = trim(spec.substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw std::invalid_argument("override \"" + spec + "\": expected section.key=value");
    ConfigEntry e;
    e.section = path.substr(0, dot);
    e.key = path.substr(dot + 1);
    e.value = trim(spec.substr(eq + 1));
    entries.push_back(std::move(e));
}

std::string to_string(RunConfig::Mode m) {
    switch (m) {
        case RunConfig::Mode::stability_diagram: return "stability-diagram";
        case RunConfig::Mode::dispersion: return "dispersion";
        case RunConfig::Mode::classify: return "classify";
        case RunConfig::Mode::mc_run: return "mc-run";
        case RunConfig::Mode::ks_run: return "ks-run";
        case RunConfig::Mode::spectrum: return "spectrum";
        case RunConfig::Mode::verify: return "verify";
    }
    throw std::logic_error("to_string: bad mode");
}

RunConfig::Mode mode_from_string(const std::string& s) {
    for (auto m : {RunConfig::Mode::stability_diagram, RunConfig::Mode::dispersion, RunConfig::Mode::classify,
                   RunConfig::Mode::mc_run, RunConfig::Mode::ks_run, RunConfig::Mode::spectrum,
                   RunConfig::Mode::verify})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("config: unknown mode \"" + s + "\"");
}

RunConfig RunConfig::from_entries(const std::vector<ConfigEntry>& entries) {
    RunConfig c;
    bool saw_raw = false, saw_scaled = false;
    double mc_length = c.mc.grid.length();
    int mc_sites = c.mc.grid.sites;
    double ks_length = c.ks.grid.length();
    int ks_sites = c.ks.grid.sites;

    for (const auto& e : entries) {
        const std::string full = e.section + "." + e.key;
        if (full == "run.mode") c.mode = mode_from_string(e.value);
        else if (full == "run.seed") c.seed = parse_u64(e);
        else if (full == "run.threads") c.threads = parse_int(e);
        else if (full == "run.output_dir") c.output_dir = e.value;
        else if (full == "run.format") {
            if (e.value == "csv") c.format = Format::csv;
            else if (e.value == "binary") c.format = Format::binary;
            else bad_value(e, "expected csv or binary");
        }
        else if (full == "run.write_spacetime") c.write_spacetime = parse_bool(e);
        else if (full == "model.k") c.params.k = parse_double(e);
        else if (full == "model.d") { c.params.d = parse_double(e); saw_raw = true; }
        else if (full == "model.chi") { c.params.chi = parse_double(e); saw_raw = true; }
        else if (full == "model.delta") { c.params.delta = parse_double(e); saw_raw = true; }
        else if (full == "model.d_over_k") { c.scaled.d_over_k = parse_double(e); saw_scaled = true; }
        else if (full == "model.chi_over_sqrt_k") { c.scaled.chi_over_sqrt_k = parse_double(e); saw_scaled = true; }
        else if (full == "model.sqrt_k_delta") { c.scaled.sqrt_k_delta = parse_double(e); saw_scaled = true; }
        else if (full == "mc.sites") mc_sites = parse_int(e);
        else if (full == "mc.domain_length") mc_length = parse_double(e);
        else if (full == "mc.dt") c.mc.dt = parse_double(e);
        else if (full == "mc.particles_per_site") c.mc.particles_per_site = parse_int(e);
        else if (full == "mc.t_end") c.mc.t_end = parse_double(e);
        else if (full == "mc.snapshot_every") c.mc.snapshot_every = parse_double(e);
        else if (full == "mc.growth") c.mc.growth_enabled = parse_bool(e);
        else if (full == "mc.tumbling") c.mc.tumbling_enabled = parse_bool(e);
        else if (full == "ks.d_hat") c.ks.d_hat = parse_double(e);
        else if (full == "ks.chi") c.ks.chi = parse_double(e);
        else if (full == "ks.delta_hat") c.ks.delta_hat = parse_double(e);
        else if (full == "ks.sites") ks_sites = parse_int(e);
        else if (full == "ks.domain_length") ks_length = parse_double(e);
        else if (full == "ks.dt") c.ks.dt = parse_double(e);
        else if (full == "ks.t_end") c.ks.t_end = parse_double(e);
        else if (full == "ks.snapshot_every") c.ks.snapshot_every = parse_double(e);
        else if (full == "ks.growth") c.ks.growth_enabled = parse_bool(e);
        else if (full == "ks.diffusion") c.ks.diffusion = parse_double(e);
        else if (full == "ks.init") {
            if (e.value == "noise") c.ks.init = KsConfig::Init::noise;
            else if (e.value == "mode") c.ks.init = KsConfig::Init::mode;
            else bad_value(e, "expected noise or mode");
        }
        else if (full == "ks.init_amplitude") c.ks.init_amplitude = parse_double(e);
        else if (full == "ks.mode_number") c.ks.mode_number = parse_int(e);
        else if (full == "spectrum.input") c.spectrum_input = e.value;
        else if (full == "spectrum.window_start") c.window_start = parse_double(e);
        else if (full == "spectrum.window_end") c.window_end = parse_double(e);
        else if (full == "spectrum.interval") c.window_interval = parse_double(e);
        else if (full == "spectrum.lambda_max") c.lambda_max = parse_double(e);
        else if (full == "dispersion.lambda_min") c.disp_lambda_min = parse_double(e);
        else if (full == "dispersion.lambda_max") c.disp_lambda_max = parse_double(e);
        else if (full == "dispersion.count") c.disp_count = parse_int(e);
        else if (full == "diagram.k_values") c.diagram_k = parse_double_list(e);
        else if (full == "diagram.d_over_k") c.diagram_d_over_k = parse_double(e);
        else if (full == "diagram.d_hat_min") c.diagram_dhat_min = parse_double(e);
        else if (full == "diagram.d_hat_max") c.diagram_dhat_max = parse_double(e);
        else if (full == "diagram.d_hat_count") c.diagram_dhat_count = parse_int(e);
        else throw std::invalid_argument("config: unknown key \"" + full + "\"" +
                                         (e.line ? " (line " + std::to_string(e.line) + ")" : ""));
    }

    if (saw_raw && saw_scaled)
        throw std::invalid_argument(
            "config: model given both raw (d/chi/delta) and scaled (d_over_k/chi_over_sqrt_k/sqrt_k_delta) forms");
    c.scaled_form = saw_scaled || !saw_raw; // scaled triple is the default spelling
    if (c.scaled_form) c.params = to_model(c.scaled, c.params.k);
    else c.scaled = to_scaled(c.params);
    validate(c.params);

    if (mc_sites < 4) throw std::invalid_argument("config: mc.sites must be >= 4");
    if (!(mc_length > 0.0)) throw std::invalid_argument("config: mc.domain_length must be > 0");
    c.mc.grid = FieldGrid{mc_sites, mc_length / mc_sites};
    if (ks_sites < 4) throw std::invalid_argument("config: ks.sites must be >= 4");
    if (!(ks_length > 0.0)) throw std::invalid_argument("config: ks.domain_length must be > 0");
    c.ks.grid = FieldGrid{ks_sites, ks_length / ks_sites};

    if (c.threads < 1) throw std::invalid_argument("config: run.threads must be >= 1");
    c.mc.params = c.params;
    c.mc.seed = c.seed;
    c.mc.threads = c.threads;
    c.ks.seed = c.seed;

    // Semantic validation of the sub-config the mode will actually drive.
    switch (c.mode) {
        case Mode::mc_run: validate(c.mc); break;
        case Mode::ks_run: validate(c.ks); break;
        case Mode::dispersion:
            if (!(c.disp_lambda_min > 0.0) || !(c.disp_lambda_max > c.disp_lambda_min) || c.disp_count < 2)
                throw std::invalid_argument("config: dispersion grid requires 0 < lambda_min < lambda_max, count >= 2");
            break;
        case Mode::stability_diagram:
            for (double k : c.diagram_k)
                if (!(k > 0.0)) throw std::invalid_argument("config: diagram.k_values must be positive");
            if (!(c.diagram_d_over_k > 0.0)) throw std::invalid_argument("config: diagram.d_over_k must be > 0");
            if (!(c.diagram_dhat_min > 0.0) || !(c.diagram_dhat_max >= c.diagram_dhat_min) || c.diagram_dhat_count < 1)
                throw std::invalid_argument("config: diagram d_hat grid invalid");
            break;
        default: break;
    }
    if (c.window_interval <= 0.0) throw std::invalid_argument("config: spectrum.interval must be > 0");
    if (!(c.lambda_max > 0.0)) throw std::invalid_argument("config: spectrum.lambda_max must be > 0");
    return c;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&](const std::string& k, const std::string& v) { out.emplace_back(k, v); };
    add("run.mode", to_string(mode));
    add("run.seed", std::to_string(seed));
    add("run.threads", std::to_string(threads));
    add("run.output_dir", output_dir);
    add("run.format", format == Format::csv ? "csv" : "binary");
    add("run.write_spacetime", write_spacetime ? "true" : "false");
    add("model.k", format_double(params.k));
    if (scaled_form) {
        add("model.d_over_k", format_double(scaled.d_over_k));
        add("model.chi_over_sqrt_k", format_double(scaled.chi_over_sqrt_k));
        add("model.sqrt_k_delta", format_double(scaled.sqrt_k_delta));
    } else {
        add("model.d", format_double(params.d));
        add("model.chi", format_double(params.chi));
        add("model.delta", format_double(params.delta));
    }
    add("mc.sites", std::to_string(mc.grid.sites));
    add("mc.domain_length", format_double(mc.grid.length()));
    add("mc.dt", format_double(mc.dt));
    add("mc.particles_per_site", std::to_string(mc.particles_per_site));
    add("mc.t_end", format_double(mc.t_end));
    add("mc.snapshot_every", format_double(mc.snapshot_every));
    add("mc.growth", mc.growth_enabled ? "true" : "false");
    add("mc.tumbling", mc.tumbling_enabled ? "true" : "false");
    add("ks.d_hat", format_double(ks.d_hat));
    add("ks.chi", format_double(ks.chi));
    add("ks.delta_hat", format_double(ks.delta_hat));
    add("ks.sites", std::to_string(ks.grid.sites));
    add("ks.domain_length", format_double(ks.grid.length()));
    add("ks.dt", format_double(ks.dt));
    add("ks.t_end", format_double(ks.t_end));
    add("ks.snapshot_every", format_double(ks.snapshot_every));
    add("ks.growth", ks.growth_enabled ? "true" : "false");
    add("ks.diffusion", format_double(ks.diffusion));
    add("ks.init", ks.init == KsConfig::Init::noise ? "noise" : "mode");
    add("ks.init_amplitude", format_double(ks.init_amplitude));
    add("ks.mode_number", std::to_string(ks.mode_number));
    if (!spectrum_input.empty()) add("spectrum.input", spectrum_input);
    add("spectrum.window_start", format_double(window_start));
    add("spectrum.window_end", format_double(window_end));
    add("spectrum.interval", format_double(window_interval));
    add("spectrum.lambda_max", format_double(lambda_max));
    add("dispersion.lambda_min", format_double(disp_lambda_min));
    add("dispersion.lambda_max", format_double(disp_lambda_max));
    add("dispersion.count", std::to_string(disp_count));
    add("diagram.k_values", format_double_list(diagram_k));
    add("diagram.d_over_k", format_double(diagram_d_over_k));
    add("diagram.d_hat_min", format_double(diagram_dhat_min));
    add("diagram.d_hat_max", format_double(diagram_dhat_max));
    add("diagram.d_hat_count", std::to_string(diagram_dhat_count));
    return out;
}

std::string serialize(const RunConfig& cfg) {
    std::string out;
    std::string current;
    for (const auto& [path, value] : cfg.resolved()) {
        const auto dot = path.find('.');
        const std::string section = path.substr(0, dot);
        const std::string key = path.substr(dot + 1);
        if (section != current) {
            if (!out.empty()) out += "\n";
            out += "[" + section + "]\n";
            current = section;
        }
        out += key + " = " + value + "\n";
    }
    return out;
}

} // namespace chemotax
