#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chemotax/ks.hpp"
#include "chemotax/mc.hpp"
#include "chemotax/model.hpp"

namespace chemotax {

// One "key = value" line of a config file, qualified by its [section].
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

// Parses INI-style text: [section] headers, key = value lines, '#' or ';'
// comments. Throws std::invalid_argument with line numbers on syntax errors.
std::vector<ConfigEntry> parse_ini(std::istream& is);

// "section.key=value" (CLI override spelling) appended to an entry list.
void apply_override(std::vector<ConfigEntry>& entries, const std::string& spec);

// Fully resolved run description. Unknown keys, conflicting model spellings
// (raw d/chi/delta mixed with the scaled triple) and invalid values are
// rejected at resolve time with the offending key named.
struct RunConfig {
    enum class Mode { stability_diagram, dispersion, classify, mc_run, ks_run, spectrum, verify };
    enum class Format { csv, binary };

    Mode mode = Mode::verify;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = "out";
    Format format = Format::csv;
    bool write_spacetime = false;

    ModelParams params{};      // resolved model parameters
    bool scaled_form = false;  // true when given as (d/k, chi/sqrt k, sqrt k delta)
    ScaledParams scaled{1.0, 0.5, 0.1};

    McConfig mc{};  // params, seed and threads are copied in at resolve time
    KsConfig ks{};

    double window_start = -1.0;  // -1: last quarter of the run
    double window_end = -1.0;    // -1: end of the run
    double window_interval = 4.0;
    double lambda_max = 10.0;
    std::string spectrum_input;

    double disp_lambda_min = 0.5;
    double disp_lambda_max = 10.0;
    int disp_count = 200;

    std::vector<double> diagram_k{0.1, 1.0, 2.0, 10.0};
    double diagram_d_over_k = 1.0;
    double diagram_dhat_min = 0.1;
    double diagram_dhat_max = 10.0;
    int diagram_dhat_count = 20;

    static RunConfig from_entries(const std::vector<ConfigEntry>& entries);

    // Canonical "section.key" -> value pairs of every resolved field, used
    // for file headers and for serialization.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

std::string to_string(RunConfig::Mode m);
RunConfig::Mode mode_from_string(const std::string& s);

// Canonical INI text; parse_ini(serialize(cfg)) resolves to an identical
// RunConfig (round-trip property).
std::string serialize(const RunConfig& cfg);

} // namespace chemotax
