// config.hpp — run configuration: flat INI-style file with one section per
// concern, overridable from the command line.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcs/ensemble.hpp"
#include "pcs/params.hpp"

namespace pcstool {

// Raw key-value view of a config file: "section.key" -> value string.
struct ConfigMap {
    std::map<std::string, std::string> values;
    std::vector<std::string> errors;  // accumulated schema violations

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback);

    std::set<std::string> consumed;  // keys read so far, for schema checking
};

ConfigMap parse_ini(const std::string& text);
ConfigMap load_config_file(const std::string& path);

struct RunConfig {
    std::string study;
    pcs::SystemParams system;
    pcs::MaskGeometry geometry;
    bool ensemble = true;
    int dist_nodes = 20;
    int dist_samples = 1000;

    double delta_min = -2.0;
    double delta_max = 4.0;
    int delta_points = 200;
    std::vector<std::string> kinds = {"w2", "diff2"};

    std::vector<int> mask_couplets = {0, 1, 2};

    double surface_g_min = 3.0;
    double surface_g_max = 10.0;
    int surface_g_points = 15;
    double tau_min = 1e-3;
    double tau_max = 10.0;
    int tau_points = 40;

    std::vector<double> gamma_list = {0.2, 2.0, 5.0, 7.0, 10.0};
    int coarse_points = 25;
    bool emit_curve = true;
    double curve_gamma = 2.0;
    int curve_points = 60;

    std::string out_dir = "out";
    int workers = 0;
    unsigned long seed = 1;

    // populated from a ConfigMap; schema errors land in errors
    static RunConfig from_map(const std::string& study, ConfigMap& map);

    std::vector<pcs::RateKind> parsed_kinds(std::vector<std::string>* errors) const;
    std::vector<double> delta_grid() const;
    // canonical key-value form, used for the sidecar and resume comparison
    std::map<std::string, std::string> resolved() const;
};

} // namespace pcstool
