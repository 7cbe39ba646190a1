#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcstool {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string ConfigMap::get(const std::string& key, const std::string& fallback) {
    consumed.insert(key);
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) {
    consumed.insert(key);
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        errors.push_back(key + ": expected a number, got '" + it->second + "'");
        return fallback;
    }
}

int ConfigMap::get_int(const std::string& key, int fallback) {
    consumed.insert(key);
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        errors.push_back(key + ": expected an integer, got '" + it->second + "'");
        return fallback;
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) {
    consumed.insert(key);
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    errors.push_back(key + ": expected a boolean, got '" + it->second + "'");
    return fallback;
}

std::vector<double> ConfigMap::get_list(const std::string& key, const std::vector<double>& fallback) {
    consumed.insert(key);
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            errors.push_back(key + ": expected a comma-separated number list, got '" + it->second + "'");
            return fallback;
        }
    }
    if (out.empty()) {
        errors.push_back(key + ": empty list");
        return fallback;
    }
    return out;
}

ConfigMap parse_ini(const std::string& text) {
    ConfigMap map;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                map.errors.push_back("line " + std::to_string(line_no) + ": unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            map.errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            map.errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        map.values[section.empty() ? key : section + "." + key] = value;
    }
    return map;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ConfigMap map;
        map.errors.push_back("cannot open config file: " + path);
        return map;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ini(ss.str());
}

RunConfig RunConfig::from_map(const std::string& study, ConfigMap& map) {
    RunConfig cfg;
    cfg.study = study;

    cfg.system.g_f = map.get_double("system.g_f", cfg.system.g_f);
    cfg.system.g = map.get_double("system.g", cfg.system.g_f);
    cfg.system.kappa = map.get_double("system.kappa", cfg.system.kappa);
    cfg.system.gamma = map.get_double("system.gamma", cfg.system.gamma);
    cfg.system.drive1 = map.get_double("system.drive1", cfg.system.drive1);
    cfg.system.drive2 = map.get_double("system.drive2", cfg.system.drive2);
    cfg.system.n_max = map.get_int("system.n_max", cfg.system.n_max);
    cfg.system.m_max = map.get_int("system.m_max", cfg.system.m_max);

    cfg.ensemble = map.get_bool("ensemble.enabled", cfg.ensemble);
    cfg.geometry.g_max = map.get_double("ensemble.g_max", cfg.geometry.g_max);
    cfg.geometry.waist_ratio = map.get_double("ensemble.waist_ratio", cfg.geometry.waist_ratio);
    cfg.geometry.mask_length_fraction =
        map.get_double("ensemble.mask_length_fraction", cfg.geometry.mask_length_fraction);
    cfg.geometry.cutoff = map.get_double("ensemble.cutoff", cfg.geometry.cutoff);
    cfg.dist_nodes = map.get_int("ensemble.nodes", cfg.dist_nodes);
    cfg.dist_samples = map.get_int("ensemble.samples_per_axis", cfg.dist_samples);

    cfg.delta_min = map.get_double("grid.delta_min", cfg.delta_min);
    cfg.delta_max = map.get_double("grid.delta_max", cfg.delta_max);
    cfg.delta_points = map.get_int("grid.delta_points", cfg.delta_points);

    {
        std::stringstream ss(map.get("spectrum.kinds", "w2,diff2"));
        std::string item;
        cfg.kinds.clear();
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.kinds.push_back(item);
        }
    }

    {
        const auto list = map.get_list("mask-study.couplets", {0.0, 1.0, 2.0});
        cfg.mask_couplets.clear();
        for (double v : list) cfg.mask_couplets.push_back(static_cast<int>(v));
    }

    cfg.surface_g_min = map.get_double("pvr-surface.g_min", cfg.surface_g_min);
    cfg.surface_g_max = map.get_double("pvr-surface.g_max", cfg.surface_g_max);
    cfg.surface_g_points = map.get_int("pvr-surface.g_points", cfg.surface_g_points);
    cfg.tau_min = map.get_double("pvr-surface.tau_min", cfg.tau_min);
    cfg.tau_max = map.get_double("pvr-surface.tau_max", cfg.tau_max);
    cfg.tau_points = map.get_int("pvr-surface.tau_points", cfg.tau_points);

    cfg.gamma_list = map.get_list("window-opt.gamma_list", cfg.gamma_list);
    cfg.tau_min = map.get_double("window-opt.tau_min", cfg.tau_min);
    cfg.tau_max = map.get_double("window-opt.tau_max", cfg.tau_max);
    cfg.coarse_points = map.get_int("window-opt.coarse_points", cfg.coarse_points);
    cfg.emit_curve = map.get_bool("window-opt.emit_curve", cfg.emit_curve);
    cfg.curve_gamma = map.get_double("window-opt.curve_gamma", cfg.curve_gamma);
    cfg.curve_points = map.get_int("window-opt.curve_points", cfg.curve_points);

    cfg.out_dir = map.get("run.out_dir", cfg.out_dir);
    cfg.workers = map.get_int("run.workers", cfg.workers);
    cfg.seed = static_cast<unsigned long>(map.get_int("run.seed", static_cast<int>(cfg.seed)));

    // schema: reject unknown keys
    for (const auto& [key, value] : map.values) {
        if (!map.consumed.count(key)) map.errors.push_back(key + ": unknown option");
    }

    // value validation
    if (cfg.system.kappa <= 0) map.errors.push_back("system.kappa: must be > 0");
    if (cfg.system.gamma < 0) map.errors.push_back("system.gamma: must be >= 0");
    if (cfg.system.g_f <= 0) map.errors.push_back("system.g_f: must be > 0");
    if (cfg.system.g <= 0) map.errors.push_back("system.g: must be > 0");
    if (cfg.system.drive1 < 0) map.errors.push_back("system.drive1: must be >= 0");
    if (cfg.system.drive2 < 0) map.errors.push_back("system.drive2: must be >= 0");
    if (cfg.system.n_max < 2) map.errors.push_back("system.n_max: must be >= 2");
    if (cfg.system.m_max < 1) map.errors.push_back("system.m_max: must be >= 1");
    if (cfg.delta_points < 2) map.errors.push_back("grid.delta_points: must be >= 2");
    if (!(cfg.delta_max > cfg.delta_min)) map.errors.push_back("grid.delta_max: must exceed delta_min");
    if (cfg.ensemble) {
        if (cfg.geometry.g_max <= 0) map.errors.push_back("ensemble.g_max: must be > 0");
        if (cfg.geometry.cutoff <= 0 || cfg.geometry.cutoff >= 1)
            map.errors.push_back("ensemble.cutoff: must lie in (0, 1)");
        if (cfg.dist_nodes < 8) map.errors.push_back("ensemble.nodes: must be >= 8");
    }
    if (cfg.tau_min <= 0 || cfg.tau_max <= cfg.tau_min)
        map.errors.push_back("window tau range: need 0 < tau_min < tau_max");
    for (double gm : cfg.gamma_list)
        if (gm < 0) map.errors.push_back("window-opt.gamma_list: gamma must be >= 0");
    if (cfg.study == "spectrum") {
        std::vector<std::string> kind_errors;
        (void)cfg.parsed_kinds(&kind_errors);
        for (auto& e : kind_errors) map.errors.push_back(e);
    }
    return cfg;
}

std::vector<pcs::RateKind> RunConfig::parsed_kinds(std::vector<std::string>* errors) const {
    std::vector<pcs::RateKind> out;
    for (const auto& name : kinds) {
        if (name == "w2") out.push_back(pcs::RateKind::w2);
        else if (name == "diff2") out.push_back(pcs::RateKind::diff2);
        else if (name == "a3_moment") out.push_back(pcs::RateKind::three_a3);
        else if (name == "sa2_moment") out.push_back(pcs::RateKind::three_sa2);
        else if (name == "diff23") out.push_back(pcs::RateKind::diff23);
        else if (errors) errors->push_back("spectrum.kinds: unknown kind '" + name + "'");
    }
    return out;
}

std::vector<double> RunConfig::delta_grid() const {
    std::vector<double> grid(static_cast<std::size_t>(delta_points));
    for (int i = 0; i < delta_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            delta_min + (delta_max - delta_min) * double(i) / double(delta_points - 1);
    return grid;
}

std::map<std::string, std::string> RunConfig::resolved() const {
    std::map<std::string, std::string> out;
    out["study"] = study;
    out["system.g_f"] = fmt_double(system.g_f);
    out["system.g"] = fmt_double(system.g);
    out["system.kappa"] = fmt_double(system.kappa);
    out["system.gamma"] = fmt_double(system.gamma);
    out["system.drive1"] = fmt_double(system.drive1);
    out["system.drive2"] = fmt_double(system.drive2);
    out["system.n_max"] = std::to_string(system.n_max);
    out["system.m_max"] = std::to_string(system.m_max);
    out["ensemble.enabled"] = ensemble ? "true" : "false";
    out["ensemble.g_max"] = fmt_double(geometry.g_max);
    out["ensemble.waist_ratio"] = fmt_double(geometry.waist_ratio);
    out["ensemble.mask_length_fraction"] = fmt_double(geometry.mask_length_fraction);
    out["ensemble.cutoff"] = fmt_double(geometry.cutoff);
    out["ensemble.nodes"] = std::to_string(dist_nodes);
    out["ensemble.samples_per_axis"] = std::to_string(dist_samples);
    out["grid.delta_min"] = fmt_double(delta_min);
    out["grid.delta_max"] = fmt_double(delta_max);
    out["grid.delta_points"] = std::to_string(delta_points);
    {
        std::string joined;
        for (const auto& k : kinds) joined += (joined.empty() ? "" : ",") + k;
        out["spectrum.kinds"] = joined;
    }
    {
        std::string joined;
        for (int c : mask_couplets) joined += (joined.empty() ? "" : ",") + std::to_string(c);
        out["mask-study.couplets"] = joined;
    }
    out["pvr-surface.g_min"] = fmt_double(surface_g_min);
    out["pvr-surface.g_max"] = fmt_double(surface_g_max);
    out["pvr-surface.g_points"] = std::to_string(surface_g_points);
    out["pvr-surface.tau_min"] = fmt_double(tau_min);
    out["pvr-surface.tau_max"] = fmt_double(tau_max);
    out["pvr-surface.tau_points"] = std::to_string(tau_points);
    {
        std::string joined;
        for (double gm : gamma_list) joined += (joined.empty() ? "" : ",") + fmt_double(gm);
        out["window-opt.gamma_list"] = joined;
    }
    out["window-opt.coarse_points"] = std::to_string(coarse_points);
    out["window-opt.emit_curve"] = emit_curve ? "true" : "false";
    out["window-opt.curve_gamma"] = fmt_double(curve_gamma);
    out["window-opt.curve_points"] = std::to_string(curve_points);
    out["run.seed"] = std::to_string(seed);
    return out;
}

} // namespace pcstool
