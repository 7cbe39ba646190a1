#include "studies.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csvio.hpp"
#include "pcs/parallel.hpp"
#include "pcs/pvr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pcs;

namespace pcstool {

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) table.columns.push_back(col);
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
        }
        if (row.size() != table.columns.size())
            throw std::runtime_error("ragged csv row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

constexpr const char* kVersion = "0.1.0";

json sidecar_json(const RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["study"] = cfg.study;
    json conf;
    for (const auto& [key, value] : cfg.resolved()) conf[key] = value;
    j["config"] = conf;
    return j;
}

// a completed run with identical resolved config is a no-op without --force
bool up_to_date(const RunConfig& cfg, const fs::path& sidecar_path) {
    std::ifstream in(sidecar_path);
    if (!in) return false;
    json existing;
    try {
        in >> existing;
    } catch (const json::exception&) {
        return false;
    }
    return existing.value("study", "") == cfg.study && existing["config"] == sidecar_json(cfg)["config"];
}

void write_sidecar(const RunConfig& cfg, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << sidecar_json(cfg).dump(2) << '\n';
}

CouplingDistribution make_distribution(const RunConfig& cfg) {
    if (!cfg.ensemble) return point_distribution(cfg.system.g);
    return build_distribution(cfg.geometry, cfg.dist_nodes, cfg.dist_samples);
}

int finish(const RunConfig& cfg, const fs::path& sidecar, const std::vector<std::string>& cell_errors) {
    write_sidecar(cfg, sidecar);
    if (!cell_errors.empty()) {
        std::fprintf(stderr, "%zu cell(s) failed:\n", cell_errors.size());
        for (const auto& e : cell_errors) std::fprintf(stderr, "  %s\n", e.c_str());
        return 1;
    }
    return 0;
}

int study_spectrum(const RunConfig& cfg, const fs::path& dir) {
    std::vector<std::string> kind_errors;
    const std::vector<RateKind> kinds = cfg.parsed_kinds(&kind_errors);
    if (!kind_errors.empty() || kinds.empty()) return 2;
    const CouplingDistribution dist = make_distribution(cfg);
    const SpectrumTable table =
        spectrum_sweep(cfg.system, cfg.delta_grid(), dist, kinds, {}, cfg.workers);

    std::vector<std::string> columns = {"delta_tilde"};
    for (RateKind k : kinds) columns.push_back(rate_kind_name(k));
    CsvWriter csv((dir / "spectrum.csv").string(), columns);
    for (const auto& row : table.rows) {
        std::vector<double> vals = {row.delta_tilde};
        for (RateKind k : kinds) vals.push_back(row.values.at(k));
        csv.row(vals);
    }
    if (cfg.ensemble) {
        std::ofstream dist_out(dir / "distribution.csv", std::ios::binary);
        write_csv(dist, dist_out);
    }
    return finish(cfg, dir / "spectrum.meta.json", table.cell_errors);
}

int study_three_photon(const RunConfig& cfg, const fs::path& dir) {
    const CouplingDistribution dist = make_distribution(cfg);
    const SpectrumTable table = spectrum_sweep(cfg.system, cfg.delta_grid(), dist,
                                               {RateKind::three_a3, RateKind::three_sa2}, {}, cfg.workers);
    CsvWriter csv((dir / "three_photon.csv").string(), {"delta_tilde", "a3_moment", "sa2_moment"});
    for (const auto& row : table.rows)
        csv.row({row.delta_tilde, row.values.at(RateKind::three_a3), row.values.at(RateKind::three_sa2)});
    return finish(cfg, dir / "three_photon.meta.json", table.cell_errors);
}

int study_mask(const RunConfig& cfg, const fs::path& dir) {
    // one series per (transition, field): couplet n to n+1 for each sign pair
    struct Series {
        std::string name;
        TransitionMask mask;
    };
    std::vector<Series> series;
    auto label = [](const DressedLabel& l) { return l.str(); };
    for (int n : cfg.mask_couplets) {
        std::vector<DressedLabel> from_labels;
        if (n == 0) from_labels = {DressedLabel::grd()};
        else from_labels = {DressedLabel::minus(n), DressedLabel::plus(n)};
        const std::vector<DressedLabel> to_labels = {DressedLabel::minus(n + 1), DressedLabel::plus(n + 1)};
        for (const auto& from : from_labels)
            for (const auto& to : to_labels)
                for (DriveField field : {DriveField::drive1, DriveField::drive2}) {
                    Series s;
                    s.name = "mask_" + label(from) + "_" + label(to) + "_" +
                             (field == DriveField::drive1 ? "f1" : "f2");
                    s.mask = {{from, to, field}};
                    series.push_back(std::move(s));
                }
    }
    for (int n : cfg.mask_couplets)
        if (n + 1 > cfg.system.n_max) return 2;

    const CouplingDistribution dist = make_distribution(cfg);
    const std::vector<double> grid = cfg.delta_grid();

    std::vector<SpectrumTable> tables(series.size() + 1);
    std::vector<std::string> errors;
    // the per-cell solver already parallelizes; run series sequentially
    tables[0] = spectrum_sweep(cfg.system, grid, dist, {RateKind::three_a3}, {}, cfg.workers);
    for (std::size_t s = 0; s < series.size(); ++s)
        tables[s + 1] =
            spectrum_sweep(cfg.system, grid, dist, {RateKind::three_a3}, series[s].mask, cfg.workers);

    std::vector<std::string> columns = {"delta_tilde", "baseline"};
    for (const auto& s : series) columns.push_back(s.name);
    CsvWriter csv((dir / "mask_study.csv").string(), columns);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row = {grid[i]};
        for (const auto& table : tables) row.push_back(table.rows[i].values.at(RateKind::three_a3));
        csv.row(row);
    }
    for (const auto& table : tables)
        errors.insert(errors.end(), table.cell_errors.begin(), table.cell_errors.end());
    return finish(cfg, dir / "mask_study.meta.json", errors);
}

int study_pvr_surface(const RunConfig& cfg, const fs::path& dir) {
    std::vector<double> gs(static_cast<std::size_t>(cfg.surface_g_points));
    for (int i = 0; i < cfg.surface_g_points; ++i)
        gs[static_cast<std::size_t>(i)] = cfg.surface_g_min + (cfg.surface_g_max - cfg.surface_g_min) *
                                                                  double(i) /
                                                                  double(std::max(cfg.surface_g_points - 1, 1));
    std::vector<double> taus(static_cast<std::size_t>(cfg.tau_points));
    for (int i = 0; i < cfg.tau_points; ++i)
        taus[static_cast<std::size_t>(i)] =
            cfg.tau_min * std::pow(cfg.tau_max / cfg.tau_min, double(i) / double(std::max(cfg.tau_points - 1, 1)));

    std::vector<std::string> cell_errors(gs.size());
    std::vector<std::vector<double>> rows(gs.size());
    parallel_for(gs.size(), cfg.workers, [&](std::size_t i) {
        try {
            const PvrEvaluator eval(cfg.system, point_distribution(gs[i]), cfg.tau_max, 8, 1);
            for (double tau : taus) {
                rows[i].push_back(eval.pvr(tau, WindowKind::conditional));
                rows[i].push_back(eval.pvr(tau, WindowKind::unconditional));
            }
        } catch (const std::exception& ex) {
            rows[i].assign(taus.size() * 2, std::nan(""));
            cell_errors[i] = "g=" + std::to_string(gs[i]) + ": " + ex.what();
        }
    });
    std::vector<std::string> errors;
    for (const auto& e : cell_errors)
        if (!e.empty()) errors.push_back(e);

    CsvWriter csv((dir / "pvr_surface.csv").string(), {"g", "tau_w", "pvr_con", "pvr_unc"});
    for (std::size_t i = 0; i < gs.size(); ++i)
        for (std::size_t j = 0; j < taus.size(); ++j)
            csv.row({gs[i], taus[j], rows[i][2 * j], rows[i][2 * j + 1]});
    return finish(cfg, dir / "pvr_surface.meta.json", errors);
}

int study_window_opt(const RunConfig& cfg, const fs::path& dir) {
    const CouplingDistribution dist = make_distribution(cfg);
    WindowBracket bracket;
    bracket.tau_lo = cfg.tau_min;
    bracket.tau_hi = cfg.tau_max;
    bracket.coarse_points = cfg.coarse_points;

    std::vector<std::string> errors;
    const GammaSweepResult sweep =
        gamma_sweep_fit(cfg.gamma_list, cfg.system, dist, bracket, 8, cfg.workers);

    {
        CsvWriter csv((dir / "window_opt.csv").string(),
                      {"gamma", "tau_opt_con", "pvr_con", "tau_opt_unc", "pvr_unc"});
        for (const auto& pt : sweep.points) {
            if (!pt.ok) {
                errors.push_back("gamma=" + std::to_string(pt.gamma) + ": " + pt.error);
                csv.row({pt.gamma, std::nan(""), std::nan(""), std::nan(""), std::nan("")});
                continue;
            }
            csv.row({pt.gamma, pt.con.tau_opt, pt.con.pvr_max, pt.unc.tau_opt, pt.unc.pvr_max});
        }
    }
    {
        CsvWriter csv((dir / "window_fit.csv").string(), {"kind", "slope", "intercept", "correlation", "n_used"});
        csv.row({0.0, sweep.fit_con.slope, sweep.fit_con.intercept, sweep.fit_con.correlation,
                 double(sweep.fit_con.n_used)});
        csv.row({1.0, sweep.fit_unc.slope, sweep.fit_unc.intercept, sweep.fit_unc.correlation,
                 double(sweep.fit_unc.n_used)});
    }
    if (cfg.emit_curve) {
        const PvrEvaluator eval(cfg.system.with_gamma(cfg.curve_gamma), dist, cfg.tau_max, 8, cfg.workers);
        CsvWriter csv((dir / "pvr_curve.csv").string(), {"tau_w", "pvr_con", "pvr_unc"});
        for (int i = 0; i < cfg.curve_points; ++i) {
            const double tau = cfg.tau_min * std::pow(cfg.tau_max / cfg.tau_min,
                                                      double(i) / double(cfg.curve_points - 1));
            csv.row({tau, eval.pvr(tau, WindowKind::conditional), eval.pvr(tau, WindowKind::unconditional)});
        }
    }
    return finish(cfg, dir / "window_opt.meta.json", errors);
}

} // namespace

int run_study(const RunConfig& cfg, bool force) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::fprintf(stderr, "cannot create output directory %s\n", dir.string().c_str());
        return 2;
    }

    const std::map<std::string, std::string> sidecars = {
        {"spectrum", "spectrum.meta.json"},       {"three-photon", "three_photon.meta.json"},
        {"mask-study", "mask_study.meta.json"},   {"pvr-surface", "pvr_surface.meta.json"},
        {"window-opt", "window_opt.meta.json"},
    };
    const auto it = sidecars.find(cfg.study);
    if (it == sidecars.end()) {
        std::fprintf(stderr, "unknown study: %s\n", cfg.study.c_str());
        return 2;
    }
    if (!force && up_to_date(cfg, dir / it->second)) {
        std::printf("%s: up to date in %s (use --force to rerun)\n", cfg.study.c_str(),
                    dir.string().c_str());
        return 0;
    }

    if (cfg.study == "spectrum") return study_spectrum(cfg, dir);
    if (cfg.study == "three-photon") return study_three_photon(cfg, dir);
    if (cfg.study == "mask-study") return study_mask(cfg, dir);
    if (cfg.study == "pvr-surface") return study_pvr_surface(cfg, dir);
    if (cfg.study == "window-opt") return study_window_opt(cfg, dir);
    return 2;
}

} // namespace pcstool
