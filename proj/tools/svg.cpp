#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csvio.hpp"
#include "pcs/ensemble.hpp"
#include "studies.hpp"

namespace fs = std::filesystem;

namespace pcstool {

namespace {

constexpr double kW = 760, kH = 520;
constexpr double kL = 70, kR = 20, kT = 28, kB = 46;  // margins
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Axis {
    double lo = 0, hi = 1;
    bool log = false;

    double место(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double x = log ? std::log10(v) : v;
        return (x - a) / (b - a);
    }
};

std::string num_label(double v) {
    char buf[32];
    if (v != 0 && (std::abs(v) < 1e-3 || std::abs(v) >= 1e4)) std::snprintf(buf, sizeof buf, "%.1e", v);
    else std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class SvgPlot {
  public:
    SvgPlot(const std::string& title, Axis x, Axis y) : x_(x), y_(y) {
        svg_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
             << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
        svg_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg_ << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title
             << "</text>\n";
        svg_ << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
             << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
        ticks();
    }

    double px(double v) const { return kL + x_.место(v) * (kW - kL - kR); }
    double py(double v) const { return kH - kB - y_.место(v) * (kH - kT - kB); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  bool dashed = false) {
        if (pts.empty()) return;
        svg_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\"";
        if (dashed) svg_ << " stroke-dasharray=\"5,4\"";
        svg_ << " points=\"";
        for (const auto& [x, y] : pts) svg_ << px(x) << ',' << py(y) << ' ';
        svg_ << "\"/>\n";
    }

    void markers(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        for (const auto& [x, y] : pts)
            svg_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
                 << "\"/>\n";
    }

    void vline(double x, const std::string& color, bool dashed) {
        if (x < x_.lo || x > x_.hi) return;
        svg_ << "<line x1=\"" << px(x) << "\" y1=\"" << kT << "\" x2=\"" << px(x) << "\" y2=\""
             << kH - kB << "\" stroke=\"" << color << "\" stroke-width=\"0.8\""
             << (dashed ? " stroke-dasharray=\"3,3\"" : "") << "/>\n";
    }

    void cell(double x0, double x1, double y0, double y1, const std::string& color) {
        const double a = px(x0), b = px(x1);
        const double c = py(y1), d = py(y0);
        svg_ << "<rect x=\"" << a << "\" y=\"" << c << "\" width=\"" << b - a << "\" height=\"" << d - c
             << "\" fill=\"" << color << "\" stroke=\"none\"/>\n";
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        double y = kT + 16;
        for (const auto& [name, color] : entries) {
            svg_ << "<line x1=\"" << kW - kR - 150 << "\" y1=\"" << y << "\" x2=\"" << kW - kR - 122
                 << "\" y2=\"" << y << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            svg_ << "<text x=\"" << kW - kR - 116 << "\" y=\"" << y + 4 << "\" font-size=\"12\">" << name
                 << "</text>\n";
            y += 16;
        }
    }

    void axis_labels(const std::string& xlabel, const std::string& ylabel) {
        svg_ << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 10
             << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
        svg_ << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
             << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
             << (kT + kH - kB) / 2 << ")\">" << ylabel << "</text>\n";
    }

    void write(const std::string& path) {
        svg_ << "</svg>\n";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << svg_.str();
    }

  private:
    void ticks() {
        for (int i = 0; i <= 5; ++i) {
            const double fx = double(i) / 5.0;
            const double vx = x_.log ? std::pow(10.0, std::log10(x_.lo) + fx * (std::log10(x_.hi) - std::log10(x_.lo)))
                                     : x_.lo + fx * (x_.hi - x_.lo);
            const double X = kL + fx * (kW - kL - kR);
            svg_ << "<line x1=\"" << X << "\" y1=\"" << kH - kB << "\" x2=\"" << X << "\" y2=\""
                 << kH - kB + 5 << "\" stroke=\"black\"/>\n";
            svg_ << "<text x=\"" << X << "\" y=\"" << kH - kB + 18
                 << "\" text-anchor=\"middle\" font-size=\"11\">" << num_label(vx) << "</text>\n";
            const double vy = y_.log ? std::pow(10.0, std::log10(y_.lo) + fx * (std::log10(y_.hi) - std::log10(y_.lo)))
                                     : y_.lo + fx * (y_.hi - y_.lo);
            const double Y = kH - kB - fx * (kH - kT - kB);
            svg_ << "<line x1=\"" << kL - 5 << "\" y1=\"" << Y << "\" x2=\"" << kL << "\" y2=\"" << Y
                 << "\" stroke=\"black\"/>\n";
            svg_ << "<text x=\"" << kL - 8 << "\" y=\"" << Y + 4
                 << "\" text-anchor=\"end\" font-size=\"11\">" << num_label(vy) << "</text>\n";
        }
    }

    Axis x_, y_;
    std::ostringstream svg_;
};

int column_index(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) throw std::runtime_error("missing column: " + name);
    return static_cast<int>(it - t.columns.begin());
}

// guide-line couplings from the sidecar written next to the csv
bool read_couplings(const std::string& csv_path, double* g, double* g_f) {
    fs::path p(csv_path);
    p.replace_extension("");
    p += ".meta.json";
    std::ifstream in(p);
    if (!in) return false;
    try {
        nlohmann::json j;
        in >> j;
        *g = std::stod(j["config"].value("system.g", ""));
        *g_f = std::stod(j["config"].value("system.g_f", ""));
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::string heat_color(double f) {
    // simple blue -> yellow ramp
    const int r = static_cast<int>(255 * std::clamp(1.5 * f, 0.0, 1.0));
    const int g = static_cast<int>(255 * std::clamp(1.2 * f, 0.0, 1.0));
    const int b = static_cast<int>(255 * std::clamp(1.0 - f, 0.0, 1.0));
    char buf[10];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

void render_lines(const CsvTable& t, const std::string& csv_path, const std::string& out_path,
                  bool log_x) {
    if (t.rows.empty()) throw std::runtime_error("empty input: nothing to plot");
    const int nx = 0;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = 0;
    for (const auto& row : t.rows) {
        xlo = std::min(xlo, row[nx]);
        xhi = std::max(xhi, row[nx]);
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (!std::isfinite(row[c]) || row[c] <= 0) continue;
            ylo = std::min(ylo, row[c]);
            yhi = std::max(yhi, row[c]);
        }
    }
    if (!(yhi > 0)) throw std::runtime_error("no positive finite values to plot");
    ylo = std::max(ylo, yhi * 1e-12);

    Axis ax{xlo, xhi, log_x};
    Axis ay{ylo * 0.8, yhi * 1.25, true};
    SvgPlot plot(fs::path(csv_path).filename().string(), ax, ay);

    double g = 0, g_f = 0;
    if (!log_x && read_couplings(csv_path, &g, &g_f)) {
        bool dashed = false;
        for (double line : pcs::figure_guide_lines(g, g_f)) {
            plot.vline(line, "#888888", dashed);
            dashed = !dashed;  // alternate solid and dotted guides
        }
    }

    std::vector<std::pair<std::string, std::string>> legend;
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        const std::string color = kColors[(c - 1) % 10];
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : t.rows)
            if (std::isfinite(row[c]) && row[c] > 0) pts.emplace_back(row[nx], row[c]);
        plot.polyline(pts, color);
        legend.emplace_back(t.columns[c], color);
    }
    plot.legend(legend);
    plot.axis_labels(t.columns[0], "rate");
    plot.write(out_path);
}

void render_surface(const CsvTable& t, const std::string& csv_path, const std::string& out_path) {
    const int ig = column_index(t, "g");
    const int itau = column_index(t, "tau_w");
    const int icon = column_index(t, "pvr_con");
    if (t.rows.empty()) throw std::runtime_error("empty input: nothing to plot");

    std::vector<double> gs, taus;
    for (const auto& row : t.rows) {
        if (gs.empty() || row[ig] != gs.back()) gs.push_back(row[ig]);
        if (gs.size() == 1) taus.push_back(row[itau]);
    }
    double vmax = 0;
    for (const auto& row : t.rows)
        if (std::isfinite(row[icon])) vmax = std::max(vmax, row[icon]);
    if (vmax <= 0) throw std::runtime_error("no positive finite values to plot");

    Axis ax{gs.front(), gs.back(), false};
    Axis ay{taus.front(), taus.back(), true};
    SvgPlot plot(fs::path(csv_path).filename().string() + " (pvr_con)", ax, ay);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const double g0 = i == 0 ? gs[i] : 0.5 * (gs[i - 1] + gs[i]);
        const double g1 = i + 1 == gs.size() ? gs[i] : 0.5 * (gs[i] + gs[i + 1]);
        for (std::size_t j = 0; j < taus.size(); ++j) {
            const double v = t.rows[i * taus.size() + j][icon];
            if (!std::isfinite(v)) continue;
            const double t0 = j == 0 ? taus[j] : std::sqrt(taus[j - 1] * taus[j]);
            const double t1 = j + 1 == taus.size() ? taus[j] : std::sqrt(taus[j] * taus[j + 1]);
            plot.cell(g0, g1, t0, t1, heat_color(v / vmax));
        }
    }
    plot.axis_labels("g", "tau_w");
    plot.write(out_path);
}

void render_fit(const CsvTable& t, const std::string& csv_path, const std::string& out_path) {
    if (t.rows.empty()) throw std::runtime_error("empty input: nothing to plot");
    const int ig = column_index(t, "gamma");
    const int icon = column_index(t, "tau_opt_con");
    const int iunc = column_index(t, "tau_opt_unc");
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& row : t.rows) {
        xlo = std::min(xlo, row[ig]);
        xhi = std::max(xhi, row[ig]);
        for (int c : {icon, iunc}) {
            if (!std::isfinite(row[c])) continue;
            ylo = std::min(ylo, row[c]);
            yhi = std::max(yhi, row[c]);
        }
    }
    if (!(yhi > ylo)) throw std::runtime_error("no finite values to plot");
    const double pad = 0.15 * (yhi - ylo);
    SvgPlot plot(fs::path(csv_path).filename().string(), Axis{xlo - 0.2, xhi + 0.2, false},
                 Axis{ylo - pad, yhi + pad, false});
    std::vector<std::pair<double, double>> con, unc;
    for (const auto& row : t.rows) {
        if (std::isfinite(row[icon])) con.emplace_back(row[ig], row[icon]);
        if (std::isfinite(row[iunc])) unc.emplace_back(row[ig], row[iunc]);
    }
    plot.markers(con, kColors[0]);
    plot.markers(unc, kColors[1]);
    plot.polyline(con, kColors[0]);
    plot.polyline(unc, kColors[1], true);
    plot.legend({{"tau_opt_con", kColors[0]}, {"tau_opt_unc", kColors[1]}});
    plot.axis_labels("gamma", "tau_opt");
    plot.write(out_path);
}

} // namespace

int render_csv(const std::string& csv_path, const std::string& out_path) {
    const CsvTable t = read_csv(csv_path);
    if (t.columns.empty()) throw std::runtime_error("empty input: no columns");
    if (t.columns.front() == "g" && t.columns.size() >= 4 && t.columns[1] == "tau_w") {
        render_surface(t, csv_path, out_path);
    } else if (t.columns.front() == "gamma" && t.columns.size() >= 5) {
        render_fit(t, csv_path, out_path);
    } else if (t.columns.front() == "tau_w") {
        render_lines(t, csv_path, out_path, true);
    } else if (t.columns.front() == "delta_tilde" || t.columns.size() >= 2) {
        render_lines(t, csv_path, out_path, false);
    } else {
        throw std::runtime_error("unrecognized csv layout: " + csv_path);
    }
    return 0;
}

} // namespace pcstool
