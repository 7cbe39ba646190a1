// studies.hpp — study orchestration: each study resolves its configuration,
// runs the sweep, and emits deterministic CSV tables with a JSON sidecar.

#pragma once

#include <string>

#include "config.hpp"

namespace pcstool {

// exit status: 0 success, 1 partial failure (failed cells), 2 config error
int run_study(const RunConfig& cfg, bool force);

// static SVG rendering of an emitted CSV (line plot, fit plot, or heatmap,
// chosen from the columns); purely presentational
int render_csv(const std::string& csv_path, const std::string& out_path);

} // namespace pcstool
