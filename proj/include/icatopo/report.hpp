#pragma once

#include "icatopo/optimizer.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace icatopo {

/// report.json content. Wall-clock fields live under "time" only.
nlohmann::json report_json(const RunHistory& h);

/// One row per outer iteration, header first.
void write_history_csv(const RunHistory& h, std::ostream& os);

/// Binary P5 image of rho_phys, top row first; pixel
/// round(255 (1 - (d - rho_min) / (1 - rho_min))), so solid material is black.
void write_density_pgm(const Eigen::VectorXd& rho, int nx, int ny, double rho_min, std::ostream& os);

/// Max ||B||_2 per outer iteration (iterations without an ICA solve are
/// skipped).
void write_norm_b_csv(const RunHistory& h, std::ostream& os);

/// Side-by-side table of objective, counts and time categories, with the
/// percentage change of every column against the first report. Throws
/// std::invalid_argument for fewer than two reports or mixed problems/meshes.
std::string compare_reports(const std::vector<nlohmann::json>& reports);

}  // namespace icatopo
