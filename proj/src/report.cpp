#include "icatopo/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace icatopo {

nlohmann::json report_json(const RunHistory& h) {
  nlohmann::json j;
  j["problem"] = h.problem;
  j["strategy"] = h.strategy;
  j["mesh"] = std::to_string(h.nx) + "x" + std::to_string(h.ny);
  j["linear"] = h.linear;
  j["status"] = h.status;
  j["volume_target"] = h.volume_target;
  j["outer_iterations"] = static_cast<int>(h.records.size());
  j["final_objective"] = h.records.empty() ? 0.0 : h.records.back().objective;
  j["initial_objective"] = h.records.empty() ? 0.0 : h.records.front().objective;
  j["final_gp_norm"] = h.records.empty() ? 0.0 : h.records.back().gp_norm;
  j["newton_iterations"] = h.newton_iterations;
  j["factorizations"] = h.factorizations;
  int fallbacks = 0, retries = 0;
  for (const auto& r : h.records) {
    fallbacks += r.fallbacks;
    retries += r.retries;
  }
  j["fallbacks"] = fallbacks;
  j["retries"] = retries;
  nlohmann::json t = nlohmann::json::object();
  for (int c = 0; c < kNumTimeCategories; ++c) {
    const auto cat = static_cast<TimeCategory>(c);
    t[std::string(category_name(cat))] = h.time[cat];
  }
  j["time"] = t;
  return j;
}

void write_history_csv(const RunHistory& h, std::ostream& os) {
  os << "iter,objective,p,newton_iterations,factorizations,ica_steps,ica_max_iterations,"
        "adjoint_ica_iterations,fallbacks,retries,residual,gp_norm,theta,volume,move_limit,max_norm_B";
  for (int c = 0; c < kNumTimeCategories; ++c) os << ",time:" << category_name(static_cast<TimeCategory>(c));
  os << '\n';
  os << std::setprecision(12);
  for (const auto& r : h.records) {
    os << r.iter << ',' << r.objective << ',' << r.p << ',' << r.newton_iterations << ',' << r.factorizations << ','
       << r.ica_steps << ',' << r.ica_max_iterations << ',' << r.adjoint_ica_iterations << ',' << r.fallbacks << ','
       << r.retries << ',' << r.residual << ',' << r.gp_norm << ',' << r.theta << ',' << r.volume << ','
       << r.mean_move_limit << ',' << r.max_norm_B;
    for (int c = 0; c < kNumTimeCategories; ++c) os << ',' << r.time[static_cast<TimeCategory>(c)];
    os << '\n';
  }
}

void write_density_pgm(const Eigen::VectorXd& rho, int nx, int ny, double rho_min, std::ostream& os) {
  if (rho.size() != static_cast<Eigen::Index>(nx) * ny)
    throw std::invalid_argument("write_density_pgm: density length does not match the mesh");
  os << "P5\n" << nx << ' ' << ny << "\n255\n";
  for (int j = ny - 1; j >= 0; --j)
    for (int i = 0; i < nx; ++i) {
      const double d = rho[j * nx + i];
      const double px = std::round(255.0 * (1.0 - (d - rho_min) / (1.0 - rho_min)));
      os.put(static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0.0, 255.0))));
    }
}

void write_norm_b_csv(const RunHistory& h, std::ostream& os) {
  os << "iter,max_norm_B\n" << std::setprecision(12);
  for (const auto& r : h.records)
    if (r.max_norm_B > 0.0) os << r.iter << ',' << r.max_norm_B << '\n';
}

namespace {

std::string pct(double base, double v) {
  if (base == 0.0) return v == 0.0 ? "0.00%" : "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * (v - base) / std::abs(base) << '%';
  return os.str();
}

}  // namespace

std::string compare_reports(const std::vector<nlohmann::json>& reports) {
  if (reports.size() < 2) throw std::invalid_argument("compare: need at least two reports");
  for (const auto& r : reports)
    if (r.at("problem") != reports[0].at("problem") || r.at("mesh") != reports[0].at("mesh"))
      throw std::invalid_argument("compare: reports belong to different problems or meshes");

  struct Row {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  const auto add = [&](const std::string& label, auto get) {
    Row row{label, {}};
    for (const auto& r : reports) row.values.push_back(get(r));
    rows.push_back(std::move(row));
  };
  add("final_objective", [](const nlohmann::json& r) { return r.at("final_objective").get<double>(); });
  add("newton_iterations", [](const nlohmann::json& r) { return r.at("newton_iterations").get<double>(); });
  add("factorizations", [](const nlohmann::json& r) { return r.at("factorizations").get<double>(); });
  for (int c = 0; c < kNumTimeCategories; ++c) {
    const std::string name(category_name(static_cast<TimeCategory>(c)));
    add(name, [&](const nlohmann::json& r) { return r.at("time").at(name).get<double>(); });
  }

  std::ostringstream os;
  os << std::left << std::setw(26) << "";
  for (size_t k = 0; k < reports.size(); ++k) {
    os << std::right << std::setw(16) << reports[k].at("strategy").get<std::string>();
    if (k > 0) os << std::setw(10) << "delta";
  }
  os << '\n';
  for (const auto& row : rows) {
    os << std::left << std::setw(26) << row.label;
    for (size_t k = 0; k < row.values.size(); ++k) {
      std::ostringstream v;
      v << std::setprecision(6) << row.values[k];
      os << std::right << std::setw(16) << v.str();
      if (k > 0) os << std::setw(10) << pct(row.values[0], row.values[k]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace icatopo
