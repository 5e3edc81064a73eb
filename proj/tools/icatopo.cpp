// Batch runner: `icatopo run ...` optimizes one problem and writes
// report.json, history.csv, density.pgm (and normB.csv on request) to --out;
// `icatopo compare a.json b.json ...` prints a side-by-side table.

#include "icatopo/bench.hpp"
#include "icatopo/optimizer.hpp"
#include "icatopo/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace fs = std::filesystem;
using namespace icatopo;

namespace {

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool truthy(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: '" + key + "' expects true or false");
}

int run(std::map<std::string, std::string> kv) {
  static const char* known[] = {"problem",   "mesh",       "strategy",      "budget",  "converge", "move-limit",
                                "filter-kernel", "monitor-normB", "linear", "out",     "E",        "nu",
                                "thickness", "load",       "k_in",          "k_out",   "volume-fraction",
                                "filter-radius", "verbose"};
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw std::invalid_argument("unknown config key '" + k + "'");
  }
  if (!kv.count("problem")) throw std::invalid_argument("--problem is required");

  ProblemSpec spec = desk(kv.at("problem"));
  spec = apply_config(spec, [&] {
    auto rest = kv;
    rest.erase("problem");  // desk() already picked the problem and its default mesh
    return rest;
  }());

  OptimizerConfig cfg;
  if (kv.count("strategy")) cfg.strategy = parse_strategy(kv.at("strategy"));
  if (kv.count("budget") && kv.count("converge"))
    throw std::invalid_argument("--budget and --converge are mutually exclusive");
  if (kv.count("budget")) {
    cfg.budget = std::stoi(kv.at("budget"));
    if (cfg.budget < 0) throw std::invalid_argument("--budget must be non-negative");
  }
  if (kv.count("converge")) {
    cfg.converge = true;
    cfg.tol = std::stod(kv.at("converge"));
  }
  if (kv.count("move-limit")) {
    cfg.move_limit = std::stod(kv.at("move-limit"));
    if (!(cfg.move_limit > 0.0 && cfg.move_limit <= 1.0)) throw std::invalid_argument("--move-limit must lie in (0, 1]");
  }
  if (kv.count("filter-kernel")) cfg.kernel = parse_kernel(kv.at("filter-kernel"));
  if (kv.count("monitor-normB")) cfg.monitor_norm_B = truthy("monitor-normB", kv.at("monitor-normB"));
  if (kv.count("verbose")) cfg.verbose = truthy("verbose", kv.at("verbose"));
  const fs::path out = kv.count("out") ? fs::path(kv.at("out")) : fs::path("out");
  fs::create_directories(out);

  const Problem pb = build(spec);
  const RunHistory h = optimize(pb, cfg);

  {
    std::ofstream f(out / "report.json");
    nlohmann::json j = report_json(h);
    j["config"] = to_config(spec);
    j["config"]["strategy"] = to_string(cfg.strategy);
    j["config"]["filter-kernel"] = to_string(cfg.kernel);
    f << j.dump(2) << '\n';
  }
  {
    std::ofstream f(out / "history.csv");
    write_history_csv(h, f);
  }
  if (h.rho_phys.size() == pb.mesh.n_el()) {
    std::ofstream f(out / "density.pgm", std::ios::binary);
    write_density_pgm(h.rho_phys, spec.nx, spec.ny, cfg.rho_min, f);
  }
  if (cfg.monitor_norm_B) {
    std::ofstream f(out / "normB.csv");
    write_norm_b_csv(h, f);
  }

  if (h.aborted) {
    std::cerr << "icatopo: " << h.status << '\n';
    return 1;
  }
  const auto& last = h.records.back();
  std::cout << spec.name << ' ' << spec.nx << 'x' << spec.ny << ' ' << to_string(cfg.strategy)
            << ": F = " << last.objective << " after " << h.records.size() << " evaluations, "
            << h.newton_iterations << " Newton iterations, " << h.factorizations << " factorizations ("
            << h.status << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology optimization of geometrically nonlinear structures with factorization reuse"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "optimize one benchmark problem");
  std::map<std::string, std::string> flags;
  std::string config_file;
  run_cmd->add_option("--config", config_file, "flat key=value file; flags override it");
  const auto opt = [&](const char* name, const char* help) {
    return run_cmd->add_option_function<std::string>(
        std::string("--") + name, [&flags, name](const std::string& v) { flags[name] = v; }, help);
  };
  opt("problem", "cantilever | slender | inverter | gripper");
  opt("mesh", "elements as WxH (default: the problem's desk mesh)");
  opt("strategy", "N | MN | upK1 | upK1g | upK100 | upK100g | upK03K100g");
  opt("budget", "number of design updates");
  opt("converge", "stop when ||g_P||_inf falls below this value");
  opt("move-limit", "SLP move limit (default 0.05)");
  opt("filter-kernel", "cone | gaussian");
  opt("out", "output directory (default ./out)");
  opt("filter-radius", "filter radius in element lengths");
  opt("volume-fraction", "prescribed volume fraction");
  run_cmd->add_flag_callback("--monitor-normB", [&] { flags["monitor-normB"] = "true"; },
                             "record max ||B||_2 per iteration (normB.csv)");
  run_cmd->add_flag_callback("--linear", [&] { flags["linear"] = "true"; }, "small-strain linear model");
  run_cmd->add_flag_callback("--verbose", [&] { flags["verbose"] = "true"; }, "print one line per iteration");

  auto* cmp_cmd = app.add_subcommand("compare", "compare report.json files");
  std::vector<std::string> reports;
  cmp_cmd->add_option("reports", reports, "report.json files; the first one is the baseline")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      std::map<std::string, std::string> kv;
      if (!config_file.empty()) kv = read_config(config_file);
      for (const auto& [k, v] : flags) kv[k] = v;
      return run(kv);
    }
    std::vector<nlohmann::json> js;
    for (const auto& path : reports) {
      std::ifstream in(path);
      if (!in) throw std::invalid_argument("cannot open '" + path + "'");
      js.push_back(nlohmann::json::parse(in));
    }
    std::cout << compare_reports(js);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "icatopo: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "icatopo: " << e.what() << '\n';
    return 1;
  }
}
