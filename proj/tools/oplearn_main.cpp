// SPDX-License-Identifier: Apache-2.0
//
// oplearn command line: reference solves, estimator fitting and application,
// bound sweeps, and the reproduction experiments (CSV output).
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "oplearn/bounds.hpp"
#include "oplearn/harness.hpp"
#include "oplearn/io.hpp"

using nlohmann::json;
using namespace oplearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  json j;
  in >> j;
  return j;
}

bool sphere_potential_name(const std::string& name) {
  return name == "coulomb" || name == "dipole" || name == "coulomb_dipole";
}

int cmd_solve(const std::string& config_path, const std::string& in_path,
              const std::string& out_path) {
  json j = load_json(config_path);
  SolverConfig cfg;
  if (j.contains("T")) cfg.T = j.at("T").get<double>();
  if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
  if (j.contains("t_start")) cfg.t_start = j.at("t_start").get<double>();
  if (j.contains("hbar")) cfg.hbar = j.at("hbar").get<double>();
  if (j.contains("mass")) cfg.mass = j.at("mass").get<double>();
  std::string name = j.value("potential", "free");
  json params = j.contains("params") ? j.at("params") : json::object();

  if (sphere_potential_name(name)) {
    int l_max = 10;
    SphereField psi = read_sphere_field(in_path, &l_max);
    SpherePotential pot = SpherePotential::from_config(name, params);
    SphereField out = evolve_sphere(psi, pot, cfg, l_max);
    write_sphere_field(out, l_max, out_path);
  } else {
    Field psi = read_field(in_path);
    std::uint64_t seed = j.value("seed", std::uint64_t(0));
    Potential pot = Potential::from_config(name, params, psi.grid, seed);
    Field out = evolve(psi, pot, cfg);
    write_field(out, out_path);
  }
  return kExitOk;
}

int cmd_fit(const std::string& config_path, const std::string& out_path) {
  ExperimentConfig cfg = ExperimentConfig::from_json(load_json(config_path));
  double mask = cfg.mask_p.size() == 1 ? cfg.mask_p[0] : 0.0;
  Estimator est = fit_from_config(cfg, mask);
  est.save(out_path);
  return kExitOk;
}

int cmd_eval(const std::string& est_path, const std::string& in_path,
             const std::string& out_path, int steps) {
  Estimator est = Estimator::load(est_path);
  if (est.basis_kind() == Estimator::BasisKind::Torus) {
    Field psi = read_field(in_path);
    Field out = steps <= 1 ? est.apply(psi) : est.apply_power(psi, steps);
    write_field(out, out_path);
  } else {
    int l_max = est.band();
    SphereField psi = read_sphere_field(in_path, &l_max);
    SphereField out = steps <= 1 ? est.apply(psi) : est.apply_power(psi, steps);
    write_sphere_field(out, est.band(), out_path);
  }
  return kExitOk;
}

int cmd_bounds(const std::string& config_path, const std::string& out_path) {
  ExperimentConfig cfg = ExperimentConfig::from_json(load_json(config_path));
  std::vector<BoundsRow> rows = run_lowerbound_sweep(cfg);
  std::string csv = bounds_to_csv(rows);
  for (const auto& r : rows)
    if (!std::isfinite(r.measured)) return kExitNumerical;
  if (out_path.empty())
    std::cout << csv;
  else
    write_text(csv, out_path);
  return kExitOk;
}

int cmd_experiment(const std::string& experiment, const std::string& config_path,
                   const std::string& out_path, long seed_override, int threads_override) {
  json j = load_json(config_path);
  ExperimentConfig cfg = ExperimentConfig::from_json(j);
  cfg.experiment = experiment;
  if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
  if (threads_override > 0) cfg.threads = threads_override;

  std::vector<ResultRow> rows = run_experiment(cfg);
  if (!rows_finite(rows)) {
    std::cerr << "numerical failure: non-finite statistics\n";
    return kExitNumerical;
  }
  std::string csv = rows_to_csv(rows);
  std::string target = !out_path.empty() ? out_path : cfg.out;
  if (target.empty())
    std::cout << csv;
  else
    write_text(csv, target);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actively probed linear estimators for Schrodinger evolution operators"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, est_path;
  long seed_override = -1;
  int threads_override = 0;
  int steps = 1;

  auto* solve = app.add_subcommand("solve", "run the reference split-step solver");
  solve->add_option("--config", config_path)->required();
  solve->add_option("--in", in_path)->required();
  solve->add_option("--out", out_path)->required();

  auto* fit = app.add_subcommand("fit", "fit an estimator and persist it");
  fit->add_option("--config", config_path)->required();
  fit->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("eval", "apply a persisted estimator to a field");
  eval->add_option("--est", est_path)->required();
  eval->add_option("--in", in_path)->required();
  eval->add_option("--out", out_path)->required();

  auto* power = app.add_subcommand("power", "apply a persisted estimator q times");
  power->add_option("--est", est_path)->required();
  power->add_option("--in", in_path)->required();
  power->add_option("--out", out_path)->required();
  power->add_option("--steps", steps)->required();

  auto* bounds = app.add_subcommand("bounds", "adversarial bound sweep (CSV)");
  bounds->add_option("--config", config_path)->required();
  bounds->add_option("--out", out_path);

  const char* experiments[] = {"accuracy", "masking", "timegen", "convergence", "lowerbound"};
  for (const char* name : experiments) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path)->required();
    sub->add_option("--out", out_path);
    sub->add_option("--seed", seed_override);
    sub->add_option("--threads", threads_override);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(config_path, in_path, out_path);
    if (fit->parsed()) return cmd_fit(config_path, out_path);
    if (eval->parsed()) return cmd_eval(est_path, in_path, out_path, 1);
    if (power->parsed()) return cmd_eval(est_path, in_path, out_path, steps);
    if (bounds->parsed()) return cmd_bounds(config_path, out_path);
    for (const char* name : experiments)
      if (app.get_subcommand(name)->parsed())
        return cmd_experiment(name, config_path, out_path, seed_override, threads_override);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
