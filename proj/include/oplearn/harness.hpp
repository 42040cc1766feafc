// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_HARNESS_HPP
#define OPLEARN_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oplearn/estimator.hpp"
#include "oplearn/sampling.hpp"
#include "oplearn/solver.hpp"

#include "json.hpp"

namespace oplearn {

// One experiment description; mirrors the JSON config object.
struct ExperimentConfig {
  std::string experiment;  // accuracy | masking | timegen | convergence | lowerbound
  std::string potential = "free";
  nlohmann::json params = nlohmann::json::object();

  // torus grid (ignored for the spherical potentials)
  int d = 2;
  int n_per_dim = 128;
  double L = 6.283185307179586;
  // sphere grid (coulomb / dipole)
  int n_phi = 64;
  int n_theta = 32;
  int l_max = 10;

  SolverConfig solver{0.1, 1e-3, 0.0, 1.0, 1.0};
  long budget = 1089;
  GrfSpec grf;
  NoiseSpec noise;
  std::vector<double> mask_p = {0.1, 0.2};
  std::vector<int> q_list = {1, 2, 4, 8, 16};
  std::vector<long> n_list = {9, 25, 81, 289, 1089};
  std::vector<double> s_list = {0.5, 1.0, 2.0};  // lowerbound sweep
  std::vector<double> eps_list = {1e-2};
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  bool is_sphere() const { return potential == "coulomb" || potential == "dipole" ||
                                  potential == "coulomb_dipole"; }
  Grid torus_grid() const { return Grid(d, n_per_dim, L); }
  SphereGrid sphere_grid() const { return SphereGrid(n_phi, n_theta); }
};

struct ResultRow {
  std::string experiment;
  std::string potential;
  std::string param_name;
  double param_value = 0.0;
  double mean_rel_err = 0.0;
  double std_rel_err = 0.0;
  int trials = 0;
  double seconds = 0.0;
};

// Fits the configured estimator (torus or sphere) with the configured noise
// and mask probability; exposed for the CLI `fit` subcommand.
Estimator fit_from_config(const ExperimentConfig& cfg, double mask_p = 0.0);

std::vector<ResultRow> run_accuracy(const ExperimentConfig& cfg);
std::vector<ResultRow> run_masking(const ExperimentConfig& cfg);
std::vector<ResultRow> run_timegen(const ExperimentConfig& cfg);

struct ConvergenceResult {
  std::vector<ResultRow> rows;  // one per budget, plus a trailing slope row
  double slope = 0.0;
};
ConvergenceResult run_convergence(const ExperimentConfig& cfg);

// Adversarial lower-bound sweep (Free potential); detailed per-point values.
struct BoundsRow {
  long n;
  double s;
  int d;
  double eps;
  double gamma;
  double upper;              // analytic upper bound at measured H^s norm
  double lower_solver_term;  // eps * sqrt(A_n / 2)
  double lower_tail_term;    // c_l
  double measured;           // ||est(psi_test) - F(psi_test)||_{L2}
};
std::vector<BoundsRow> run_lowerbound_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_lowerbound(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string bounds_to_csv(const std::vector<BoundsRow>& rows);
void write_text(const std::string& text, const std::string& path);
bool rows_finite(const std::vector<ResultRow>& rows);

}  // namespace oplearn

#endif
