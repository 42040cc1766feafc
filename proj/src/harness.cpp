// SPDX-License-Identifier: Apache-2.0
#include "oplearn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "oplearn/bounds.hpp"
#include "oplearn/parallel.hpp"
#include "oplearn/spectral.hpp"

namespace oplearn {

using nlohmann::json;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation (divisor n-1).
MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / double(xs.size());
  if (xs.size() > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(v / double(xs.size() - 1));
  }
  return r;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("potential")) c.potential = j.at("potential").get<std::string>();
    if (j.contains("params")) c.params = j.at("params");
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.contains("d")) c.d = g.at("d").get<int>();
      if (g.contains("n_per_dim")) c.n_per_dim = g.at("n_per_dim").get<int>();
      if (g.contains("L")) c.L = g.at("L").get<double>();
      if (g.contains("n_phi")) c.n_phi = g.at("n_phi").get<int>();
      if (g.contains("n_theta")) c.n_theta = g.at("n_theta").get<int>();
      if (g.contains("l_max")) c.l_max = g.at("l_max").get<int>();
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      if (s.contains("T")) c.solver.T = s.at("T").get<double>();
      if (s.contains("dt")) c.solver.dt = s.at("dt").get<double>();
      if (s.contains("t_start")) c.solver.t_start = s.at("t_start").get<double>();
      if (s.contains("hbar")) c.solver.hbar = s.at("hbar").get<double>();
      if (s.contains("mass")) c.solver.mass = s.at("mass").get<double>();
    }
    if (j.contains("budget")) c.budget = j.at("budget").get<long>();
    if (j.contains("grf")) {
      const json& g = j.at("grf");
      if (g.contains("alpha")) c.grf.alpha = g.at("alpha").get<double>();
      if (g.contains("beta")) c.grf.beta = g.at("beta").get<double>();
      if (g.contains("gamma")) c.grf.gamma = g.at("gamma").get<double>();
      if (g.contains("bandwidth")) c.grf.bandwidth = g.at("bandwidth").get<int>();
    }
    if (j.contains("noise")) {
      if (j.at("noise").is_number())
        c.noise.rel_level = j.at("noise").get<double>();
      else if (j.at("noise").contains("rel_level"))
        c.noise.rel_level = j.at("noise").at("rel_level").get<double>();
    }
    if (j.contains("mask_p")) {
      if (j.at("mask_p").is_number())
        c.mask_p = {j.at("mask_p").get<double>()};
      else
        c.mask_p = j.at("mask_p").get<std::vector<double>>();
    }
    if (j.contains("q_list")) c.q_list = j.at("q_list").get<std::vector<int>>();
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<long>>();
    if (j.contains("s_list")) c.s_list = j.at("s_list").get<std::vector<double>>();
    if (j.contains("eps_list")) c.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (c.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!std::is_sorted(c.q_list.begin(), c.q_list.end()))
    throw std::invalid_argument("config: q_list must be sorted ascending");
  return c;
}

Estimator fit_from_config(const ExperimentConfig& cfg, double mask_p) {
  RngStream root = RngStream(cfg.seed).derive("accuracy");
  Estimator::Options opt;
  opt.noise_rel = cfg.noise.rel_level;
  opt.mask_p = mask_p;
  opt.seed = root.derive("fit").root_seed();

  if (cfg.is_sphere()) {
    SphereGrid grid = cfg.sphere_grid();
    SpherePotential pot = SpherePotential::from_config(cfg.potential, cfg.params);
    auto basis = get_sphere_basis(grid, cfg.l_max);
    SpherePropagator prop(basis, pot, cfg.solver);
    opt.solver_digest = prop.digest();
    return Estimator::fit(grid, cfg.l_max,
                          [&prop](const SphereField& f) { return prop.evolve(f); }, opt);
  }
  Grid grid = cfg.torus_grid();
  Potential pot = Potential::from_config(cfg.potential, cfg.params, grid,
                                         root.derive("potential").root_seed());
  Propagator prop(grid, pot, cfg.solver);
  opt.solver_digest = prop.digest();
  return Estimator::fit_budget(grid, cfg.budget,
                               [&prop](const Field& f) { return prop.evolve(f); }, opt);
}

namespace {

// Accuracy protocol shared by run_accuracy and run_masking (identical random
// streams, so mask_p = 0 reproduces run_accuracy bit for bit).
ResultRow accuracy_point(const ExperimentConfig& cfg, double mask_p,
                         const std::string& experiment_name, const std::string& param_name,
                         double param_value) {
  double t0 = now_seconds();
  RngStream root = RngStream(cfg.seed).derive("accuracy");
  std::vector<double> errs(cfg.trials);

  if (cfg.is_sphere()) {
    SphereGrid grid = cfg.sphere_grid();
    SpherePotential pot = SpherePotential::from_config(cfg.potential, cfg.params);
    auto basis = get_sphere_basis(grid, cfg.l_max);
    SpherePropagator prop(basis, pot, cfg.solver);
    Estimator::Options opt{cfg.noise.rel_level, mask_p, root.derive("fit").root_seed(),
                           prop.digest()};
    Estimator est = Estimator::fit(
        grid, cfg.l_max, [&prop](const SphereField& f) { return prop.evolve(f); }, opt);

    std::vector<SphereField> inputs(cfg.trials), truths(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      RngStream st = root.derive("trial").derive(t);
      SphereField psi = sample_grf_sphere(cfg.grf, grid, cfg.l_max, st.derive("ic"));
      truths[t] = add_noise(prop.evolve(psi), cfg.noise, st.derive("truth-noise"));
      inputs[t] = add_noise(psi, cfg.noise, st.derive("test-in"));
    });
    std::vector<SphereField> preds = est.apply_batch(inputs);
    for (int t = 0; t < cfg.trials; ++t) errs[t] = relative_error(preds[t], truths[t]);
  } else {
    Grid grid = cfg.torus_grid();
    Potential pot = Potential::from_config(cfg.potential, cfg.params, grid,
                                           root.derive("potential").root_seed());
    Propagator prop(grid, pot, cfg.solver);
    Estimator::Options opt{cfg.noise.rel_level, mask_p, root.derive("fit").root_seed(),
                           prop.digest()};
    Estimator est = Estimator::fit_budget(
        grid, cfg.budget, [&prop](const Field& f) { return prop.evolve(f); }, opt);

    std::vector<Field> inputs(cfg.trials), truths(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      RngStream st = root.derive("trial").derive(t);
      Field psi = sample_grf(cfg.grf, grid, st.derive("ic"));
      truths[t] = add_noise(prop.evolve(psi), cfg.noise, st.derive("truth-noise"));
      inputs[t] = add_noise(psi, cfg.noise, st.derive("test-in"));
    });
    std::vector<Field> preds = est.apply_batch(inputs);
    for (int t = 0; t < cfg.trials; ++t) errs[t] = relative_error(preds[t], truths[t]);
  }

  MeanStd ms = mean_std(errs);
  return ResultRow{experiment_name, cfg.potential, param_name, param_value,
                   ms.mean,         ms.std,        cfg.trials, now_seconds() - t0};
}

}  // namespace

std::vector<ResultRow> run_accuracy(const ExperimentConfig& cfg) {
  return {accuracy_point(cfg, 0.0, "accuracy", "noise", cfg.noise.rel_level)};
}

std::vector<ResultRow> run_masking(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  for (double p : cfg.mask_p) rows.push_back(accuracy_point(cfg, p, "masking", "mask_p", p));
  return rows;
}

std::vector<ResultRow> run_timegen(const ExperimentConfig& cfg) {
  if (cfg.q_list.empty()) throw std::invalid_argument("timegen: q_list must not be empty");
  double t0 = now_seconds();
  RngStream root = RngStream(cfg.seed).derive("timegen");
  int qmax = cfg.q_list.back();
  std::vector<std::vector<double>> errs(cfg.q_list.size(),
                                        std::vector<double>(cfg.trials, 0.0));

  auto error_rows = [&](double seconds) {
    std::vector<ResultRow> rows;
    for (std::size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
      MeanStd ms = mean_std(errs[qi]);
      rows.push_back(ResultRow{"timegen", cfg.potential, "q", double(cfg.q_list[qi]), ms.mean,
                               ms.std, cfg.trials, seconds});
    }
    return rows;
  };

  if (cfg.is_sphere()) {
    SphereGrid grid = cfg.sphere_grid();
    SpherePotential pot = SpherePotential::from_config(cfg.potential, cfg.params);
    auto basis = get_sphere_basis(grid, cfg.l_max);
    SpherePropagator prop(basis, pot, cfg.solver);
    Estimator::Options opt{cfg.noise.rel_level, 0.0, root.derive("fit").root_seed(),
                           prop.digest()};
    Estimator est = Estimator::fit(
        grid, cfg.l_max, [&prop](const SphereField& f) { return prop.evolve(f); }, opt);

    std::vector<SphereField> truth(cfg.trials), pred(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      RngStream st = root.derive("trial").derive(t);
      truth[t] = sample_grf_sphere(cfg.grf, grid, cfg.l_max, st.derive("ic"));
      pred[t] = add_noise(truth[t], cfg.noise, st.derive("test-in"));
    });
    for (int j = 1; j <= qmax; ++j) {
      // spherical potentials are time-independent: the segment operator repeats
      parallel_for(cfg.trials, cfg.threads,
                   [&](std::size_t t) { truth[t] = prop.evolve(truth[t]); });
      pred = est.apply_batch(pred);
      auto it = std::find(cfg.q_list.begin(), cfg.q_list.end(), j);
      if (it == cfg.q_list.end()) continue;
      std::size_t qi = std::size_t(it - cfg.q_list.begin());
      for (int t = 0; t < cfg.trials; ++t) {
        RngStream st = root.derive("trial").derive(std::uint64_t(t));
        SphereField meas =
            add_noise(truth[t], cfg.noise, st.derive("truth-noise").derive(std::uint64_t(j)));
        errs[qi][t] = relative_error(pred[t], meas);
      }
    }
    return error_rows(now_seconds() - t0);
  }

  Grid grid = cfg.torus_grid();
  Potential pot = Potential::from_config(cfg.potential, cfg.params, grid,
                                         root.derive("potential").root_seed());
  Propagator fit_prop(grid, pot, cfg.solver);
  Estimator::Options opt{cfg.noise.rel_level, 0.0, root.derive("fit").root_seed(),
                         fit_prop.digest()};
  Estimator est = Estimator::fit_budget(
      grid, cfg.budget, [&fit_prop](const Field& f) { return fit_prop.evolve(f); }, opt);

  std::vector<Field> truth(cfg.trials), pred(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    RngStream st = root.derive("trial").derive(t);
    truth[t] = sample_grf(cfg.grf, grid, st.derive("ic"));
    pred[t] = add_noise(truth[t], cfg.noise, st.derive("test-in"));
  });

  for (int j = 1; j <= qmax; ++j) {
    // The true flow continues global time: segment j evolves [(j-1)T, jT].
    const Propagator* seg = &fit_prop;
    std::unique_ptr<Propagator> seg_storage;
    if (pot.time_dependent() && j > 1) {
      SolverConfig seg_cfg = cfg.solver;
      seg_cfg.t_start = cfg.solver.t_start + (j - 1) * cfg.solver.T;
      seg_storage = std::make_unique<Propagator>(grid, pot, seg_cfg);
      seg = seg_storage.get();
    }
    parallel_for(cfg.trials, cfg.threads,
                 [&](std::size_t t) { truth[t] = seg->evolve(truth[t]); });
    pred = est.apply_batch(pred);
    auto it = std::find(cfg.q_list.begin(), cfg.q_list.end(), j);
    if (it == cfg.q_list.end()) continue;
    std::size_t qi = std::size_t(it - cfg.q_list.begin());
    for (int t = 0; t < cfg.trials; ++t) {
      RngStream st = root.derive("trial").derive(std::uint64_t(t));
      Field meas =
          add_noise(truth[t], cfg.noise, st.derive("truth-noise").derive(std::uint64_t(j)));
      errs[qi][t] = relative_error(pred[t], meas);
    }
  }
  return error_rows(now_seconds() - t0);
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  if (cfg.n_list.size() < 4)
    throw std::invalid_argument("convergence: need at least 4 budgets in n_list");
  if (cfg.noise.rel_level != 0.0)
    throw std::invalid_argument("convergence: requires a noiseless (r = 0) solver");
  double t0 = now_seconds();
  RngStream root = RngStream(cfg.seed).derive("convergence");

  Grid grid = cfg.torus_grid();
  Potential pot = Potential::from_config(cfg.potential, cfg.params, grid,
                                         root.derive("potential").root_seed());
  Propagator prop(grid, pot, cfg.solver);

  std::vector<long> budgets = cfg.n_list;
  std::sort(budgets.begin(), budgets.end());
  long n_max = budgets.back();
  Estimator::Options opt{0.0, 0.0, root.derive("fit").root_seed(), prop.digest()};
  Estimator full = Estimator::fit_budget(
      grid, n_max, [&prop](const Field& f) { return prop.evolve(f); }, opt);

  std::vector<Field> psis(cfg.trials), truths(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    RngStream st = root.derive("trial").derive(t);
    psis[t] = sample_grf(cfg.grf, grid, st.derive("ic"));
    truths[t] = prop.evolve(psis[t]);
  });

  ConvergenceResult res;
  std::vector<double> log_n, log_e;
  for (long n : budgets) {
    // A noiseless fit draws nothing, so the band restriction equals a fresh
    // fit at this budget.
    Estimator sub = full.restrict_band(Estimator::k_n_floor(n, grid.d));
    std::vector<Field> preds = sub.apply_batch(psis);
    std::vector<double> errs(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t) errs[t] = relative_error(preds[t], truths[t]);
    MeanStd ms = mean_std(errs);
    res.rows.push_back(ResultRow{"convergence", cfg.potential, "n", double(n), ms.mean, ms.std,
                                 cfg.trials, 0.0});
    log_n.push_back(std::log(double(n)));
    log_e.push_back(std::log(ms.mean));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = int(budgets.size());
  for (int i = 0; i < m; ++i) {
    sx += log_n[i];
    sy += log_e[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_e[i];
  }
  res.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double seconds = now_seconds() - t0;
  for (auto& r : res.rows) r.seconds = seconds;
  res.rows.push_back(ResultRow{"convergence", cfg.potential, "slope", res.slope, res.slope,
                               0.0, m, seconds});
  return res;
}

std::vector<BoundsRow> run_lowerbound_sweep(const ExperimentConfig& cfg) {
  Grid grid = cfg.torus_grid();
  double T = cfg.solver.T, hbar = cfg.solver.hbar, mass = cfg.solver.mass;
  std::vector<BoundsRow> rows;
  for (double s : cfg.s_list) {
    for (double eps : cfg.eps_list) {
      for (long n : cfg.n_list) {
        Estimator::Options opt{0.0, 0.0, 0, "adversarial-free"};
        Estimator est = Estimator::fit_budget(
            grid, n,
            [&](const Field& u) { return adversarial_solve(u, eps, T, hbar, mass); }, opt);
        Field psi = hard_test_function(n, s, grid);
        Field pred = est.apply(psi);
        Field truth = free_exact(psi, T, hbar, mass);
        double measured = 0.0;
        for (std::size_t i = 0; i < pred.values.size(); ++i)
          measured += std::norm(pred.values[i] - truth.values[i]);
        measured = std::sqrt(measured * grid.cell_volume());

        double A = shell_sum_A(n, s, grid.d);
        auto out_idx = hard_test_out_index(n, grid.d);
        double l2 = double(out_idx[0]) * out_idx[0] + double(out_idx[1]) * out_idx[1];
        double cl = 1.0 / (std::sqrt(2.0) * std::pow(1.0 + l2, 0.5 * s));
        BoundParams bp{n, s, grid.d, eps, sobolev_norm(psi, s), 1};
        rows.push_back(BoundsRow{n, s, grid.d, eps, gamma_n(n, s, grid.d), upper_bound(bp),
                                 eps * std::sqrt(A / 2.0), cl, measured});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_lowerbound(const ExperimentConfig& cfg) {
  double t0 = now_seconds();
  std::vector<BoundsRow> sweep = run_lowerbound_sweep(cfg);
  double seconds = now_seconds() - t0;
  std::vector<ResultRow> rows;
  char name[96];
  for (const auto& b : sweep) {
    // The construction is deterministic: one evaluation, zero spread.
    std::snprintf(name, sizeof name, "n[s=%g,eps=%g]", b.s, b.eps);
    rows.push_back(ResultRow{"lowerbound", "free", name, double(b.n), b.measured, 0.0, 1,
                             seconds});
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "accuracy") return run_accuracy(cfg);
  if (cfg.experiment == "masking") return run_masking(cfg);
  if (cfg.experiment == "timegen") return run_timegen(cfg);
  if (cfg.experiment == "convergence") return run_convergence(cfg).rows;
  if (cfg.experiment == "lowerbound") return run_lowerbound(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,potential,param_name,param_value,mean_rel_err,std_rel_err,"
                    "trials,seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%g,%.6e,%.6e,%d,%.3f\n", r.experiment.c_str(),
                  r.potential.c_str(), r.param_name.c_str(), r.param_value, r.mean_rel_err,
                  r.std_rel_err, r.trials, r.seconds);
    out += buf;
  }
  return out;
}

std::string bounds_to_csv(const std::vector<BoundsRow>& rows) {
  std::string out =
      "n,s,d,eps,gamma_n,upper,lower_solver_term,lower_tail_term,measured_error\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%g,%d,%g,%.6e,%.6e,%.6e,%.6e,%.6e\n", r.n, r.s, r.d,
                  r.eps, r.gamma, r.upper, r.lower_solver_term, r.lower_tail_term, r.measured);
    out += buf;
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool rows_finite(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    if (!std::isfinite(r.mean_rel_err) || !std::isfinite(r.std_rel_err)) return false;
  return true;
}

}  // namespace oplearn
