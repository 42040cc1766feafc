// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_SOLVER_HPP
#define OPLEARN_SOLVER_HPP

#include <vector>

#include "oplearn/grid.hpp"
#include "oplearn/potentials.hpp"

namespace oplearn {

// Evolution window [t_start, t_start + T] in natural units.
struct SolverConfig {
  double T = 0.1;
  double dt = 1e-3;
  double t_start = 0.0;
  double hbar = 1.0;
  double mass = 1.0;

  // Whole number of steps: |T/dt - round(T/dt)| <= 0.5 and >= 1 step.
  int num_steps() const;
  double dt_effective() const { return T / num_steps(); }
  void validate() const;
};

// Second-order split-step pseudospectral propagator. Per step of length dt:
// half potential phase exp(-i V(x,t_mid) dt/(2 hbar)), full kinetic phase
// exp(-i hbar |2 pi k / L|^2 dt / (2 m)) in coefficient space, half potential
// phase again; t_mid is the step midpoint. Every factor has unit modulus, so
// the discrete L2 norm is preserved.
//
// Construction precomputes the kinetic phase and the per-step potential
// phases (a single field for time-independent V), so one Propagator can be
// reused across many initial conditions at no extra cost.
class Propagator {
 public:
  Propagator(const Grid& grid, const Potential& p, const SolverConfig& cfg);

  Field evolve(const Field& psi0) const;
  void evolve_inplace(ComplexVec& values) const;  // values on the grid

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return cfg_; }
  std::string digest() const;

 private:
  Grid grid_;
  SolverConfig cfg_;
  std::string pot_digest_;
  int steps_ = 0;
  ComplexVec kinetic_phase_;  // includes the 1/N backward-FFT scale
  ComplexVec pre_phase_;      // leading half phase
  ComplexVec post_phase_;     // trailing half phase
  // Fused half-phase pairs between consecutive steps (one entry if static).
  std::vector<ComplexVec> bridge_phases_;
  bool static_potential_ = true;
};

// Convenience single-shot evolution.
Field evolve(const Field& psi0, const Potential& p, const SolverConfig& cfg);

// Exact free propagator: coefficient k multiplied by
// eta_k = exp(-i hbar |2 pi k / L|^2 T / (2 m)).
Field free_exact(const Field& psi0, double T, double hbar = 1.0, double mass = 1.0);

// Richardson self-convergence: evolves psi0 at each dt in dt_list (>= 3
// values), takes the finest dt as reference and returns the log-log slope of
// error versus dt over the remaining points.
double convergence_order(const Field& psi0, const Potential& p, double T,
                         std::vector<double> dt_list, double hbar = 1.0, double mass = 1.0);

}  // namespace oplearn

#endif
