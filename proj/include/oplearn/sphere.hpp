// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_SPHERE_HPP
#define OPLEARN_SPHERE_HPP

#include <memory>
#include <string>
#include <vector>

#include "oplearn/common.hpp"

#include "json.hpp"

namespace oplearn {

// Equiangular grid on the unit sphere: phi uniform on [0,2pi), theta
// cell-centered uniform on (0,pi) (no points at the poles). Row-major
// flattening: flat = i_theta * n_phi + i_phi. Quadrature weights per theta
// row are the Fejer-type weights for the sin(theta) measure on the midpoint
// grid, which integrate cos^p(theta) sin(theta) exactly for p <= n_theta-2;
// bare h*sin(theta) weights would cap the Gram accuracy near 1e-4.
struct SphereGrid {
  int n_phi = 64;
  int n_theta = 32;

  SphereGrid() = default;
  SphereGrid(int n_phi_, int n_theta_);

  std::size_t num_points() const { return std::size_t(n_phi) * n_theta; }
  double theta(int i) const;
  double phi(int j) const;
  // Full quadrature weight of a grid point (theta row weight * 2pi/n_phi);
  // weights are positive and sum to 4pi.
  std::vector<double> point_weights() const;
  std::vector<double> theta_weights() const;

  bool operator==(const SphereGrid&) const = default;
};

struct SphereField {
  SphereGrid grid;
  ComplexVec values;

  SphereField() = default;
  explicit SphereField(const SphereGrid& g) : grid(g), values(g.num_points(), cplx{0, 0}) {}
};

// Coefficients over orthonormal complex spherical harmonics Y_l^m,
// 0 <= l <= l_max, |m| <= l; slot(l,m) = l^2 + l + m.
struct SphCoeffMap {
  SphereGrid grid;
  int l_max = 10;
  ComplexVec c;

  SphCoeffMap() = default;
  SphCoeffMap(const SphereGrid& g, int l_max_)
      : grid(g), l_max(l_max_), c(std::size_t(l_max_ + 1) * (l_max_ + 1), cplx{0, 0}) {}

  static std::size_t slot(int l, int m) { return std::size_t(l) * l + l + m; }
  cplx& at(int l, int m) { return c[slot(l, m)]; }
  cplx at(int l, int m) const { return c[slot(l, m)]; }
};

// Precomputed Y_l^m samples and quadrature weights for one (grid, l_max)
// pair; shared by the transforms, the propagator and the estimator.
class SphereBasis {
 public:
  SphereBasis(const SphereGrid& grid, int l_max);

  const SphereGrid& grid() const { return grid_; }
  int l_max() const { return l_max_; }
  std::size_t num_modes() const { return std::size_t(l_max_ + 1) * (l_max_ + 1); }

  SphereField mode(int l, int m) const;
  SphCoeffMap analyze(const SphereField& f) const;
  SphereField synthesize(const SphCoeffMap& c) const;
  void analyze_raw(const cplx* values, cplx* coeffs) const;
  void synthesize_raw(const cplx* coeffs, cplx* values) const;

  const std::vector<double>& weights() const { return weights_; }

 private:
  SphereGrid grid_;
  int l_max_;
  std::vector<double> weights_;  // per point
  ComplexVec ylm_;               // num_modes x num_points, mode-major
};

std::shared_ptr<const SphereBasis> get_sphere_basis(const SphereGrid& grid, int l_max);

// Spherical harmonic Y_l^m sampled on the grid (unit L2 norm under the grid
// quadrature).
SphereField sph_harmonic(int l, int m, const SphereGrid& grid);

SphCoeffMap sht_forward(const SphereField& f, int l_max);
SphereField sht_inverse(const SphCoeffMap& c);

cplx sph_inner_product(const SphereField& u, const SphereField& v);
double sph_l2_norm(const SphereField& f);

// Spherical Sobolev-type norm with Laplacian eigenvalue weights:
// sqrt(sum_{l,m} (1 + l(l+1))^s |c_lm|^2).
double sph_sobolev_norm(const SphCoeffMap& c, double s);

// Potentials on S^2 (both time-independent):
//   coulomb  V = -k e^2 / r^2 at fixed radius r = 1 (a constant)
//   dipole   V = V0 cos(theta)
class SpherePotential {
 public:
  static SpherePotential coulomb(double k = 1.0, double e = 1.0);
  static SpherePotential dipole(double V0 = 1.0);
  static SpherePotential from_config(const std::string& name, const nlohmann::json& params);

  std::string name() const { return dipole_ ? "dipole" : "coulomb"; }
  std::vector<double> evaluate(const SphereGrid& grid) const;
  std::string digest() const;

 private:
  bool dipole_ = false;
  double k_ = 1.0, e_ = 1.0, V0_ = 1.0;
};

struct SolverConfig;  // from solver.hpp

// Split-step propagator on S^2: kinetic phase exp(-i hbar l(l+1) dt/(2 m))
// per (l,m) in coefficient space (unit radius), potential half phases on the
// grid; content beyond l_max is truncated by the analysis step.
class SpherePropagator {
 public:
  SpherePropagator(std::shared_ptr<const SphereBasis> basis, const SpherePotential& p,
                   const SolverConfig& cfg);

  SphereField evolve(const SphereField& psi0) const;
  void evolve_inplace(ComplexVec& values) const;
  std::string digest() const;
  const SphereBasis& basis() const { return *basis_; }

 private:
  std::shared_ptr<const SphereBasis> basis_;
  std::string pot_digest_;
  double T_, dt_, hbar_, mass_;
  int steps_;
  ComplexVec kinetic_phase_;  // per (l,m) slot
  ComplexVec half_phase_;     // per grid point
};

SphereField evolve_sphere(const SphereField& psi0, const SpherePotential& p,
                          const SolverConfig& cfg, int l_max);

}  // namespace oplearn

#endif
