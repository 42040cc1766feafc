// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_POTENTIALS_HPP
#define OPLEARN_POTENTIALS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oplearn/grid.hpp"

#include "json.hpp"

namespace oplearn {

// Time-dependent real potential V(x,t) on the torus. The catalog:
//   free                V = 0
//   constant            V = a                           (oracle support)
//   barrier             V0 on the column nearest x0 except inside slits
//                       (|y - c| <= w for a slit center c)
//   harmonic_oscillator 0.5 m w^2 [(x-pi)^2 + (y-pi)^2]
//   random_field        real GRF draw, frozen at construction
//   paul_trap           (U0 + V0 cos(w t))/r0^2 * (x^2 + y^2)
//   shaken_lattice      V0 cos[k (x - A sin(w t))] + V0 cos(k y)
//   gaussian_pulse      V0 exp(-dx^2/2sx^2 - dy^2/2sy^2) sum_t0 exp(-(t-t0)^2/2st^2),
//                       dx, dy periodic (min-image) displacements
class Potential {
 public:
  enum class Kind {
    Free,
    Constant,
    Barrier,
    Harmonic,
    RandomField,
    PaulTrap,
    ShakenLattice,
    GaussianPulse,
  };

  static Potential free_particle();
  static Potential constant(double a);
  static Potential barrier(double V0 = 50.0, double w = 0.2,
                           std::vector<double> slit_centers = {},  // default {pi}
                           double x0 = -1.0);                      // default pi
  static Potential harmonic(double mass = 1.0, double omega = 2.0);
  static Potential random_field(double alpha, double beta, double gamma, std::uint64_t seed,
                                const Grid& grid);
  static Potential paul_trap(double U0 = 10.0, double V0 = 15.0, double omega = 3.0,
                             double r0 = 2.0);
  static Potential shaken_lattice(double V0 = 4.0, double k = 4.0 * 3.14159265358979323846,
                                  double A = 0.08, double omega = 15.0);
  static Potential gaussian_pulse(double V0 = 100.0, double x0 = 0.0, double y0 = 0.0,
                                  double sigma_x = 1.2, double sigma_y = 1.2,
                                  double sigma_t = 1.0, std::vector<double> t_centers = {0.0});

  // Builds from a Table-1 style name (lower snake case) with an optional
  // params override object. `grid` and `seed` feed the random_field variant.
  static Potential from_config(const std::string& name, const nlohmann::json& params,
                               const Grid& grid, std::uint64_t seed);

  Kind kind() const { return kind_; }
  std::string name() const;
  bool time_dependent() const;

  // Pointwise V(x,t); time-independent variants ignore t.
  RealVec evaluate(const Grid& grid, double t) const;

  std::string digest() const;  // canonical parameter string

 private:
  Potential() = default;
  Kind kind_ = Kind::Free;
  // parameters (interpretation depends on kind)
  double a_ = 0, V0_ = 0, w_ = 0, x0_ = 0, y0_ = 0;
  double mass_ = 1, omega_ = 0, U0_ = 0, r0_ = 1, klat_ = 0, A_ = 0;
  double sx_ = 1, sy_ = 1, st_ = 1;
  std::vector<double> slit_centers_;
  std::vector<double> t_centers_;
  double alpha_ = 1, beta_ = 1, gamma_ = 4;
  std::uint64_t seed_ = 0;
  Grid rf_grid_;
  RealVec rf_values_;  // frozen draw
};

}  // namespace oplearn

#endif
