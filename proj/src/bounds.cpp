// SPDX-License-Identifier: Apache-2.0
#include "oplearn/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "oplearn/estimator.hpp"
#include "oplearn/solver.hpp"
#include "oplearn/spectral.hpp"

namespace oplearn {

namespace {

int floor_kn(long n, int d) {
  // Allows K_n = 0 (n = 1) for the pure evaluators; fitting enforces n >= 3^d.
  if (n < 1) throw std::invalid_argument("bounds: n must be >= 1");
  if (d != 1 && d != 2) throw std::invalid_argument("bounds: d must be 1 or 2");
  double root = d == 1 ? double(n) : std::sqrt(double(n));
  return int(std::floor((root - 1.0) / 2.0 + 1e-12));
}

}  // namespace

double shell_sum_A(long n, double s, int d) {
  int K = floor_kn(n, d);
  double acc = 0.0;
  if (d == 1) {
    for (int k = -K; k <= K; ++k) {
      if (k == 0) continue;
      acc += std::pow(1.0 + double(k) * k, -s);
    }
  } else {
    for (int k1 = -K; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        acc += std::pow(1.0 + double(k1) * k1 + double(k2) * k2, -s);
      }
  }
  return acc;
}

double gamma_n(long n, double s, int d) { return std::sqrt(1.0 + shell_sum_A(n, s, d)); }

double upper_bound(const BoundParams& p) {
  return p.hs_norm *
         (p.eps * gamma_n(p.n, p.s, p.d) +
          std::pow(3.0, p.s) * std::pow(double(p.n), -p.s / p.d));
}

Field adversarial_solve(const Field& u, double eps, double T, double hbar, double mass) {
  Field out = free_exact(u, T, hbar, mass);
  // phi_0 is the constant mode with unit L2 norm.
  cplx shift = eps * std::pow(u.grid.L, -0.5 * u.grid.d);
  for (auto& z : out.values) z += shift;
  return out;
}

std::array<int, 2> hard_test_out_index(long n, int d) {
  double kn = Estimator::k_n(n, d);
  int m = int(std::ceil(kn + 1.0 - 1e-12));
  if (d == 1) return {-m, 0};
  return {-m, -m};
}

CoeffMap hard_test_coeffs(long n, double s, const Grid& grid) {
  int Kf = floor_kn(n, grid.d);
  auto out_idx = hard_test_out_index(n, grid.d);
  int nyq = grid.n_per_dim / 2;
  if (std::abs(out_idx[0]) > nyq || std::abs(out_idx[1]) > nyq)
    throw std::invalid_argument("hard_test_coeffs: grid too small to hold the out-of-band mode");

  CoeffMap c(grid);
  double A = shell_sum_A(n, s, grid.d);
  double norm_in = 1.0 / std::sqrt(2.0 * A);
  double sum_sq = 0.0;
  if (grid.d == 1) {
    for (int k = -Kf; k <= Kf; ++k) {
      if (k == 0) continue;
      double v = std::pow(1.0 + double(k) * k, -s) * norm_in;
      c.at(k) = v;
      sum_sq += v * v;
    }
  } else {
    for (int k1 = -Kf; k1 <= Kf; ++k1)
      for (int k2 = -Kf; k2 <= Kf; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        double v = std::pow(1.0 + double(k1) * k1 + double(k2) * k2, -s) * norm_in;
        c.at(k1, k2) = v;
        sum_sq += v * v;
      }
  }
  double l2 = double(out_idx[0]) * out_idx[0] + double(out_idx[1]) * out_idx[1];
  double cl = 1.0 / (std::sqrt(2.0) * std::pow(1.0 + l2, 0.5 * s));
  c.at(out_idx[0], out_idx[1]) = cl;
  sum_sq += cl * cl;
  if (sum_sq > 1.0) throw std::runtime_error("hard_test_coeffs: cannot normalize, mass > 1");
  c.at(0, 0) = std::sqrt(1.0 - sum_sq);
  return c;
}

Field hard_test_function(long n, double s, const Grid& grid) {
  return inverse_coeffs(hard_test_coeffs(n, s, grid));
}

double timegen_bound_constant_v(const BoundParams& p) {
  if (p.q < 1) throw std::invalid_argument("timegen bound: q must be >= 1");
  return p.q * upper_bound(p);
}

double timegen_bound_constant_v(const BoundParams& p, double measured_one_step) {
  if (p.q < 1) throw std::invalid_argument("timegen bound: q must be >= 1");
  return p.q * measured_one_step;
}

}  // namespace oplearn
