// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_BOUNDS_HPP
#define OPLEARN_BOUNDS_HPP

#include "oplearn/grid.hpp"

namespace oplearn {

struct BoundParams {
  long n = 9;          // sample budget
  double s = 1.0;      // Sobolev smoothness
  int d = 2;           // dimension
  double eps = 0.0;    // solver accuracy
  double hs_norm = 1;  // ||psi||_{H^s}
  int q = 1;           // time steps
};

// Exact noise-accumulation factor sqrt(sum_{|k|_inf <= floor(K_n)} (1+|k|_2^2)^{-s}).
double gamma_n(long n, double s, int d);

// Shell sum A_n = sum_{0 < |k|_inf <= floor(K_n)} (1+|k|_2^2)^{-s}.
double shell_sum_A(long n, double s, int d);

// hs_norm * (eps * gamma_n + 3^s * n^{-s/d}).
double upper_bound(const BoundParams& p);

// Worst-case solver P(u) = free_exact(u, T) + eps * phi_0; an eps-accurate
// oracle for the free evolution that shifts every response by the same
// constant mode.
Field adversarial_solve(const Field& u, double eps, double T, double hbar = 1.0,
                        double mass = 1.0);

// Deterministic hard test function: c_k = (1+|k|_2^2)^{-s} / sqrt(2 A_n) for
// 0 < |k|_inf <= floor(K_n), c_l = 1/(sqrt(2) (1+|l|_2^2)^{s/2}) at the
// lexicographically smallest index with |l|_inf = ceil(K_n + 1), and c_0 >= 0
// chosen so the L2 norm is exactly 1. All coefficients are nonnegative reals.
CoeffMap hard_test_coeffs(long n, double s, const Grid& grid);
Field hard_test_function(long n, double s, const Grid& grid);

// The just-out-of-band index used by hard_test_function.
std::array<int, 2> hard_test_out_index(long n, int d);

// Constant-potential time-generalization bound: q times the one-step bound,
// either analytic (from p) or a measured one-step value.
double timegen_bound_constant_v(const BoundParams& p);
double timegen_bound_constant_v(const BoundParams& p, double measured_one_step);

}  // namespace oplearn

#endif
