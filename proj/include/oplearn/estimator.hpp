// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_ESTIMATOR_HPP
#define OPLEARN_ESTIMATOR_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oplearn/grid.hpp"
#include "oplearn/sphere.hpp"

namespace oplearn {

// Rank-one-sum estimator of the evolution operator, built by actively
// querying a solver on orthonormal basis functions: Fourier modes phi_k for
// |k|_inf <= k_max on the torus, spherical harmonics Y_l^m for l <= l_max on
// the sphere. Each query stores the solver response expanded in the same
// basis at full resolution; applying the estimator is
//   sum_queried  column_k * <psi, basis_k>.
//
// Queried index order (also the persistence order): torus lexicographic,
// k1 = -K..K outer then k2 = -K..K; sphere (l,m) with l ascending and
// m = -l..l. Torus columns hold every Nyquist-limited coefficient in FFT
// slot order; sphere columns hold all (l_max+1)^2 coefficients.
class Estimator {
 public:
  enum class BasisKind { Torus, Sphere };

  using TorusOracle = std::function<Field(const Field&)>;
  using SphereOracle = std::function<SphereField(const SphereField&)>;

  struct Options {
    double noise_rel = 0.0;  // relative level of the query measurement noise
    double mask_p = 0.0;     // probability of zeroing a stored coefficient
    std::uint64_t seed = 0;  // root of all fit-time random streams
    std::string solver_digest;
  };

  struct UnitarityReport {
    double max_gram_error = 0.0;  // over random pairs in the queried span
    double max_expansion = 0.0;   // max ||F u|| / ||u|| over full-band fields
  };

  // Per-axis frequency cutoff (n^{1/d} - 1)/2 for a sample budget n >= 3^d.
  static double k_n(long n, int d);
  static int k_n_floor(long n, int d);

  static Estimator fit(const Grid& grid, int k_max, const TorusOracle& solve,
                       const Options& opt);
  // Derives k_max from the sample budget; (2 floor(K_n) + 1)^d <= budget.
  static Estimator fit_budget(const Grid& grid, long budget, const TorusOracle& solve,
                              const Options& opt);
  static Estimator fit(const SphereGrid& grid, int l_max, const SphereOracle& solve,
                       const Options& opt);

  Field apply(const Field& psi) const;
  SphereField apply(const SphereField& psi) const;
  // Same results as applying one by one (bit for bit), but streams the stored
  // columns once per batch block instead of once per field.
  std::vector<Field> apply_batch(const std::vector<Field>& psis) const;
  std::vector<SphereField> apply_batch(const std::vector<SphereField>& psis) const;

  Field apply_power(const Field& psi, int q) const;
  SphereField apply_power(const SphereField& psi, int q) const;

  // Extends a torus estimator to the budget's larger cutoff, querying only
  // the new index shells; existing columns are reused bit for bit. Rejects
  // shrinking budgets; an unchanged cutoff returns a copy with zero queries.
  Estimator update(long new_budget, const TorusOracle& solve) const;

  // View of the estimator at a smaller cutoff (columns for |k|_inf <= k_max).
  // Equals a fresh noiseless fit at that cutoff since query streams are
  // keyed per index.
  Estimator restrict_band(int k_max) const;

  UnitarityReport weak_unitarity_report(int trials, std::uint64_t seed) const;

  void save(const std::string& path) const;
  static Estimator load(const std::string& path);

  BasisKind basis_kind() const { return kind_; }
  int band() const { return band_; }  // k_max (torus) or l_max (sphere)
  const Grid& torus_grid() const { return grid_; }
  const SphereGrid& sphere_grid() const { return sgrid_; }
  std::size_t num_queried() const { return columns_.size(); }
  std::size_t coeffs_per_column() const { return ncoeffs_; }
  const ComplexVec& column(std::size_t i) const { return columns_[i]; }
  // Queried integer index of column i: {k1,k2} on the torus, {l,m} on the sphere.
  std::array<int, 2> queried_index(std::size_t i) const;
  const Options& options() const { return opt_; }

 private:
  Estimator() = default;

  void fit_columns(const std::vector<std::size_t>& which);
  ComplexVec analyze_values(const ComplexVec& values) const;
  void synthesize_values(const ComplexVec& coeffs, ComplexVec& values) const;
  ComplexVec mode_values(std::size_t queried_i) const;
  double values_l2(const ComplexVec& values) const;
  double domain_volume() const;
  std::vector<std::size_t> band_coeff_slots() const;  // coeff slot per queried index
  void accumulate(const std::vector<const cplx*>& in_coeffs, std::vector<cplx*>& out_coeffs,
                  std::size_t nfields) const;

  BasisKind kind_ = BasisKind::Torus;
  Grid grid_;
  SphereGrid sgrid_;
  std::shared_ptr<const SphereBasis> sbasis_;
  int band_ = 0;
  std::size_t ncoeffs_ = 0;
  Options opt_;
  TorusOracle torus_solve_;    // only set during fitting
  SphereOracle sphere_solve_;  // only set during fitting
  std::vector<ComplexVec> columns_;
};

}  // namespace oplearn

#endif
