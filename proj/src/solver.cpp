// SPDX-License-Identifier: Apache-2.0
#include "oplearn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "oplearn/spectral.hpp"

namespace oplearn {

namespace {

void multiply_inplace(ComplexVec& a, const ComplexVec& b) {
  double* x = reinterpret_cast<double*>(a.data());
  const double* y = reinterpret_cast<const double*>(b.data());
  std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    double xr = x[2 * i], xi = x[2 * i + 1];
    double yr = y[2 * i], yi = y[2 * i + 1];
    x[2 * i] = xr * yr - xi * yi;
    x[2 * i + 1] = xr * yi + xi * yr;
  }
}

}  // namespace

int SolverConfig::num_steps() const {
  validate();
  return int(std::llround(T / dt));
}

void SolverConfig::validate() const {
  if (!(hbar > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("SolverConfig: hbar and mass must be > 0");
  if (!(dt > 0.0) || !(dt <= T))
    throw std::invalid_argument("SolverConfig: require 0 < dt <= T");
  double ratio = T / dt;
  long long steps = std::llround(ratio);
  if (steps < 1 || std::abs(ratio - double(steps)) > 0.5)
    throw std::invalid_argument("SolverConfig: T/dt must be within 0.5 of an integer >= 1");
}

Propagator::Propagator(const Grid& grid, const Potential& p, const SolverConfig& cfg)
    : grid_(grid), cfg_(cfg), pot_digest_(p.digest()) {
  cfg.validate();
  steps_ = cfg.num_steps();
  double dt = cfg.dt_effective();

  // Kinetic phase with the 1/N normalization of the backward FFT folded in.
  std::size_t npts = grid.num_points();
  kinetic_phase_.resize(npts);
  double inv_n = 1.0 / double(npts);
  double w = 2.0 * std::numbers::pi / grid.L;
  double c = cfg.hbar * dt / (2.0 * cfg.mass);
  int n = grid.n_per_dim;
  if (grid.d == 1) {
    for (int i = 0; i < n; ++i) {
      double k = w * grid.freq_of_index(i);
      double ph = -c * k * k;
      kinetic_phase_[i] = inv_n * cplx{std::cos(ph), std::sin(ph)};
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      double k1 = w * grid.freq_of_index(i1);
      for (int i2 = 0; i2 < n; ++i2) {
        double k2 = w * grid.freq_of_index(i2);
        double ph = -c * (k1 * k1 + k2 * k2);
        kinetic_phase_[std::size_t(i1) * n + i2] = inv_n * cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }

  static_potential_ = !p.time_dependent();
  auto make_half_phase = [&](double t_mid) {
    RealVec v = p.evaluate(grid, t_mid);
    ComplexVec ph(npts);
    double s = -dt / (2.0 * cfg.hbar);
    for (std::size_t i = 0; i < npts; ++i) {
      double a = s * v[i];
      ph[i] = cplx{std::cos(a), std::sin(a)};
    }
    return ph;
  };
  // Adjacent half phases of consecutive steps are fused into one bridge
  // multiply, so each step costs one grid-space pass plus the kinetic pass.
  if (static_potential_) {
    pre_phase_ = make_half_phase(cfg.t_start);
    post_phase_ = pre_phase_;
    if (steps_ > 1) {
      ComplexVec full(npts);
      for (std::size_t i = 0; i < npts; ++i) full[i] = pre_phase_[i] * pre_phase_[i];
      bridge_phases_.push_back(std::move(full));
    }
  } else {
    std::vector<ComplexVec> halves;
    halves.reserve(steps_);
    for (int s = 0; s < steps_; ++s)
      halves.push_back(make_half_phase(cfg.t_start + (s + 0.5) * dt));
    pre_phase_ = halves.front();
    post_phase_ = halves.back();
    bridge_phases_.reserve(steps_ > 0 ? steps_ - 1 : 0);
    for (int s = 0; s + 1 < steps_; ++s) {
      ComplexVec b(npts);
      for (std::size_t i = 0; i < npts; ++i) b[i] = halves[s][i] * halves[s + 1][i];
      bridge_phases_.push_back(std::move(b));
    }
  }
}

void Propagator::evolve_inplace(ComplexVec& values) const {
  if (values.size() != grid_.num_points())
    throw std::invalid_argument("Propagator: field size mismatch");
  ComplexVec scratch(values.size());
  multiply_inplace(values, pre_phase_);
  for (int s = 0; s < steps_; ++s) {
    fft::forward(grid_, values.data(), scratch.data());
    multiply_inplace(scratch, kinetic_phase_);
    fft::backward(grid_, scratch.data(), values.data());
    if (s + 1 < steps_)
      multiply_inplace(values, bridge_phases_[static_potential_ ? 0 : s]);
    else
      multiply_inplace(values, post_phase_);
  }
}

Field Propagator::evolve(const Field& psi0) const {
  if (!(psi0.grid == grid_)) throw std::invalid_argument("Propagator: grid mismatch");
  Field out = psi0;
  evolve_inplace(out.values);
  return out;
}

std::string Propagator::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << "potential=" << pot_digest_ << ";T=" << cfg_.T << ";dt=" << cfg_.dt
     << ";t_start=" << cfg_.t_start << ";hbar=" << cfg_.hbar << ";mass=" << cfg_.mass;
  return os.str();
}

Field evolve(const Field& psi0, const Potential& p, const SolverConfig& cfg) {
  return Propagator(psi0.grid, p, cfg).evolve(psi0);
}

Field free_exact(const Field& psi0, double T, double hbar, double mass) {
  CoeffMap c = forward_coeffs(psi0);
  const Grid& g = psi0.grid;
  double w = 2.0 * std::numbers::pi / g.L;
  double s = -hbar * T / (2.0 * mass);
  int n = g.n_per_dim;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i) {
      double k = w * g.freq_of_index(i);
      double ph = s * k * k;
      c.c[i] *= cplx{std::cos(ph), std::sin(ph)};
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      double k1 = w * g.freq_of_index(i1);
      for (int i2 = 0; i2 < n; ++i2) {
        double k2 = w * g.freq_of_index(i2);
        double ph = s * (k1 * k1 + k2 * k2);
        c.c[std::size_t(i1) * n + i2] *= cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }
  return inverse_coeffs(c);
}

double convergence_order(const Field& psi0, const Potential& p, double T,
                         std::vector<double> dt_list, double hbar, double mass) {
  if (dt_list.size() < 3)
    throw std::invalid_argument("convergence_order: need at least 3 dt values");
  std::sort(dt_list.begin(), dt_list.end(), std::greater<>());
  // The reference runs at a quarter of the finest listed dt so its own
  // error (~6% of the coarsest point's) does not bias the fitted slope.
  double dt_ref = dt_list.back() / 4.0;
  SolverConfig ref_cfg{T, dt_ref, 0.0, hbar, mass};
  Field ref = evolve(psi0, p, ref_cfg);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (double dt : dt_list) {
    SolverConfig cfg{T, dt, 0.0, hbar, mass};
    Field u = evolve(psi0, p, cfg);
    double err = 0.0;
    for (std::size_t j = 0; j < u.values.size(); ++j) err += std::norm(u.values[j] - ref.values[j]);
    err = std::sqrt(err * psi0.grid.cell_volume());
    double x = std::log(dt), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace oplearn
