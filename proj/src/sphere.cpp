// SPDX-License-Identifier: Apache-2.0
#include "oplearn/sphere.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "oplearn/solver.hpp"

namespace oplearn {

namespace {
constexpr double kPi = std::numbers::pi;
}

SphereGrid::SphereGrid(int n_phi_, int n_theta_) : n_phi(n_phi_), n_theta(n_theta_) {
  if (n_phi < 4 || n_theta < 2) throw std::invalid_argument("SphereGrid: grid too small");
}

double SphereGrid::theta(int i) const { return (i + 0.5) * kPi / n_theta; }
double SphereGrid::phi(int j) const { return j * 2.0 * kPi / n_phi; }

std::vector<double> SphereGrid::theta_weights() const {
  // Fejer-type midpoint weights: w_i = (2/N)[1 + 2 sum_j cos(2j theta_i)/(1-4j^2)],
  // exact for integrands cos^p(theta) sin(theta) with p <= N-2; sum_i w_i = 2.
  int N = n_theta;
  std::vector<double> w(N);
  for (int i = 0; i < N; ++i) {
    double th = theta(i);
    double acc = 1.0;
    for (int j = 1; j <= N / 2 - 1; ++j)
      acc += 2.0 * std::cos(2.0 * j * th) / (1.0 - 4.0 * double(j) * j);
    w[i] = 2.0 / N * acc;
  }
  return w;
}

std::vector<double> SphereGrid::point_weights() const {
  std::vector<double> tw = theta_weights();
  std::vector<double> w(num_points());
  double hphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) w[std::size_t(i) * n_phi + j] = tw[i] * hphi;
  return w;
}

namespace {

// Fully normalized associated Legendre values Ptilde_l^m(cos theta) for
// 0 <= m <= l <= l_max, such that Y_l^m = Ptilde_l^m e^{i m phi} has unit L2
// norm on the sphere. Condon-Shortley phase included. Standard stable
// recurrences; l_max here is small (<= ~32).
std::vector<double> legendre_table(int l_max, double x, double sin_theta) {
  auto idx = [l_max](int l, int m) { return std::size_t(l) * (l + 1) / 2 + m; };
  std::vector<double> P(idx(l_max, l_max) + 1, 0.0);
  P[idx(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= l_max; ++m)
    P[idx(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_theta * P[idx(m - 1, m - 1)];
  for (int m = 0; m < l_max; ++m)
    P[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * P[idx(m, m)];
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                           (4.0 * double(l - 1) * (l - 1) - 1.0));
      P[idx(l, m)] = a * (x * P[idx(l - 1, m)] - b * P[idx(l - 2, m)]);
    }
  }
  return P;
}

}  // namespace

SphereBasis::SphereBasis(const SphereGrid& grid, int l_max) : grid_(grid), l_max_(l_max) {
  if (l_max < 0) throw std::invalid_argument("SphereBasis: l_max must be >= 0");
  if (2 * l_max > grid.n_theta - 2)
    throw std::invalid_argument("SphereBasis: need n_theta >= 2*l_max + 2 for exact quadrature");
  if (2 * l_max + 1 > grid.n_phi)
    throw std::invalid_argument("SphereBasis: need n_phi >= 2*l_max + 1");
  weights_ = grid.point_weights();

  std::size_t npts = grid.num_points();
  ylm_.resize(num_modes() * npts);
  auto idx = [l_max](int l, int m) { return std::size_t(l) * (l + 1) / 2 + m; };
  for (int it = 0; it < grid.n_theta; ++it) {
    double th = grid.theta(it);
    std::vector<double> P = legendre_table(l_max, std::cos(th), std::sin(th));
    for (int ip = 0; ip < grid.n_phi; ++ip) {
      double ph = grid.phi(ip);
      std::size_t pt = std::size_t(it) * grid.n_phi + ip;
      for (int l = 0; l <= l_max; ++l) {
        for (int m = 0; m <= l; ++m) {
          cplx e{std::cos(m * ph), std::sin(m * ph)};
          cplx y = P[idx(l, m)] * e;
          ylm_[SphCoeffMap::slot(l, m) * npts + pt] = y;
          if (m > 0) {
            // Y_{l,-m} = (-1)^m conj(Y_{l,m})
            cplx ym = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
            ylm_[SphCoeffMap::slot(l, -m) * npts + pt] = ym;
          }
        }
      }
    }
  }
}

SphereField SphereBasis::mode(int l, int m) const {
  if (l < 0 || l > l_max_ || std::abs(m) > l)
    throw std::invalid_argument("sph_harmonic: index out of range");
  SphereField f(grid_);
  std::size_t npts = grid_.num_points();
  const cplx* src = ylm_.data() + SphCoeffMap::slot(l, m) * npts;
  std::copy(src, src + npts, f.values.begin());
  return f;
}

void SphereBasis::analyze_raw(const cplx* values, cplx* coeffs) const {
  std::size_t npts = grid_.num_points();
  std::size_t nm = num_modes();
  for (std::size_t s = 0; s < nm; ++s) {
    const cplx* y = ylm_.data() + s * npts;
    double sr = 0.0, si = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
      // f * conj(Y) * w
      double fr = values[p].real(), fi = values[p].imag();
      double yr = y[p].real(), yi = y[p].imag();
      double w = weights_[p];
      sr += w * (fr * yr + fi * yi);
      si += w * (fi * yr - fr * yi);
    }
    coeffs[s] = {sr, si};
  }
}

void SphereBasis::synthesize_raw(const cplx* coeffs, cplx* values) const {
  std::size_t npts = grid_.num_points();
  std::size_t nm = num_modes();
  std::fill(values, values + npts, cplx{0.0, 0.0});
  double* out = reinterpret_cast<double*>(values);
  for (std::size_t s = 0; s < nm; ++s) {
    const double* y = reinterpret_cast<const double*>(ylm_.data() + s * npts);
    double cr = coeffs[s].real(), ci = coeffs[s].imag();
    for (std::size_t p = 0; p < npts; ++p) {
      out[2 * p] += cr * y[2 * p] - ci * y[2 * p + 1];
      out[2 * p + 1] += cr * y[2 * p + 1] + ci * y[2 * p];
    }
  }
}

SphCoeffMap SphereBasis::analyze(const SphereField& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("sht_forward: grid mismatch");
  SphCoeffMap c(grid_, l_max_);
  analyze_raw(f.values.data(), c.c.data());
  return c;
}

SphereField SphereBasis::synthesize(const SphCoeffMap& c) const {
  SphereField f(grid_);
  synthesize_raw(c.c.data(), f.values.data());
  return f;
}

std::shared_ptr<const SphereBasis> get_sphere_basis(const SphereGrid& grid, int l_max) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const SphereBasis>> cache;
  std::scoped_lock lock(mu);
  auto key = std::tuple(grid.n_phi, grid.n_theta, l_max);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::make_shared<const SphereBasis>(grid, l_max);
  cache[key] = basis;
  return basis;
}

SphereField sph_harmonic(int l, int m, const SphereGrid& grid) {
  return get_sphere_basis(grid, l)->mode(l, m);
}

SphCoeffMap sht_forward(const SphereField& f, int l_max) {
  return get_sphere_basis(f.grid, l_max)->analyze(f);
}

SphereField sht_inverse(const SphCoeffMap& c) {
  return get_sphere_basis(c.grid, c.l_max)->synthesize(c);
}

cplx sph_inner_product(const SphereField& u, const SphereField& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("sph_inner_product: grid mismatch");
  std::vector<double> w = u.grid.point_weights();
  double sr = 0.0, si = 0.0;
  for (std::size_t p = 0; p < u.values.size(); ++p) {
    double ar = u.values[p].real(), ai = u.values[p].imag();
    double br = v.values[p].real(), bi = v.values[p].imag();
    sr += w[p] * (ar * br + ai * bi);
    si += w[p] * (ai * br - ar * bi);
  }
  return {sr, si};
}

double sph_l2_norm(const SphereField& f) {
  std::vector<double> w = f.grid.point_weights();
  double s = 0.0;
  for (std::size_t p = 0; p < f.values.size(); ++p) s += w[p] * std::norm(f.values[p]);
  return std::sqrt(s);
}

double sph_sobolev_norm(const SphCoeffMap& c, double s) {
  if (s < 0.0) throw std::invalid_argument("sph_sobolev_norm: s must be >= 0");
  double acc = 0.0;
  for (int l = 0; l <= c.l_max; ++l) {
    double w = std::pow(1.0 + double(l) * (l + 1), s);
    for (int m = -l; m <= l; ++m) acc += w * std::norm(c.at(l, m));
  }
  return std::sqrt(acc);
}

SpherePotential SpherePotential::coulomb(double k, double e) {
  SpherePotential p;
  p.dipole_ = false;
  p.k_ = k;
  p.e_ = e;
  return p;
}

SpherePotential SpherePotential::dipole(double V0) {
  SpherePotential p;
  p.dipole_ = true;
  p.V0_ = V0;
  return p;
}

SpherePotential SpherePotential::from_config(const std::string& name,
                                             const nlohmann::json& params) {
  auto get = [&params](const char* key, double dflt) {
    return params.contains(key) ? params.at(key).get<double>() : dflt;
  };
  if (name == "coulomb") return coulomb(get("k", 1.0), get("e", 1.0));
  if (name == "dipole" || name == "coulomb_dipole") return dipole(get("V0", 1.0));
  throw std::invalid_argument("unknown sphere potential: " + name);
}

std::vector<double> SpherePotential::evaluate(const SphereGrid& grid) const {
  std::vector<double> v(grid.num_points());
  if (!dipole_) {
    double val = -k_ * e_ * e_;  // r = 1
    for (auto& x : v) x = val;
  } else {
    for (int it = 0; it < grid.n_theta; ++it) {
      double c = V0_ * std::cos(grid.theta(it));
      for (int ip = 0; ip < grid.n_phi; ++ip) v[std::size_t(it) * grid.n_phi + ip] = c;
    }
  }
  return v;
}

std::string SpherePotential::digest() const {
  std::ostringstream os;
  os.precision(17);
  if (dipole_)
    os << "dipole;V0=" << V0_;
  else
    os << "coulomb;k=" << k_ << ";e=" << e_;
  return os.str();
}

SpherePropagator::SpherePropagator(std::shared_ptr<const SphereBasis> basis,
                                   const SpherePotential& p, const SolverConfig& cfg)
    : basis_(std::move(basis)), pot_digest_(p.digest()) {
  cfg.validate();
  T_ = cfg.T;
  hbar_ = cfg.hbar;
  mass_ = cfg.mass;
  steps_ = cfg.num_steps();
  dt_ = cfg.dt_effective();

  int l_max = basis_->l_max();
  kinetic_phase_.resize(basis_->num_modes());
  for (int l = 0; l <= l_max; ++l) {
    double ph = -hbar_ * double(l) * (l + 1) * dt_ / (2.0 * mass_);
    cplx z{std::cos(ph), std::sin(ph)};
    for (int m = -l; m <= l; ++m) kinetic_phase_[SphCoeffMap::slot(l, m)] = z;
  }

  std::vector<double> v = p.evaluate(basis_->grid());
  half_phase_.resize(v.size());
  double s = -dt_ / (2.0 * hbar_);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = s * v[i];
    half_phase_[i] = cplx{std::cos(a), std::sin(a)};
  }
}

void SpherePropagator::evolve_inplace(ComplexVec& values) const {
  std::size_t npts = basis_->grid().num_points();
  if (values.size() != npts) throw std::invalid_argument("SpherePropagator: size mismatch");
  ComplexVec coeffs(basis_->num_modes());
  for (int s = 0; s < steps_; ++s) {
    for (std::size_t i = 0; i < npts; ++i) values[i] *= half_phase_[i];
    basis_->analyze_raw(values.data(), coeffs.data());
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= kinetic_phase_[i];
    basis_->synthesize_raw(coeffs.data(), values.data());
    for (std::size_t i = 0; i < npts; ++i) values[i] *= half_phase_[i];
  }
}

SphereField SpherePropagator::evolve(const SphereField& psi0) const {
  if (!(psi0.grid == basis_->grid()))
    throw std::invalid_argument("SpherePropagator: grid mismatch");
  SphereField out = psi0;
  evolve_inplace(out.values);
  return out;
}

std::string SpherePropagator::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << "potential=" << pot_digest_ << ";T=" << T_ << ";dt=" << dt_ << ";hbar=" << hbar_
     << ";mass=" << mass_ << ";l_max=" << basis_->l_max();
  return os.str();
}

SphereField evolve_sphere(const SphereField& psi0, const SpherePotential& p,
                          const SolverConfig& cfg, int l_max) {
  return SpherePropagator(get_sphere_basis(psi0.grid, l_max), p, cfg).evolve(psi0);
}

}  // namespace oplearn
