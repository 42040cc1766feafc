// SPDX-License-Identifier: Apache-2.0
#include "oplearn/potentials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "oplearn/rng.hpp"
#include "oplearn/spectral.hpp"

namespace oplearn {

namespace {

constexpr double kPi = std::numbers::pi;

// Periodic (min-image) displacement on [0,L).
double wrap_dist(double x, double c, double L) {
  double d = std::fmod(std::abs(x - c), L);
  return std::min(d, L - d);
}

}  // namespace

Potential Potential::free_particle() {
  Potential p;
  p.kind_ = Kind::Free;
  return p;
}

Potential Potential::constant(double a) {
  Potential p;
  p.kind_ = Kind::Constant;
  p.a_ = a;
  return p;
}

Potential Potential::barrier(double V0, double w, std::vector<double> slit_centers, double x0) {
  Potential p;
  p.kind_ = Kind::Barrier;
  p.V0_ = V0;
  p.w_ = w;
  p.slit_centers_ = slit_centers.empty() ? std::vector<double>{kPi} : std::move(slit_centers);
  p.x0_ = x0 < 0.0 ? kPi : x0;
  return p;
}

Potential Potential::harmonic(double mass, double omega) {
  Potential p;
  p.kind_ = Kind::Harmonic;
  p.mass_ = mass;
  p.omega_ = omega;
  return p;
}

Potential Potential::random_field(double alpha, double beta, double gamma, std::uint64_t seed,
                                  const Grid& grid) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("random_field: alpha, beta must be > 0");
  if (!(gamma > 0.5 * grid.d))
    throw std::invalid_argument("random_field: gamma must exceed d/2");
  Potential p;
  p.kind_ = Kind::RandomField;
  p.alpha_ = alpha;
  p.beta_ = beta;
  p.gamma_ = gamma;
  p.seed_ = seed;
  p.rf_grid_ = grid;

  // Complex GRF draw with per-mode streams keyed by the integer frequency
  // vector, then the real part pointwise. Taking Re is the same as drawing
  // Hermitian-symmetric coefficients, so V is real by construction.
  CoeffMap c(grid);
  RngStream root = RngStream(seed).derive("grf-potential");
  int n = grid.n_per_dim;
  for (int i1 = 0; i1 < (grid.d == 1 ? 1 : n); ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      std::size_t slot = grid.d == 1 ? std::size_t(i2) : std::size_t(i1) * n + i2;
      auto kv = grid.freqs_of_slot(slot);
      double k2 = double(kv[0]) * kv[0] + double(kv[1]) * kv[1];
      double scale =
          std::sqrt(alpha) * std::pow(4.0 * kPi * kPi * k2 + beta, -0.5 * gamma);
      RngStream st = root.derive(std::uint64_t(std::int64_t(kv[0]) + 0x40000000LL))
                         .derive(std::uint64_t(std::int64_t(kv[1]) + 0x40000000LL));
      // Z ~ standard complex normal with E|Z|^2 = 1
      c.c[slot] = scale * st.complex_normal() / std::sqrt(2.0);
    }
  }
  Field g = inverse_coeffs(c);
  p.rf_values_.resize(g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i) p.rf_values_[i] = g.values[i].real();
  return p;
}

Potential Potential::paul_trap(double U0, double V0, double omega, double r0) {
  Potential p;
  p.kind_ = Kind::PaulTrap;
  p.U0_ = U0;
  p.V0_ = V0;
  p.omega_ = omega;
  p.r0_ = r0;
  return p;
}

Potential Potential::shaken_lattice(double V0, double k, double A, double omega) {
  Potential p;
  p.kind_ = Kind::ShakenLattice;
  p.V0_ = V0;
  p.klat_ = k;
  p.A_ = A;
  p.omega_ = omega;
  return p;
}

Potential Potential::gaussian_pulse(double V0, double x0, double y0, double sigma_x,
                                    double sigma_y, double sigma_t,
                                    std::vector<double> t_centers) {
  Potential p;
  p.kind_ = Kind::GaussianPulse;
  p.V0_ = V0;
  p.x0_ = x0;
  p.y0_ = y0;
  p.sx_ = sigma_x;
  p.sy_ = sigma_y;
  p.st_ = sigma_t;
  p.t_centers_ = std::move(t_centers);
  return p;
}

Potential Potential::from_config(const std::string& name, const nlohmann::json& params,
                                 const Grid& grid, std::uint64_t seed) {
  auto get = [&params](const char* key, double dflt) {
    return params.contains(key) ? params.at(key).get<double>() : dflt;
  };
  if (name == "free" || name == "free_particle") return free_particle();
  if (name == "constant") return constant(get("a", 0.0));
  if (name == "barrier") {
    std::vector<double> centers;
    if (params.contains("slit_centers"))
      centers = params.at("slit_centers").get<std::vector<double>>();
    return barrier(get("V0", 50.0), get("w", 0.2), centers, get("x0", -1.0));
  }
  if (name == "harmonic_oscillator" || name == "harmonic")
    return harmonic(get("m", 1.0), get("omega", 2.0));
  if (name == "random_field" || name == "random") {
    std::uint64_t s = params.contains("seed") ? params.at("seed").get<std::uint64_t>() : seed;
    return random_field(get("alpha", 1.0), get("beta", 1.0), get("gamma", 4.0), s, grid);
  }
  if (name == "paul_trap")
    return paul_trap(get("U0", 10.0), get("V0", 15.0), get("omega", 3.0), get("r0", 2.0));
  if (name == "shaken_lattice")
    return shaken_lattice(get("V0", 4.0), get("k", 4.0 * kPi), get("A", 0.08),
                          get("omega", 15.0));
  if (name == "gaussian_pulse") {
    std::vector<double> tc{0.0};
    if (params.contains("t_centers")) tc = params.at("t_centers").get<std::vector<double>>();
    return gaussian_pulse(get("V0", 100.0), get("x0", 0.0), get("y0", 0.0),
                          get("sigma_x", 1.2), get("sigma_y", 1.2), get("sigma_t", 1.0), tc);
  }
  throw std::invalid_argument("unknown torus potential: " + name);
}

std::string Potential::name() const {
  switch (kind_) {
    case Kind::Free: return "free";
    case Kind::Constant: return "constant";
    case Kind::Barrier: return "barrier";
    case Kind::Harmonic: return "harmonic_oscillator";
    case Kind::RandomField: return "random_field";
    case Kind::PaulTrap: return "paul_trap";
    case Kind::ShakenLattice: return "shaken_lattice";
    case Kind::GaussianPulse: return "gaussian_pulse";
  }
  return "?";
}

bool Potential::time_dependent() const {
  return kind_ == Kind::PaulTrap || kind_ == Kind::ShakenLattice ||
         kind_ == Kind::GaussianPulse;
}

RealVec Potential::evaluate(const Grid& grid, double t) const {
  if (grid.d != 2 && kind_ != Kind::Free && kind_ != Kind::Constant)
    throw std::invalid_argument("potential requires d = 2");
  RealVec v(grid.num_points(), 0.0);
  int n = grid.n_per_dim;
  double h = grid.spacing();

  switch (kind_) {
    case Kind::Free:
      break;
    case Kind::Constant:
      for (auto& x : v) x = a_;
      break;
    case Kind::Barrier: {
      // One grid column at the x closest to x0; slits are |y - c| <= w.
      int ix = 0;
      double best = 1e300;
      for (int i = 0; i < n; ++i) {
        double d = wrap_dist(i * h, x0_, grid.L);
        if (d < best) {
          best = d;
          ix = i;
        }
      }
      for (int j = 0; j < n; ++j) {
        double y = j * h;
        bool open = false;
        for (double c : slit_centers_)
          if (wrap_dist(y, c, grid.L) <= w_) open = true;
        v[std::size_t(ix) * n + j] = open ? 0.0 : V0_;
      }
      break;
    }
    case Kind::Harmonic: {
      double c = 0.5 * mass_ * omega_ * omega_;
      for (int i = 0; i < n; ++i) {
        double dx = i * h - kPi;
        for (int j = 0; j < n; ++j) {
          double dy = j * h - kPi;
          v[std::size_t(i) * n + j] = c * (dx * dx + dy * dy);
        }
      }
      break;
    }
    case Kind::RandomField: {
      if (!(grid == rf_grid_))
        throw std::invalid_argument("random_field: grid differs from the frozen draw");
      v = rf_values_;
      break;
    }
    case Kind::PaulTrap: {
      double c = (U0_ + V0_ * std::cos(omega_ * t)) / (r0_ * r0_);
      for (int i = 0; i < n; ++i) {
        double x = i * h;
        for (int j = 0; j < n; ++j) {
          double y = j * h;
          v[std::size_t(i) * n + j] = c * (x * x + y * y);
        }
      }
      break;
    }
    case Kind::ShakenLattice: {
      double shift = A_ * std::sin(omega_ * t);
      for (int i = 0; i < n; ++i) {
        double cx = V0_ * std::cos(klat_ * (i * h - shift));
        for (int j = 0; j < n; ++j)
          v[std::size_t(i) * n + j] = cx + V0_ * std::cos(klat_ * (j * h));
      }
      break;
    }
    case Kind::GaussianPulse: {
      double amp = 0.0;
      for (double t0 : t_centers_) amp += std::exp(-0.5 * (t - t0) * (t - t0) / (st_ * st_));
      amp *= V0_;
      for (int i = 0; i < n; ++i) {
        double dx = wrap_dist(i * h, x0_, grid.L);
        double ex = std::exp(-0.5 * dx * dx / (sx_ * sx_));
        for (int j = 0; j < n; ++j) {
          double dy = wrap_dist(j * h, y0_, grid.L);
          v[std::size_t(i) * n + j] = amp * ex * std::exp(-0.5 * dy * dy / (sy_ * sy_));
        }
      }
      break;
    }
  }
  return v;
}

std::string Potential::digest() const {
  std::ostringstream os;
  os.precision(17);
  os << name();
  switch (kind_) {
    case Kind::Free: break;
    case Kind::Constant: os << ";a=" << a_; break;
    case Kind::Barrier:
      os << ";V0=" << V0_ << ";w=" << w_ << ";x0=" << x0_ << ";slits=";
      for (double c : slit_centers_) os << c << ",";
      break;
    case Kind::Harmonic: os << ";m=" << mass_ << ";omega=" << omega_; break;
    case Kind::RandomField:
      os << ";alpha=" << alpha_ << ";beta=" << beta_ << ";gamma=" << gamma_
         << ";seed=" << seed_;
      break;
    case Kind::PaulTrap:
      os << ";U0=" << U0_ << ";V0=" << V0_ << ";omega=" << omega_ << ";r0=" << r0_;
      break;
    case Kind::ShakenLattice:
      os << ";V0=" << V0_ << ";k=" << klat_ << ";A=" << A_ << ";omega=" << omega_;
      break;
    case Kind::GaussianPulse:
      os << ";V0=" << V0_ << ";x0=" << x0_ << ";y0=" << y0_ << ";sx=" << sx_ << ";sy=" << sy_
         << ";st=" << st_ << ";tc=";
      for (double c : t_centers_) os << c << ",";
      break;
  }
  return os.str();
}

}  // namespace oplearn
