// SPDX-License-Identifier: Apache-2.0
#include "oplearn/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oplearn/spectral.hpp"

namespace oplearn {

namespace {
constexpr double kPi = std::numbers::pi;

RngStream mode_stream(const RngStream& root, int k1, int k2) {
  return root.derive(std::uint64_t(std::int64_t(k1) + 0x40000000LL))
      .derive(std::uint64_t(std::int64_t(k2) + 0x40000000LL));
}
}  // namespace

Field sample_grf(const GrfSpec& spec, const Grid& grid, const RngStream& stream) {
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0))
    throw std::invalid_argument("sample_grf: alpha, beta must be > 0");
  if (!(spec.gamma > 0.5 * grid.d))
    throw std::invalid_argument("sample_grf: gamma must exceed d/2");
  int bw = spec.bandwidth < 0 ? grid.n_per_dim / 2 : spec.bandwidth;
  CoeffMap c(grid);
  for (std::size_t slot = 0; slot < grid.num_points(); ++slot) {
    auto kv = grid.freqs_of_slot(slot);
    if (std::abs(kv[0]) > bw || std::abs(kv[1]) > bw) continue;
    double k2 = double(kv[0]) * kv[0] + double(kv[1]) * kv[1];
    double scale = std::sqrt(spec.alpha) * std::pow(4.0 * kPi * kPi * k2 + spec.beta,
                                                    -0.5 * spec.gamma);
    // E|Z|^2 = 1
    c.c[slot] = scale * mode_stream(stream, kv[0], kv[1]).complex_normal() / std::sqrt(2.0);
  }
  return inverse_coeffs(c);
}

SphereField sample_grf_sphere(const GrfSpec& spec, const SphereGrid& grid, int l_max,
                              const RngStream& stream) {
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0))
    throw std::invalid_argument("sample_grf_sphere: alpha, beta must be > 0");
  int bw = spec.bandwidth < 0 ? l_max : std::min(spec.bandwidth, l_max);
  SphCoeffMap c(grid, l_max);
  for (int l = 0; l <= bw; ++l) {
    double lam = double(l) * (l + 1);
    double scale = std::sqrt(spec.alpha) * std::pow(lam + spec.beta, -0.5 * spec.gamma);
    for (int m = -l; m <= l; ++m)
      c.at(l, m) = scale * mode_stream(stream, l, m).complex_normal() / std::sqrt(2.0);
  }
  return sht_inverse(c);
}

Field add_noise(const Field& f, const NoiseSpec& spec, const RngStream& stream) {
  if (spec.rel_level < 0.0) throw std::invalid_argument("add_noise: rel_level must be >= 0");
  if (spec.rel_level == 0.0) return f;
  Field out = f;
  double sigma = spec.rel_level * l2_norm(f) / std::sqrt(2.0 * f.grid.volume());
  RngStream st = stream;
  for (auto& z : out.values) z += sigma * st.complex_normal();
  return out;
}

SphereField add_noise(const SphereField& f, const NoiseSpec& spec, const RngStream& stream) {
  if (spec.rel_level < 0.0) throw std::invalid_argument("add_noise: rel_level must be >= 0");
  if (spec.rel_level == 0.0) return f;
  SphereField out = f;
  double sigma = spec.rel_level * sph_l2_norm(f) / std::sqrt(2.0 * 4.0 * kPi);
  RngStream st = stream;
  for (auto& z : out.values) z += sigma * st.complex_normal();
  return out;
}

CoeffMap mask_coeffs(const CoeffMap& c, double p, const RngStream& stream) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("mask_coeffs: require 0 <= p < 1");
  CoeffMap out = c;
  if (p == 0.0) return out;
  for (std::size_t s = 0; s < out.c.size(); ++s)
    if (stream.derive(std::uint64_t(s)).uniform() < p) out.c[s] = 0.0;
  return out;
}

SphCoeffMap mask_coeffs(const SphCoeffMap& c, double p, const RngStream& stream) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("mask_coeffs: require 0 <= p < 1");
  SphCoeffMap out = c;
  if (p == 0.0) return out;
  for (std::size_t s = 0; s < out.c.size(); ++s)
    if (stream.derive(std::uint64_t(s)).uniform() < p) out.c[s] = 0.0;
  return out;
}

double relative_error(const Field& pred, const Field& truth) {
  if (!(pred.grid == truth.grid)) throw std::invalid_argument("relative_error: grid mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    num += std::norm(pred.values[i] - truth.values[i]);
    den += std::norm(truth.values[i]);
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return std::sqrt(num / den);
}

double relative_error(const SphereField& pred, const SphereField& truth) {
  if (!(pred.grid == truth.grid)) throw std::invalid_argument("relative_error: grid mismatch");
  std::vector<double> w = truth.grid.point_weights();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    num += w[i] * std::norm(pred.values[i] - truth.values[i]);
    den += w[i] * std::norm(truth.values[i]);
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return std::sqrt(num / den);
}

}  // namespace oplearn
