// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_RNG_HPP
#define OPLEARN_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace oplearn {

// Deterministic, platform-independent random streams (xoshiro256++ seeded by
// splitmix64). Streams are derived hierarchically from a root seed and salts,
// so every consumer (per query index, per trial, per purpose) owns an
// independent stream and results do not depend on evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : root_(seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  RngStream derive(std::uint64_t salt) const {
    std::uint64_t x = root_ ^ (0x9e3779b97f4a7c15ULL + salt * 0xbf58476d1ce4e5b9ULL);
    return RngStream(splitmix64(x));
  }

  RngStream derive(std::string_view tag) const { return derive(fnv1a(tag)); }

  // The seed this stream was constructed from; derived streams report their
  // own derived seed, usable to key further consumers.
  std::uint64_t root_seed() const { return root_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal pair via Box-Muller.
  void normal_pair(double& a, double& b) {
    double u1 = 1.0 - uniform();  // (0,1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    a = r * std::cos(phi);
    b = r * std::sin(phi);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double a, b;
    normal_pair(a, b);
    spare_ = b;
    have_spare_ = true;
    return a;
  }

  // Z_re + i Z_im with independent standard normal parts (E|z|^2 = 2).
  std::complex<double> complex_normal() {
    double a, b;
    normal_pair(a, b);
    return {a, b};
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t root_;
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace oplearn

#endif
