// SPDX-License-Identifier: Apache-2.0
#include "oplearn/spectral.hpp"

#include <fftw3.h>
#include <malloc.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace oplearn {

namespace {
// Field-sized buffers (1 MB at 256^2) churn through mmap/munmap with glibc's
// default 128 KB threshold; keeping them on the heap arena removes the page
// fault cost of every transform and fit query.
struct MallocTuning {
  MallocTuning() {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
  }
};
const MallocTuning malloc_tuning;
}  // namespace

namespace fft {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// One plan pair per grid shape, created on 64-byte aligned scratch so it can
// be executed on any of our AlignedAllocator buffers. FFTW planning is not
// thread-safe; execution through fftw_execute_dft is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(const Grid& g) {
    std::scoped_lock lock(mu_);
    auto key = std::pair<int, int>(g.d, g.n_per_dim);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t n = g.num_points();
    ComplexVec a(n), b(n);
    auto* fa = reinterpret_cast<fftw_complex*>(a.data());
    auto* fb = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair p;
    if (g.d == 1) {
      p.fwd = fftw_plan_dft_1d(g.n_per_dim, fa, fb, FFTW_FORWARD, FFTW_MEASURE);
      p.bwd = fftw_plan_dft_1d(g.n_per_dim, fa, fb, FFTW_BACKWARD, FFTW_MEASURE);
    } else {
      p.fwd = fftw_plan_dft_2d(g.n_per_dim, g.n_per_dim, fa, fb, FFTW_FORWARD, FFTW_MEASURE);
      p.bwd = fftw_plan_dft_2d(g.n_per_dim, g.n_per_dim, fa, fb, FFTW_BACKWARD, FFTW_MEASURE);
    }
    plans_[key] = p;
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, PlanPair> plans_;
};

}  // namespace

void forward(const Grid& g, const cplx* in, cplx* out) {
  PlanPair p = PlanCache::instance().get(g);
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void backward(const Grid& g, const cplx* in, cplx* out) {
  PlanPair p = PlanCache::instance().get(g);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace fft

Field fourier_mode(const std::array<int, 2>& k, const Grid& grid) {
  int nyq = grid.n_per_dim / 2;
  for (int a = 0; a < grid.d; ++a) {
    if (k[a] < -nyq || k[a] > nyq)
      throw std::invalid_argument("fourier_mode: frequency beyond Nyquist");
  }
  Field f(grid);
  int n = grid.n_per_dim;
  double amp = std::pow(grid.L, -0.5 * grid.d);
  double w = 2.0 * std::numbers::pi / n;
  if (grid.d == 1) {
    for (int j = 0; j < n; ++j) {
      double ph = w * k[0] * j;
      f.values[j] = amp * cplx{std::cos(ph), std::sin(ph)};
    }
  } else {
    ComplexVec row1(n), row2(n);
    for (int j = 0; j < n; ++j) {
      double p1 = w * k[0] * j, p2 = w * k[1] * j;
      row1[j] = cplx{std::cos(p1), std::sin(p1)};
      row2[j] = cplx{std::cos(p2), std::sin(p2)};
    }
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) f.values[std::size_t(j1) * n + j2] = amp * row1[j1] * row2[j2];
  }
  return f;
}

Field fourier_mode(int k1, const Grid& grid) { return fourier_mode({k1, 0}, grid); }
Field fourier_mode(int k1, int k2, const Grid& grid) { return fourier_mode({k1, k2}, grid); }

CoeffMap forward_coeffs(const Field& f) {
  CoeffMap c(f.grid);
  fft::forward(f.grid, f.values.data(), c.c.data());
  // <f, phi_k> = (L/n)^d * L^{-d/2} * DFT = L^{d/2} / N * DFT
  double scale = std::pow(f.grid.L, 0.5 * f.grid.d) / double(f.grid.num_points());
  for (auto& z : c.c) z *= scale;
  return c;
}

Field inverse_coeffs(const CoeffMap& c) {
  Field f(c.grid);
  fft::backward(c.grid, c.c.data(), f.values.data());
  double scale = std::pow(c.grid.L, -0.5 * c.grid.d);
  for (auto& z : f.values) z *= scale;
  return f;
}

cplx inner_product(const Field& u, const Field& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  double sr = 0.0, si = 0.0;
  const cplx* a = u.values.data();
  const cplx* b = v.values.data();
  std::size_t n = u.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    // u * conj(v)
    sr += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    si += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  double w = u.grid.cell_volume();
  return {sr * w, si * w};
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& z : f.values) s += std::norm(z);
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const CoeffMap& c) {
  double s = 0.0;
  for (const auto& z : c.c) s += std::norm(z);
  return std::sqrt(s);
}

double sobolev_norm(const CoeffMap& c, double s) {
  if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  const Grid& g = c.grid;
  int n = g.n_per_dim;
  double acc = 0.0;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i) {
      double k = g.freq_of_index(i);
      acc += std::pow(1.0 + k * k, s) * std::norm(c.c[i]);
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      double k1 = g.freq_of_index(i1);
      for (int i2 = 0; i2 < n; ++i2) {
        double k2 = g.freq_of_index(i2);
        acc += std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(c.c[std::size_t(i1) * n + i2]);
      }
    }
  }
  return std::sqrt(acc);
}

double sobolev_norm(const Field& f, double s) { return sobolev_norm(forward_coeffs(f), s); }

CoeffMap truncate(const CoeffMap& c, int k_max) {
  CoeffMap out = c;
  const Grid& g = c.grid;
  int n = g.n_per_dim;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i)
      if (std::abs(g.freq_of_index(i)) > k_max) out.c[i] = 0.0;
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      bool kill1 = std::abs(g.freq_of_index(i1)) > k_max;
      for (int i2 = 0; i2 < n; ++i2) {
        if (kill1 || std::abs(g.freq_of_index(i2)) > k_max) out.c[std::size_t(i1) * n + i2] = 0.0;
      }
    }
  }
  return out;
}

}  // namespace oplearn
