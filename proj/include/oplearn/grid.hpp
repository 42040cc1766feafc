// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_GRID_HPP
#define OPLEARN_GRID_HPP

#include <array>
#include <cstddef>

#include "oplearn/common.hpp"

namespace oplearn {

// Uniform periodic grid on the torus [0,L)^d, d in {1,2}.
// Points are x_j = j*L/n per axis, j = 0..n-1. Row-major flattening for d=2:
// flat = i1*n + i2. Frequencies follow FFT order: slot i holds integer
// frequency i for i <= n/2-1 and i-n otherwise, so k ranges over
// [-n/2, n/2-1]; k = +n/2 aliases to -n/2 on the grid and is canonicalized.
struct Grid {
  int d = 2;
  int n_per_dim = 0;
  double L = 1.0;

  Grid() = default;
  Grid(int d_, int n_per_dim_, double L_);

  std::size_t num_points() const {
    std::size_t n = std::size_t(n_per_dim);
    return d == 1 ? n : n * n;
  }
  double spacing() const { return L / n_per_dim; }
  double cell_volume() const;  // (L/n)^d
  double volume() const;       // L^d

  int freq_of_index(int i) const { return i <= n_per_dim / 2 - 1 ? i : i - n_per_dim; }
  // Wraps any integer frequency into the canonical FFT range [-n/2, n/2-1].
  int index_of_freq(int k) const {
    int n = n_per_dim;
    int m = ((k % n) + n) % n;
    return m;
  }

  // Integer frequency vector of a flat coefficient slot.
  std::array<int, 2> freqs_of_slot(std::size_t slot) const;
  std::size_t slot_of_freqs(int k1, int k2 = 0) const;

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int d, int n_per_dim, double L);

// Complex scalar field sampled on a Grid (row-major values).
struct Field {
  Grid grid;
  ComplexVec values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.num_points(), cplx{0.0, 0.0}) {}
};

// Spectral representation: coefficient <f, phi_k> per Nyquist-limited
// frequency vector, stored densely in FFT slot order. phi_k are unit-norm
// modes L^{-d/2} exp(2*pi*i k.x/L).
struct CoeffMap {
  Grid grid;
  ComplexVec c;

  CoeffMap() = default;
  explicit CoeffMap(const Grid& g) : grid(g), c(g.num_points(), cplx{0.0, 0.0}) {}

  cplx& at(int k1) { return c[grid.slot_of_freqs(k1)]; }
  cplx& at(int k1, int k2) { return c[grid.slot_of_freqs(k1, k2)]; }
  cplx at(int k1) const { return c[grid.slot_of_freqs(k1)]; }
  cplx at(int k1, int k2) const { return c[grid.slot_of_freqs(k1, k2)]; }
};

}  // namespace oplearn

#endif
