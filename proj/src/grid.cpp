// SPDX-License-Identifier: Apache-2.0
#include "oplearn/grid.hpp"

#include <stdexcept>
#include <string>

namespace oplearn {

Grid::Grid(int d_, int n_per_dim_, double L_) : d(d_), n_per_dim(n_per_dim_), L(L_) {
  if (d != 1 && d != 2) throw std::invalid_argument("Grid: d must be 1 or 2");
  if (n_per_dim < 2 || n_per_dim % 2 != 0)
    throw std::invalid_argument("Grid: n_per_dim must be even and >= 2, got " +
                                std::to_string(n_per_dim));
  if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be > 0");
}

double Grid::cell_volume() const {
  double h = spacing();
  return d == 1 ? h : h * h;
}

double Grid::volume() const { return d == 1 ? L : L * L; }

std::array<int, 2> Grid::freqs_of_slot(std::size_t slot) const {
  if (d == 1) return {freq_of_index(int(slot)), 0};
  int n = n_per_dim;
  return {freq_of_index(int(slot) / n), freq_of_index(int(slot) % n)};
}

std::size_t Grid::slot_of_freqs(int k1, int k2) const {
  if (d == 1) return std::size_t(index_of_freq(k1));
  return std::size_t(index_of_freq(k1)) * n_per_dim + index_of_freq(k2);
}

Grid make_grid(int d, int n_per_dim, double L) { return Grid(d, n_per_dim, L); }

}  // namespace oplearn
