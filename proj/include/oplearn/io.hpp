// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_IO_HPP
#define OPLEARN_IO_HPP

#include <string>

#include "oplearn/grid.hpp"
#include "oplearn/sphere.hpp"

namespace oplearn {

// Torus field file: header line "d n_per_dim L", then one "re im" line per
// grid point in row-major order.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

// Spherical field file: header line "n_phi n_theta l_max", then row-major
// "re im" lines (theta outer, phi inner). l_max rides along as solver context.
void write_sphere_field(const SphereField& f, int l_max, const std::string& path);
SphereField read_sphere_field(const std::string& path, int* l_max = nullptr);

// CoeffMap export: CSV with columns k1[,k2],re,im over all resolved modes,
// lexicographic in k.
void write_coeffs_csv(const CoeffMap& c, const std::string& path);

}  // namespace oplearn

#endif
