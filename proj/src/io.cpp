// SPDX-License-Identifier: Apache-2.0
#include "oplearn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oplearn {

namespace {

void write_value_lines(std::ofstream& out, const ComplexVec& values) {
  char buf[64];
  for (const auto& z : values) {
    int len = std::snprintf(buf, sizeof buf, "%.17g %.17g\n", z.real(), z.imag());
    out.write(buf, len);
  }
}

void read_value_lines(std::ifstream& in, ComplexVec& values, const std::string& path) {
  for (auto& z : values) {
    double re, im;
    if (!(in >> re >> im)) throw std::runtime_error("truncated field file: " + path);
    z = cplx{re, im};
  }
}

}  // namespace

void write_field(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char head[96];
  int len = std::snprintf(head, sizeof head, "%d %d %.17g\n", f.grid.d, f.grid.n_per_dim,
                          f.grid.L);
  out.write(head, len);
  write_value_lines(out, f.values);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Field read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int d, n;
  double L;
  if (!(in >> d >> n >> L)) throw std::runtime_error("bad field header: " + path);
  Field f(Grid(d, n, L));
  read_value_lines(in, f.values, path);
  return f;
}

void write_sphere_field(const SphereField& f, int l_max, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << f.grid.n_phi << " " << f.grid.n_theta << " " << l_max << "\n";
  write_value_lines(out, f.values);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SphereField read_sphere_field(const std::string& path, int* l_max) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int n_phi, n_theta, lm;
  if (!(in >> n_phi >> n_theta >> lm)) throw std::runtime_error("bad field header: " + path);
  if (l_max) *l_max = lm;
  SphereField f(SphereGrid(n_phi, n_theta));
  read_value_lines(in, f.values, path);
  return f;
}

void write_coeffs_csv(const CoeffMap& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const Grid& g = c.grid;
  int nyq = g.n_per_dim / 2;
  char buf[128];
  if (g.d == 1) {
    out << "k1,re,im\n";
    for (int k = -nyq; k < nyq; ++k) {
      cplx z = c.at(k);
      int len = std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, z.real(), z.imag());
      out.write(buf, len);
    }
  } else {
    out << "k1,k2,re,im\n";
    for (int k1 = -nyq; k1 < nyq; ++k1)
      for (int k2 = -nyq; k2 < nyq; ++k2) {
        cplx z = c.at(k1, k2);
        int len =
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", k1, k2, z.real(), z.imag());
        out.write(buf, len);
      }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace oplearn
