// SPDX-License-Identifier: Apache-2.0
#include "oplearn/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "oplearn/rng.hpp"
#include "oplearn/spectral.hpp"

#include "json.hpp"

namespace oplearn {

using nlohmann::json;

double Estimator::k_n(long n, int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("k_n: d must be 1 or 2");
  double pow3 = d == 1 ? 3.0 : 9.0;
  if (double(n) < pow3) throw std::invalid_argument("k_n: budget must satisfy n >= 3^d");
  double root = d == 1 ? double(n) : std::sqrt(double(n));
  return (root - 1.0) / 2.0;
}

int Estimator::k_n_floor(long n, int d) {
  return int(std::floor(k_n(n, d) + 1e-12));
}

namespace {

// Noise field sigma * (Z_re + i Z_im) per point with sigma = rel / sqrt(2 V),
// so E||noise||_{L2}^2 = rel^2 for a unit-norm field on a domain of volume V.
void add_query_noise(ComplexVec& values, double rel, double volume, RngStream stream) {
  if (rel <= 0.0) return;
  double sigma = rel / std::sqrt(2.0 * volume);
  for (auto& z : values) z += sigma * stream.complex_normal();
}

}  // namespace

std::vector<std::size_t> Estimator::band_coeff_slots() const {
  std::vector<std::size_t> slots;
  if (kind_ == BasisKind::Torus) {
    int K = band_;
    if (grid_.d == 1) {
      for (int k = -K; k <= K; ++k) slots.push_back(grid_.slot_of_freqs(k));
    } else {
      for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) slots.push_back(grid_.slot_of_freqs(k1, k2));
    }
  } else {
    for (std::size_t s = 0; s < std::size_t(band_ + 1) * (band_ + 1); ++s) slots.push_back(s);
  }
  return slots;
}

std::array<int, 2> Estimator::queried_index(std::size_t i) const {
  if (kind_ == BasisKind::Torus) {
    int K = band_;
    int width = 2 * K + 1;
    if (grid_.d == 1) return {int(i) - K, 0};
    return {int(i) / width - K, int(i) % width - K};
  }
  int l = int(std::floor(std::sqrt(double(i))));
  int m = int(i) - l * l - l;
  return {l, m};
}

ComplexVec Estimator::analyze_values(const ComplexVec& values) const {
  if (kind_ == BasisKind::Torus) {
    ComplexVec out(values.size());
    fft::forward(grid_, values.data(), out.data());
    double scale = std::pow(grid_.L, 0.5 * grid_.d) / double(grid_.num_points());
    for (auto& z : out) z *= scale;
    return out;
  }
  ComplexVec out(sbasis_->num_modes());
  sbasis_->analyze_raw(values.data(), out.data());
  return out;
}

void Estimator::synthesize_values(const ComplexVec& coeffs, ComplexVec& values) const {
  if (kind_ == BasisKind::Torus) {
    values.resize(coeffs.size());
    fft::backward(grid_, coeffs.data(), values.data());
    double scale = std::pow(grid_.L, -0.5 * grid_.d);
    for (auto& z : values) z *= scale;
  } else {
    values.resize(sgrid_.num_points());
    sbasis_->synthesize_raw(coeffs.data(), values.data());
  }
}

ComplexVec Estimator::mode_values(std::size_t i) const {
  auto idx = queried_index(i);
  if (kind_ == BasisKind::Torus) return fourier_mode({idx[0], idx[1]}, grid_).values;
  return sbasis_->mode(idx[0], idx[1]).values;
}

double Estimator::values_l2(const ComplexVec& values) const {
  if (kind_ == BasisKind::Torus) {
    double s = 0.0;
    for (const auto& z : values) s += std::norm(z);
    return std::sqrt(s * grid_.cell_volume());
  }
  const auto& w = sbasis_->weights();
  double s = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p) s += w[p] * std::norm(values[p]);
  return std::sqrt(s);
}

double Estimator::domain_volume() const {
  if (kind_ == BasisKind::Torus) return grid_.volume();
  return 4.0 * std::numbers::pi;
}

void Estimator::fit_columns(const std::vector<std::size_t>& which) {
  RngStream root(opt_.seed);
  RngStream in_root = root.derive("query-noise-in");
  RngStream out_root = root.derive("query-noise-out");
  RngStream mask_root = root.derive("mask");
  double vol = domain_volume();
  // Streams are salted by the coefficient slot of the queried index, which
  // is stable across band enumerations; update() therefore reproduces a
  // fresh fit at the larger budget bit for bit.
  const std::vector<std::size_t> slots = band_coeff_slots();

  for (std::size_t i : which) {
    std::uint64_t salt = slots[i];
    ComplexVec input = mode_values(i);
    if (opt_.noise_rel > 0.0) add_query_noise(input, opt_.noise_rel, vol, in_root.derive(salt));

    ComplexVec response;
    try {
      if (kind_ == BasisKind::Torus) {
        Field f;
        f.grid = grid_;
        f.values = std::move(input);
        response = torus_solve_(f).values;
      } else {
        SphereField f;
        f.grid = sgrid_;
        f.values = std::move(input);
        response = sphere_solve_(f).values;
      }
    } catch (const std::exception& e) {
      auto idx = queried_index(i);
      throw std::runtime_error("fit: solver failed at queried index (" +
                               std::to_string(idx[0]) + "," + std::to_string(idx[1]) +
                               "): " + e.what());
    }
    if (opt_.noise_rel > 0.0)
      add_query_noise(response, opt_.noise_rel, vol, out_root.derive(salt));

    ComplexVec col = analyze_values(response);
    if (opt_.mask_p > 0.0) {
      // One shared mask per estimator: the decision depends only on
      // (seed, coefficient slot), so every column drops the same slots.
      for (std::size_t s = 0; s < col.size(); ++s)
        if (mask_root.derive(std::uint64_t(s)).uniform() < opt_.mask_p) col[s] = 0.0;
    }
    columns_[i] = std::move(col);
  }
}

Estimator Estimator::fit(const Grid& grid, int k_max, const TorusOracle& solve,
                         const Options& opt) {
  if (k_max < 0 || 2 * k_max >= grid.n_per_dim)
    throw std::invalid_argument("fit: k_max must satisfy 0 <= k_max < n/2");
  Estimator e;
  e.kind_ = BasisKind::Torus;
  e.grid_ = grid;
  e.band_ = k_max;
  e.ncoeffs_ = grid.num_points();
  e.opt_ = opt;
  e.torus_solve_ = solve;
  std::size_t nq = e.band_coeff_slots().size();
  e.columns_.resize(nq);
  std::vector<std::size_t> all(nq);
  for (std::size_t i = 0; i < nq; ++i) all[i] = i;
  e.fit_columns(all);
  e.torus_solve_ = nullptr;
  return e;
}

Estimator Estimator::fit_budget(const Grid& grid, long budget, const TorusOracle& solve,
                                const Options& opt) {
  return fit(grid, k_n_floor(budget, grid.d), solve, opt);
}

Estimator Estimator::fit(const SphereGrid& grid, int l_max, const SphereOracle& solve,
                         const Options& opt) {
  Estimator e;
  e.kind_ = BasisKind::Sphere;
  e.sgrid_ = grid;
  e.sbasis_ = get_sphere_basis(grid, l_max);
  e.band_ = l_max;
  e.ncoeffs_ = e.sbasis_->num_modes();
  e.opt_ = opt;
  e.sphere_solve_ = solve;
  std::size_t nq = e.ncoeffs_;
  e.columns_.resize(nq);
  std::vector<std::size_t> all(nq);
  for (std::size_t i = 0; i < nq; ++i) all[i] = i;
  e.fit_columns(all);
  e.sphere_solve_ = nullptr;
  return e;
}

// out[t] += sum_i column_i * in[t][slot_i], blocked so each column is
// streamed from memory once per block of fields. The accumulation order over
// i is the same for every block size, so batched results match one-by-one
// application exactly.
void Estimator::accumulate(const std::vector<const cplx*>& in_coeffs,
                           std::vector<cplx*>& out_coeffs, std::size_t nfields) const {
  const std::vector<std::size_t> slots = band_coeff_slots();
  const std::size_t n = ncoeffs_;
  constexpr std::size_t kFieldBlock = 16;
  constexpr std::size_t kSliceLen = 4096;
  for (std::size_t t0 = 0; t0 < nfields; t0 += kFieldBlock) {
    std::size_t tb = std::min(kFieldBlock, nfields - t0);
    for (std::size_t j0 = 0; j0 < n; j0 += kSliceLen) {
      std::size_t jb = std::min(kSliceLen, n - j0);
      for (std::size_t i = 0; i < columns_.size(); ++i) {
        const double* col = reinterpret_cast<const double*>(columns_[i].data() + j0);
        for (std::size_t t = t0; t < t0 + tb; ++t) {
          cplx cz = in_coeffs[t][slots[i]];
          if (cz.real() == 0.0 && cz.imag() == 0.0) continue;
          double cr = cz.real(), ci = cz.imag();
          double* out = reinterpret_cast<double*>(out_coeffs[t] + j0);
          for (std::size_t j = 0; j < jb; ++j) {
            double wr = col[2 * j], wi = col[2 * j + 1];
            out[2 * j] += cr * wr - ci * wi;
            out[2 * j + 1] += cr * wi + ci * wr;
          }
        }
      }
    }
  }
}

Field Estimator::apply(const Field& psi) const {
  if (kind_ != BasisKind::Torus) throw std::invalid_argument("apply: torus field expected");
  if (!(psi.grid == grid_)) throw std::invalid_argument("apply: grid mismatch");
  ComplexVec in = analyze_values(psi.values);
  ComplexVec acc(ncoeffs_, cplx{0.0, 0.0});
  std::vector<const cplx*> ins{in.data()};
  std::vector<cplx*> outs{acc.data()};
  accumulate(ins, outs, 1);
  Field out;
  out.grid = grid_;
  synthesize_values(acc, out.values);
  return out;
}

SphereField Estimator::apply(const SphereField& psi) const {
  if (kind_ != BasisKind::Sphere) throw std::invalid_argument("apply: sphere field expected");
  if (!(psi.grid == sgrid_)) throw std::invalid_argument("apply: grid mismatch");
  ComplexVec in = analyze_values(psi.values);
  ComplexVec acc(ncoeffs_, cplx{0.0, 0.0});
  std::vector<const cplx*> ins{in.data()};
  std::vector<cplx*> outs{acc.data()};
  accumulate(ins, outs, 1);
  SphereField out;
  out.grid = sgrid_;
  synthesize_values(acc, out.values);
  return out;
}

std::vector<Field> Estimator::apply_batch(const std::vector<Field>& psis) const {
  std::vector<ComplexVec> ins(psis.size());
  std::vector<ComplexVec> accs(psis.size());
  std::vector<const cplx*> inp(psis.size());
  std::vector<cplx*> outp(psis.size());
  for (std::size_t t = 0; t < psis.size(); ++t) {
    if (!(psis[t].grid == grid_)) throw std::invalid_argument("apply_batch: grid mismatch");
    ins[t] = analyze_values(psis[t].values);
    accs[t].assign(ncoeffs_, cplx{0.0, 0.0});
    inp[t] = ins[t].data();
    outp[t] = accs[t].data();
  }
  accumulate(inp, outp, psis.size());
  std::vector<Field> out(psis.size());
  for (std::size_t t = 0; t < psis.size(); ++t) {
    out[t].grid = grid_;
    synthesize_values(accs[t], out[t].values);
  }
  return out;
}

std::vector<SphereField> Estimator::apply_batch(const std::vector<SphereField>& psis) const {
  std::vector<SphereField> out(psis.size());
  for (std::size_t t = 0; t < psis.size(); ++t) out[t] = apply(psis[t]);
  return out;
}

Field Estimator::apply_power(const Field& psi, int q) const {
  if (q < 1) throw std::invalid_argument("apply_power: q must be >= 1");
  Field cur = apply(psi);
  for (int j = 1; j < q; ++j) cur = apply(cur);
  return cur;
}

SphereField Estimator::apply_power(const SphereField& psi, int q) const {
  if (q < 1) throw std::invalid_argument("apply_power: q must be >= 1");
  SphereField cur = apply(psi);
  for (int j = 1; j < q; ++j) cur = apply(cur);
  return cur;
}

Estimator Estimator::update(long new_budget, const TorusOracle& solve) const {
  if (kind_ != BasisKind::Torus)
    throw std::invalid_argument("update: only torus estimators grow by budget shells");
  int new_k = k_n_floor(new_budget, grid_.d);
  if (new_k < band_) throw std::invalid_argument("update: shrinking budget rejected");
  Estimator e;
  e.kind_ = kind_;
  e.grid_ = grid_;
  e.band_ = new_k;
  e.ncoeffs_ = ncoeffs_;
  e.opt_ = opt_;
  e.torus_solve_ = solve;
  std::size_t nq = e.band_coeff_slots().size();
  e.columns_.resize(nq);

  // Reuse existing columns for the inner band; only new shells are queried.
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < nq; ++i) {
    auto idx = e.queried_index(i);
    if (std::abs(idx[0]) <= band_ && std::abs(idx[1]) <= band_) {
      int width = 2 * band_ + 1;
      std::size_t old_i = grid_.d == 1
                              ? std::size_t(idx[0] + band_)
                              : std::size_t(idx[0] + band_) * width + (idx[1] + band_);
      e.columns_[i] = columns_[old_i];
    } else {
      missing.push_back(i);
    }
  }
  e.fit_columns(missing);
  e.torus_solve_ = nullptr;
  return e;
}

Estimator Estimator::restrict_band(int k_max) const {
  if (kind_ != BasisKind::Torus) throw std::invalid_argument("restrict_band: torus only");
  if (k_max > band_) throw std::invalid_argument("restrict_band: cutoff exceeds fitted band");
  Estimator e;
  e.kind_ = kind_;
  e.grid_ = grid_;
  e.band_ = k_max;
  e.ncoeffs_ = ncoeffs_;
  e.opt_ = opt_;
  std::size_t nq = e.band_coeff_slots().size();
  e.columns_.resize(nq);
  int old_width = 2 * band_ + 1;
  for (std::size_t i = 0; i < nq; ++i) {
    auto idx = e.queried_index(i);
    std::size_t old_i = grid_.d == 1
                            ? std::size_t(idx[0] + band_)
                            : std::size_t(idx[0] + band_) * old_width + (idx[1] + band_);
    e.columns_[i] = columns_[old_i];
  }
  return e;
}

Estimator::UnitarityReport Estimator::weak_unitarity_report(int trials,
                                                            std::uint64_t seed) const {
  UnitarityReport rep;
  RngStream root(seed);
  const std::vector<std::size_t> slots = band_coeff_slots();

  auto random_band_field = [&](RngStream st) {
    ComplexVec coeffs(ncoeffs_, cplx{0.0, 0.0});
    for (std::size_t s : slots) coeffs[s] = st.complex_normal();
    double nrm = 0.0;
    for (std::size_t s : slots) nrm += std::norm(coeffs[s]);
    nrm = std::sqrt(nrm);
    for (std::size_t s : slots) coeffs[s] /= nrm;
    ComplexVec values;
    synthesize_values(coeffs, values);
    return values;
  };

  RngStream gram_root = root.derive("gram");
  for (int t = 0; t < trials; ++t) {
    RngStream st = gram_root.derive(std::uint64_t(t));
    ComplexVec u = random_band_field(st.derive("u"));
    ComplexVec v = random_band_field(st.derive("v"));
    cplx uv;
    // exact quadrature inner products on the grid
    {
      double sr = 0, si = 0;
      if (kind_ == BasisKind::Torus) {
        for (std::size_t p = 0; p < u.size(); ++p) {
          sr += u[p].real() * v[p].real() + u[p].imag() * v[p].imag();
          si += u[p].imag() * v[p].real() - u[p].real() * v[p].imag();
        }
        uv = cplx{sr, si} * grid_.cell_volume();
      } else {
        const auto& w = sbasis_->weights();
        for (std::size_t p = 0; p < u.size(); ++p) {
          sr += w[p] * (u[p].real() * v[p].real() + u[p].imag() * v[p].imag());
          si += w[p] * (u[p].imag() * v[p].real() - u[p].real() * v[p].imag());
        }
        uv = cplx{sr, si};
      }
    }
    Field fu, fv;
    SphereField su, sv;
    cplx fufv;
    if (kind_ == BasisKind::Torus) {
      fu.grid = grid_;
      fu.values = std::move(u);
      fv.grid = grid_;
      fv.values = std::move(v);
      Field au = apply(fu), av = apply(fv);
      fufv = inner_product(au, av);
    } else {
      su.grid = sgrid_;
      su.values = std::move(u);
      sv.grid = sgrid_;
      sv.values = std::move(v);
      SphereField au = apply(su), av = apply(sv);
      fufv = sph_inner_product(au, av);
    }
    rep.max_gram_error = std::max(rep.max_gram_error, std::abs(fufv - uv));
  }

  RngStream exp_root = root.derive("expansion");
  for (int t = 0; t < trials; ++t) {
    RngStream st = exp_root.derive(std::uint64_t(t));
    ComplexVec coeffs(ncoeffs_);
    for (auto& z : coeffs) z = st.complex_normal();
    ComplexVec values;
    synthesize_values(coeffs, values);
    double before = values_l2(values);
    double after;
    if (kind_ == BasisKind::Torus) {
      Field f;
      f.grid = grid_;
      f.values = std::move(values);
      after = values_l2(apply(f).values);
    } else {
      SphereField f;
      f.grid = sgrid_;
      f.values = std::move(values);
      after = values_l2(apply(f).values);
    }
    rep.max_expansion = std::max(rep.max_expansion, after / before);
  }
  return rep;
}

void Estimator::save(const std::string& path) const {
  json header;
  header["format"] = "oplearn.estimator";
  header["version"] = 1;
  header["basis"] = kind_ == BasisKind::Torus ? "torus" : "sphere";
  if (kind_ == BasisKind::Torus) {
    header["d"] = grid_.d;
    header["n_per_dim"] = grid_.n_per_dim;
    header["L"] = grid_.L;
    header["k_max"] = band_;
  } else {
    header["n_phi"] = sgrid_.n_phi;
    header["n_theta"] = sgrid_.n_theta;
    header["l_max"] = band_;
  }
  header["noise_rel"] = opt_.noise_rel;
  header["mask_p"] = opt_.mask_p;
  header["seed"] = opt_.seed;
  header["solver_digest"] = opt_.solver_digest;
  header["queried"] = columns_.size();
  header["coeffs_per_column"] = ncoeffs_;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save: cannot open " + path);
  out << header.dump() << "\n";
  for (const auto& col : columns_) {
    static_assert(sizeof(cplx) == 16);
    out.write(reinterpret_cast<const char*>(col.data()),
              std::streamsize(col.size() * sizeof(cplx)));
  }
  if (!out) throw std::runtime_error("save: write failed for " + path);
}

Estimator Estimator::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load: cannot open " + path);
  std::string line;
  std::getline(in, line);
  json header = json::parse(line);
  if (header.at("format") != "oplearn.estimator")
    throw std::runtime_error("load: not an estimator file");

  Estimator e;
  if (header.at("basis") == "torus") {
    e.kind_ = BasisKind::Torus;
    e.grid_ = Grid(header.at("d").get<int>(), header.at("n_per_dim").get<int>(),
                   header.at("L").get<double>());
    e.band_ = header.at("k_max").get<int>();
    e.ncoeffs_ = e.grid_.num_points();
  } else {
    e.kind_ = BasisKind::Sphere;
    e.sgrid_ = SphereGrid(header.at("n_phi").get<int>(), header.at("n_theta").get<int>());
    e.band_ = header.at("l_max").get<int>();
    e.sbasis_ = get_sphere_basis(e.sgrid_, e.band_);
    e.ncoeffs_ = e.sbasis_->num_modes();
  }
  e.opt_.noise_rel = header.at("noise_rel").get<double>();
  e.opt_.mask_p = header.at("mask_p").get<double>();
  e.opt_.seed = header.at("seed").get<std::uint64_t>();
  e.opt_.solver_digest = header.at("solver_digest").get<std::string>();
  std::size_t nq = header.at("queried").get<std::size_t>();
  std::size_t nc = header.at("coeffs_per_column").get<std::size_t>();
  if (nc != e.ncoeffs_) throw std::runtime_error("load: column length mismatch");
  if (nq != e.band_coeff_slots().size()) throw std::runtime_error("load: queried count mismatch");
  e.columns_.assign(nq, ComplexVec(nc));
  for (auto& col : e.columns_) {
    in.read(reinterpret_cast<char*>(col.data()), std::streamsize(nc * sizeof(cplx)));
    if (!in) throw std::runtime_error("load: truncated column data");
  }
  return e;
}

}  // namespace oplearn
