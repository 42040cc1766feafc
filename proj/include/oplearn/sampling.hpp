// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_SAMPLING_HPP
#define OPLEARN_SAMPLING_HPP

#include <cstdint>

#include "oplearn/grid.hpp"
#include "oplearn/rng.hpp"
#include "oplearn/sphere.hpp"

namespace oplearn {

// Gaussian random field with spectral density alpha (4 pi^2 |k|^2 + beta)^{-gamma}
// over Fourier modes (torus) or alpha (l(l+1) + beta)^{-gamma} over spherical
// harmonics. bandwidth < 0 means all resolved modes (Nyquist / l_max).
struct GrfSpec {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 4.0;
  int bandwidth = -1;
};

struct NoiseSpec {
  double rel_level = 0.0;  // r: E||noise||_{L2} = r ||f||_{L2}
};

// Complex GRF draw: coefficient c_k = Z alpha^{1/2} (4 pi^2 |k|_2^2 + beta)^{-gamma/2}
// with Z standard complex normal per mode (streams keyed by the integer
// frequency vector, so truncations of the same seed agree across grids).
Field sample_grf(const GrfSpec& spec, const Grid& grid, const RngStream& stream);
SphereField sample_grf_sphere(const GrfSpec& spec, const SphereGrid& grid, int l_max,
                              const RngStream& stream);

// f + sigma (Z_re + i Z_im) per grid point, sigma = r ||f|| / sqrt(2 V);
// the expected noise L2 norm is r ||f||. r = 0 returns f unchanged.
Field add_noise(const Field& f, const NoiseSpec& spec, const RngStream& stream);
SphereField add_noise(const SphereField& f, const NoiseSpec& spec, const RngStream& stream);

// Each entry independently zeroed with probability p; the decision depends
// only on (stream, coefficient slot).
CoeffMap mask_coeffs(const CoeffMap& c, double p, const RngStream& stream);
SphCoeffMap mask_coeffs(const SphCoeffMap& c, double p, const RngStream& stream);

// ||pred - truth||_{L2} / ||truth||_{L2}; rejects ||truth|| = 0.
double relative_error(const Field& pred, const Field& truth);
double relative_error(const SphereField& pred, const SphereField& truth);

}  // namespace oplearn

#endif
