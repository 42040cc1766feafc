// SPDX-License-Identifier: Apache-2.0
#ifndef OPLEARN_SPECTRAL_HPP
#define OPLEARN_SPECTRAL_HPP

#include <array>

#include "oplearn/grid.hpp"

namespace oplearn {

// Unit-norm Fourier mode phi_k(x) = L^{-d/2} exp(2*pi*i k.x/L) sampled on the
// grid. Rejects |k_i| > n/2 (beyond Nyquist).
Field fourier_mode(const std::array<int, 2>& k, const Grid& grid);
Field fourier_mode(int k1, const Grid& grid);
Field fourier_mode(int k1, int k2, const Grid& grid);

// Quadrature coefficients <f, phi_k> for all Nyquist-limited k, via FFT.
CoeffMap forward_coeffs(const Field& f);

// Synthesis f = sum_k c_k phi_k; inverse of forward_coeffs.
Field inverse_coeffs(const CoeffMap& c);

// Discrete L2 inner product sum_j u_j conj(v_j) (L/n)^d (linear in u).
cplx inner_product(const Field& u, const Field& v);

double l2_norm(const Field& f);
double l2_norm(const CoeffMap& c);

// sqrt(sum_k (1+|k|_2^2)^s |c_k|^2) over all resolved modes; s >= 0.
double sobolev_norm(const Field& f, double s);
double sobolev_norm(const CoeffMap& c, double s);

// Zeroes every coefficient with |k|_inf > k_max (band projection).
CoeffMap truncate(const CoeffMap& c, int k_max);

// Raw FFT entry points shared by the solver (unnormalized, FFTW sign
// convention: forward multiplies by exp(-2*pi*i jk/n)). Plans are cached per
// grid shape and guarded by a mutex; execution is thread-safe.
namespace fft {
void forward(const Grid& g, const cplx* in, cplx* out);
void backward(const Grid& g, const cplx* in, cplx* out);
}  // namespace fft

}  // namespace oplearn

#endif
