// Copyright 2026 The GPK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Non-unitary discrete Fourier transform used by the FPA-family mechanisms.
//
//   forward:  F_j = sum_t x_t exp(-2 pi i j t / n)
//   inverse:  x_t = (1/n) sum_j F_j exp(+2 pi i j t / n)
//
// so that sum |F_j|^2 = n sum |x_t|^2. Power-of-two lengths take an
// iterative radix-2 path; every other length is summed directly.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gpk/error.hpp"

namespace gpk::spectral {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Spectrum {
  ComplexVector<Scalar> coefficients;
  Eigen::Index original_length = 0;
};

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// exp(sign * 2 pi i * m / n), with m reduced mod n first so that large
// index products keep full accuracy.
template <typename Scalar>
std::complex<Scalar> twiddle(Eigen::Index m, Eigen::Index n, int sign) {
  m %= n;
  const Scalar angle = sign * Scalar(2) * std::numbers::pi_v<Scalar> *
                       static_cast<Scalar>(m) / static_cast<Scalar>(n);
  return {std::cos(angle), std::sin(angle)};
}

// In-place iterative radix-2 transform. sign = -1 forward, +1 inverse
// (unscaled).
template <typename Scalar>
void fft_radix2(ComplexVector<Scalar>& a, int sign) {
  const Eigen::Index n = a.size();
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::complex<Scalar>> w(n / 2);
  for (Eigen::Index m = 0; m < n / 2; ++m) w[m] = twiddle<Scalar>(m, n, sign);
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const Eigen::Index stride = n / len;
    for (Eigen::Index i = 0; i < n; i += len) {
      for (Eigen::Index j = 0; j < len / 2; ++j) {
        const std::complex<Scalar> u = a[i + j];
        const std::complex<Scalar> v = a[i + j + len / 2] * w[j * stride];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

// First `count` outputs of the unscaled transform of `a` by direct summation.
template <typename Scalar>
ComplexVector<Scalar> direct_sum(const ComplexVector<Scalar>& a,
                                 Eigen::Index count, int sign) {
  const Eigen::Index n = a.size();
  std::vector<std::complex<Scalar>> w(n);
  for (Eigen::Index m = 0; m < n; ++m) w[m] = twiddle<Scalar>(m, n, sign);
  ComplexVector<Scalar> out(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    std::complex<Scalar> acc{0, 0};
    for (Eigen::Index t = 0; t < n; ++t) acc += a[t] * w[(j * t) % n];
    out[j] = acc;
  }
  return out;
}

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& x, const char* who) {
  if (x.size() == 0) throw InvalidArgument(std::string(who) + ": empty input");
  if (!x.allFinite()) {
    throw InvalidArgument(std::string(who) + ": non-finite value in input");
  }
}

}  // namespace detail

// Leading `k` coefficients of the forward transform.
template <typename Derived>
Spectrum<typename Derived::Scalar> dft_leading(
    const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(x, "dft");
  const Eigen::Index n = x.size();
  if (k < 1 || k > n) throw InvalidArgument("dft: coefficient count out of range");
  ComplexVector<Scalar> a = x.template cast<std::complex<Scalar>>();
  if (is_power_of_two(n)) {
    detail::fft_radix2(a, -1);
    return {a.head(k), n};
  }
  return {detail::direct_sum(a, k, -1), n};
}

template <typename Derived>
Spectrum<typename Derived::Scalar> dft(const Eigen::MatrixBase<Derived>& x) {
  return dft_leading(x, x.size());
}

// Keeps coefficients 0..k-1, zero-pads to n, inverts with 1/n scaling and
// returns the real part. Imaginary parts are discarded: a truncated or
// perturbed spectrum is in general not conjugate-symmetric.
template <typename Scalar>
RealVector<Scalar> idft_padded(const Spectrum<Scalar>& spectrum, Eigen::Index k,
                               Eigen::Index n) {
  if (k < 1 || n < 1 || k > n) throw InvalidArgument("idft_padded: require 1 <= k <= n");
  if (k > spectrum.coefficients.size()) {
    throw InvalidArgument("idft_padded: k exceeds available coefficients");
  }
  ComplexVector<Scalar> padded = ComplexVector<Scalar>::Zero(n);
  padded.head(k) = spectrum.coefficients.head(k);
  RealVector<Scalar> out(n);
  if (is_power_of_two(n)) {
    detail::fft_radix2(padded, +1);
    out = padded.real() / static_cast<Scalar>(n);
    return out;
  }
  // Only k inputs are nonzero: O(n k) synthesis.
  for (Eigen::Index t = 0; t < n; ++t) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      acc += (padded[j] * detail::twiddle<Scalar>(j * t, n, +1)).real();
    }
    out[t] = acc / static_cast<Scalar>(n);
  }
  return out;
}

// Full inverse of an untouched spectrum of a real signal. Throws
// IntegrityError if the discarded imaginary residue exceeds
// 1e-6 * max|x|.
template <typename Scalar>
RealVector<Scalar> inverse_real(const Spectrum<Scalar>& spectrum) {
  const Eigen::Index n = spectrum.original_length;
  if (spectrum.coefficients.size() != n) {
    throw InvalidArgument("inverse_real: spectrum is truncated");
  }
  ComplexVector<Scalar> a = spectrum.coefficients;
  if (is_power_of_two(n)) {
    detail::fft_radix2(a, +1);
  } else {
    a = detail::direct_sum(a, n, +1);
  }
  a /= static_cast<Scalar>(n);
  const Scalar scale = a.real().cwiseAbs().maxCoeff();
  const Scalar residue = a.imag().cwiseAbs().maxCoeff();
  if (residue > Scalar(1e-6) * std::max(scale, Scalar(1e-300))) {
    throw IntegrityError("inverse_real: imaginary residue exceeds tolerance");
  }
  return a.real();
}

}  // namespace gpk::spectral
