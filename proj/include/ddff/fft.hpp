#pragma once

#include <Eigen/Core>

#include <complex>

#include "ddff/image.hpp"

namespace ddff {

using ComplexPlane = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Forward 2-D DFT, X(k, l) = Σ I(y, x) exp(-2πi (k y / H + l x / W)).
ComplexPlane fft2(const Plane<double>& image);
ComplexPlane fft2(const ComplexPlane& image);

/// Inverse 2-D DFT including the 1/(H·W) normalization.
ComplexPlane ifft2(const ComplexPlane& spectrum);

/// Signed normalized DFT frequencies for an axis of n samples: 0, 1/n, ..., then negatives.
Eigen::ArrayXd fft_frequencies(Eigen::Index n);

}  // namespace ddff
