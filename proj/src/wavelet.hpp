#pragma once

#include <vector>

#include "tensor.hpp"

namespace awf {

namespace wavelet {

// One level of the 2D orthonormal Haar transform. Odd input sizes are
// handled by replicating the last row/column, so the subbands always cover
// ceil(H/2) x ceil(W/2).
struct Subbands {
  int h = 0, w = 0;
  std::vector<double> ll, hl, lh, hh;
};

Subbands dwt2(const double* img, int H, int W);
Subbands dwt2(const std::vector<double>& img, int H, int W);

// Inverse transform, cropped back to H x W.
std::vector<double> idwt2(const Subbands& s, int H, int W);

}  // namespace wavelet

// Differentiable version for [B,1,H,W] tensors. Output channels are ordered
// (LL, HL, LH, HH) with spatial size ceil(H/2) x ceil(W/2).
Tensor haar_dwt2(const Tensor& x);

}  // namespace awf
