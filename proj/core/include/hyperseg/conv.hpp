#pragma once

#include <array>

#include "hyperseg/tensor.hpp"

namespace hyperseg::nn {

// 3D convolution, zero padding.
//   x: (Ci, D, H, W), w: (Co, Ci, k, k, k), b: (Co) or undefined for no bias.
//   out: (Co, D', H', W') with D' = (D + 2*padding - k) / stride + 1.
Tensor conv3d(const Tensor& x, const Tensor& w, const Tensor& b, std::int64_t stride,
              std::int64_t padding);

// Transposed 3D convolution (gradient of conv3d w.r.t. its input).
//   x: (Ci, D, H, W), w: (Ci, Co, k, k, k), b: (Co) or undefined.
//   out: (Co, D', H', W') with D' = (D - 1)*stride - 2*padding + k + output_padding.
Tensor conv_transpose3d(const Tensor& x, const Tensor& w, const Tensor& b,
                        std::int64_t stride, std::int64_t padding,
                        std::int64_t output_padding);

// Gather one kernel tap across all output positions of a strided window scan.
//   grid: (C, D, H, W); returns (N, C) with N = D'*H'*W' (conv3d output dims).
// Out-of-range positions yield zero rows, i.e. origin points when the channels
// hold ball coordinates. With pad = false the scan is 'valid' (padding = 0).
Tensor gather_taps(const Tensor& grid, std::array<std::int64_t, 3> tap, std::int64_t k,
                   std::int64_t stride, std::int64_t padding, bool pad = true);

// Layout permutations between channel grids and row matrices.
Tensor channels_to_rows(const Tensor& grid);  // (C,D,H,W) -> (D*H*W, C)
Tensor rows_to_channels(const Tensor& rows, std::int64_t D, std::int64_t H,
                        std::int64_t W);  // (N,C) -> (C,D,H,W), N = D*H*W

// Stack per-channel column vectors (N,1) into a channel grid (C,D,H,W).
Tensor stack_channels(const std::vector<Tensor>& cols, std::int64_t D, std::int64_t H,
                      std::int64_t W);

// Trilinear resampling with align-corners semantics. Preprocessing op: the
// result is a fresh leaf (no gradient flows back through it).
Tensor trilinear_resize(const Tensor& x, std::int64_t D2, std::int64_t H2, std::int64_t W2);

}  // namespace hyperseg::nn
