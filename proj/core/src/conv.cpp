#include "hyperseg/conv.hpp"

#include <cmath>

namespace hyperseg::nn {

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (!t.defined() || t.shape().size() != rank) {
    throw ShapeError(std::string(what) + ": expected rank-" + std::to_string(rank) +
                     " tensor" + (t.defined() ? ", got " + shape_str(t.shape()) : ""));
  }
}

std::int64_t conv_out_dim(std::int64_t n, std::int64_t k, std::int64_t stride,
                          std::int64_t padding, const char* what) {
  const std::int64_t span = n + 2 * padding - k;
  if (span < 0) throw ShapeError(std::string(what) + ": kernel larger than padded input");
  return span / stride + 1;
}

}  // namespace

Tensor conv3d(const Tensor& x, const Tensor& w, const Tensor& b, std::int64_t stride,
              std::int64_t padding) {
  require_rank(x, 4, "conv3d");
  require_rank(w, 5, "conv3d weights");
  if (stride < 1) throw ShapeError("conv3d: stride must be >= 1");
  if (padding < 0) throw ShapeError("conv3d: padding must be >= 0");
  const std::int64_t Ci = x.size(0), D = x.size(1), H = x.size(2), W = x.size(3);
  const std::int64_t Co = w.size(0), k = w.size(2);
  if (w.size(1) != Ci || w.size(3) != k || w.size(4) != k) {
    throw ShapeError("conv3d: weight shape " + shape_str(w.shape()) +
                     " incompatible with input " + shape_str(x.shape()));
  }
  if (b.defined() && (b.shape().size() != 1 || b.size(0) != Co)) {
    throw ShapeError("conv3d: bias shape mismatch");
  }
  const std::int64_t Do = conv_out_dim(D, k, stride, padding, "conv3d");
  const std::int64_t Ho = conv_out_dim(H, k, stride, padding, "conv3d");
  const std::int64_t Wo = conv_out_dim(W, k, stride, padding, "conv3d");

  const auto& xd = x.data();
  const auto& wd = w.data();
  std::vector<double> out(Co * Do * Ho * Wo, 0.0);

  for (std::int64_t co = 0; co < Co; ++co) {
    const double bias = b.defined() ? b.data()[co] : 0.0;
    for (std::int64_t od = 0; od < Do; ++od) {
      for (std::int64_t oh = 0; oh < Ho; ++oh) {
        for (std::int64_t ow = 0; ow < Wo; ++ow) {
          double acc = bias;
          for (std::int64_t ci = 0; ci < Ci; ++ci) {
            for (std::int64_t kz = 0; kz < k; ++kz) {
              const std::int64_t id = od * stride + kz - padding;
              if (id < 0 || id >= D) continue;
              for (std::int64_t ky = 0; ky < k; ++ky) {
                const std::int64_t ih = oh * stride + ky - padding;
                if (ih < 0 || ih >= H) continue;
                const double* xrow = &xd[((ci * D + id) * H + ih) * W];
                const double* wrow = &wd[(((co * Ci + ci) * k + kz) * k + ky) * k];
                for (std::int64_t kx = 0; kx < k; ++kx) {
                  const std::int64_t iw = ow * stride + kx - padding;
                  if (iw < 0 || iw >= W) continue;
                  acc += xrow[iw] * wrow[kx];
                }
              }
            }
          }
          out[((co * Do + od) * Ho + oh) * Wo + ow] = acc;
        }
      }
    }
  }

  auto px = x.node();
  auto pw = w.node();
  auto pb = b.defined() ? b.node() : nullptr;
  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_op(
      {Co, Do, Ho, Wo}, std::move(out), parents,
      [px, pw, pb, Ci, D, H, W, Co, Do, Ho, Wo, k, stride, padding](detail::Node& self) {
        const bool gx = px->requires_grad;
        const bool gw = pw->requires_grad;
        const bool gb = pb && pb->requires_grad;
        if (gx) px->ensure_grad();
        if (gw) pw->ensure_grad();
        if (gb) pb->ensure_grad();
        for (std::int64_t co = 0; co < Co; ++co) {
          for (std::int64_t od = 0; od < Do; ++od) {
            for (std::int64_t oh = 0; oh < Ho; ++oh) {
              for (std::int64_t ow = 0; ow < Wo; ++ow) {
                const double g = self.grad[((co * Do + od) * Ho + oh) * Wo + ow];
                if (g == 0.0) continue;
                if (gb) pb->grad[co] += g;
                if (!gx && !gw) continue;
                for (std::int64_t ci = 0; ci < Ci; ++ci) {
                  for (std::int64_t kz = 0; kz < k; ++kz) {
                    const std::int64_t id = od * stride + kz - padding;
                    if (id < 0 || id >= D) continue;
                    for (std::int64_t ky = 0; ky < k; ++ky) {
                      const std::int64_t ih = oh * stride + ky - padding;
                      if (ih < 0 || ih >= H) continue;
                      const std::int64_t xbase = ((ci * D + id) * H + ih) * W;
                      const std::int64_t wbase = (((co * Ci + ci) * k + kz) * k + ky) * k;
                      for (std::int64_t kx = 0; kx < k; ++kx) {
                        const std::int64_t iw = ow * stride + kx - padding;
                        if (iw < 0 || iw >= W) continue;
                        if (gx) px->grad[xbase + iw] += g * pw->data[wbase + kx];
                        if (gw) pw->grad[wbase + kx] += g * px->data[xbase + iw];
                      }
                    }
                  }
                }
              }
            }
          }
        }
      });
}

Tensor conv_transpose3d(const Tensor& x, const Tensor& w, const Tensor& b,
                        std::int64_t stride, std::int64_t padding,
                        std::int64_t output_padding) {
  require_rank(x, 4, "conv_transpose3d");
  require_rank(w, 5, "conv_transpose3d weights");
  if (stride < 1) throw ShapeError("conv_transpose3d: stride must be >= 1");
  if (padding < 0 || output_padding < 0 || output_padding >= stride) {
    throw ShapeError("conv_transpose3d: invalid padding arguments");
  }
  const std::int64_t Ci = x.size(0), D = x.size(1), H = x.size(2), W = x.size(3);
  const std::int64_t Co = w.size(1), k = w.size(2);
  if (w.size(0) != Ci || w.size(3) != k || w.size(4) != k) {
    throw ShapeError("conv_transpose3d: weight shape " + shape_str(w.shape()) +
                     " incompatible with input " + shape_str(x.shape()));
  }
  if (b.defined() && (b.shape().size() != 1 || b.size(0) != Co)) {
    throw ShapeError("conv_transpose3d: bias shape mismatch");
  }
  const std::int64_t Do = (D - 1) * stride - 2 * padding + k + output_padding;
  const std::int64_t Ho = (H - 1) * stride - 2 * padding + k + output_padding;
  const std::int64_t Wo = (W - 1) * stride - 2 * padding + k + output_padding;
  if (Do < 1 || Ho < 1 || Wo < 1) throw ShapeError("conv_transpose3d: empty output");

  const auto& xd = x.data();
  const auto& wd = w.data();
  std::vector<double> out(Co * Do * Ho * Wo, 0.0);
  if (b.defined()) {
    for (std::int64_t co = 0; co < Co; ++co) {
      const double bias = b.data()[co];
      double* dst = &out[co * Do * Ho * Wo];
      for (std::int64_t i = 0; i < Do * Ho * Wo; ++i) dst[i] = bias;
    }
  }

  for (std::int64_t ci = 0; ci < Ci; ++ci) {
    for (std::int64_t id = 0; id < D; ++id) {
      for (std::int64_t ih = 0; ih < H; ++ih) {
        for (std::int64_t iw = 0; iw < W; ++iw) {
          const double v = xd[((ci * D + id) * H + ih) * W + iw];
          if (v == 0.0) continue;
          for (std::int64_t co = 0; co < Co; ++co) {
            for (std::int64_t kz = 0; kz < k; ++kz) {
              const std::int64_t od = id * stride + kz - padding;
              if (od < 0 || od >= Do) continue;
              for (std::int64_t ky = 0; ky < k; ++ky) {
                const std::int64_t oh = ih * stride + ky - padding;
                if (oh < 0 || oh >= Ho) continue;
                double* orow = &out[((co * Do + od) * Ho + oh) * Wo];
                const double* wrow = &wd[(((ci * Co + co) * k + kz) * k + ky) * k];
                for (std::int64_t kx = 0; kx < k; ++kx) {
                  const std::int64_t ow = iw * stride + kx - padding;
                  if (ow < 0 || ow >= Wo) continue;
                  orow[ow] += v * wrow[kx];
                }
              }
            }
          }
        }
      }
    }
  }

  auto px = x.node();
  auto pw = w.node();
  auto pb = b.defined() ? b.node() : nullptr;
  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_op(
      {Co, Do, Ho, Wo}, std::move(out), parents,
      [px, pw, pb, Ci, D, H, W, Co, Do, Ho, Wo, k, stride, padding](detail::Node& self) {
        const bool gx = px->requires_grad;
        const bool gw = pw->requires_grad;
        const bool gb = pb && pb->requires_grad;
        if (gx) px->ensure_grad();
        if (gw) pw->ensure_grad();
        if (gb) pb->ensure_grad();
        if (gb) {
          for (std::int64_t co = 0; co < Co; ++co) {
            const double* g = &self.grad[co * Do * Ho * Wo];
            double acc = 0.0;
            for (std::int64_t i = 0; i < Do * Ho * Wo; ++i) acc += g[i];
            pb->grad[co] += acc;
          }
        }
        if (!gx && !gw) return;
        for (std::int64_t ci = 0; ci < Ci; ++ci) {
          for (std::int64_t id = 0; id < D; ++id) {
            for (std::int64_t ih = 0; ih < H; ++ih) {
              for (std::int64_t iw = 0; iw < W; ++iw) {
                const std::int64_t xidx = ((ci * D + id) * H + ih) * W + iw;
                const double xv = px->data[xidx];
                double gx_acc = 0.0;
                for (std::int64_t co = 0; co < Co; ++co) {
                  for (std::int64_t kz = 0; kz < k; ++kz) {
                    const std::int64_t od = id * stride + kz - padding;
                    if (od < 0 || od >= Do) continue;
                    for (std::int64_t ky = 0; ky < k; ++ky) {
                      const std::int64_t oh = ih * stride + ky - padding;
                      if (oh < 0 || oh >= Ho) continue;
                      const double* grow = &self.grad[((co * Do + od) * Ho + oh) * Wo];
                      const std::int64_t wbase = (((ci * Co + co) * k + kz) * k + ky) * k;
                      for (std::int64_t kx = 0; kx < k; ++kx) {
                        const std::int64_t ow = iw * stride + kx - padding;
                        if (ow < 0 || ow >= Wo) continue;
                        const double g = grow[ow];
                        if (gx) gx_acc += g * pw->data[wbase + kx];
                        if (gw) pw->grad[wbase + kx] += g * xv;
                      }
                    }
                  }
                }
                if (gx) px->grad[xidx] += gx_acc;
              }
            }
          }
        }
      });
}

Tensor gather_taps(const Tensor& grid, std::array<std::int64_t, 3> tap, std::int64_t k,
                   std::int64_t stride, std::int64_t padding, bool pad) {
  require_rank(grid, 4, "gather_taps");
  if (!pad) padding = 0;
  if (stride < 1 || k < 1 || padding < 0) throw ShapeError("gather_taps: bad window");
  if (tap[0] < 0 || tap[0] >= k || tap[1] < 0 || tap[1] >= k || tap[2] < 0 || tap[2] >= k) {
    throw ShapeError("gather_taps: tap outside kernel");
  }
  const std::int64_t C = grid.size(0), D = grid.size(1), H = grid.size(2), W = grid.size(3);
  const std::int64_t Do = conv_out_dim(D, k, stride, padding, "gather_taps");
  const std::int64_t Ho = conv_out_dim(H, k, stride, padding, "gather_taps");
  const std::int64_t Wo = conv_out_dim(W, k, stride, padding, "gather_taps");
  const std::int64_t N = Do * Ho * Wo;

  const auto& gd = grid.data();
  std::vector<double> out(N * C, 0.0);
  // src[n] = linear spatial index into the grid, or -1 for a padded (origin) row.
  std::vector<std::int64_t> src(N, -1);
  std::int64_t n = 0;
  for (std::int64_t od = 0; od < Do; ++od) {
    const std::int64_t id = od * stride + tap[0] - padding;
    for (std::int64_t oh = 0; oh < Ho; ++oh) {
      const std::int64_t ih = oh * stride + tap[1] - padding;
      for (std::int64_t ow = 0; ow < Wo; ++ow, ++n) {
        const std::int64_t iw = ow * stride + tap[2] - padding;
        if (id < 0 || id >= D || ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
        const std::int64_t sp = (id * H + ih) * W + iw;
        src[n] = sp;
        for (std::int64_t c = 0; c < C; ++c) out[n * C + c] = gd[c * D * H * W + sp];
      }
    }
  }

  auto pg = grid.node();
  return make_op({N, C}, std::move(out), {grid},
                 [pg, src = std::move(src), C, D, H, W](detail::Node& self) {
                   if (!pg->requires_grad) return;
                   pg->ensure_grad();
                   const std::int64_t DHW = D * H * W;
                   for (std::size_t n = 0; n < src.size(); ++n) {
                     if (src[n] < 0) continue;
                     for (std::int64_t c = 0; c < C; ++c) {
                       pg->grad[c * DHW + src[n]] += self.grad[n * C + c];
                     }
                   }
                 });
}

Tensor channels_to_rows(const Tensor& grid) {
  require_rank(grid, 4, "channels_to_rows");
  const std::int64_t C = grid.size(0);
  const std::int64_t N = grid.size(1) * grid.size(2) * grid.size(3);
  const auto& gd = grid.data();
  std::vector<double> out(N * C);
  for (std::int64_t c = 0; c < C; ++c) {
    for (std::int64_t n = 0; n < N; ++n) out[n * C + c] = gd[c * N + n];
  }
  auto pg = grid.node();
  return make_op({N, C}, std::move(out), {grid}, [pg, C, N](detail::Node& self) {
    if (!pg->requires_grad) return;
    pg->ensure_grad();
    for (std::int64_t c = 0; c < C; ++c) {
      for (std::int64_t n = 0; n < N; ++n) pg->grad[c * N + n] += self.grad[n * C + c];
    }
  });
}

Tensor rows_to_channels(const Tensor& rows, std::int64_t D, std::int64_t H,
                        std::int64_t W) {
  require_rank(rows, 2, "rows_to_channels");
  const std::int64_t N = rows.size(0), C = rows.size(1);
  if (N != D * H * W) throw ShapeError("rows_to_channels: row count does not match grid");
  const auto& rd = rows.data();
  std::vector<double> out(C * N);
  for (std::int64_t n = 0; n < N; ++n) {
    for (std::int64_t c = 0; c < C; ++c) out[c * N + n] = rd[n * C + c];
  }
  auto pr = rows.node();
  return make_op({C, D, H, W}, std::move(out), {rows}, [pr, C, N](detail::Node& self) {
    if (!pr->requires_grad) return;
    pr->ensure_grad();
    for (std::int64_t n = 0; n < N; ++n) {
      for (std::int64_t c = 0; c < C; ++c) pr->grad[n * C + c] += self.grad[c * N + n];
    }
  });
}

Tensor stack_channels(const std::vector<Tensor>& cols, std::int64_t D, std::int64_t H,
                      std::int64_t W) {
  if (cols.empty()) throw ShapeError("stack_channels: empty input");
  const std::int64_t N = D * H * W;
  const std::int64_t C = static_cast<std::int64_t>(cols.size());
  std::vector<double> out;
  out.reserve(C * N);
  std::vector<std::shared_ptr<detail::Node>> pnodes;
  for (const Tensor& t : cols) {
    if (t.shape().size() != 2 || t.size(0) != N || t.size(1) != 1) {
      throw ShapeError("stack_channels: expected (" + std::to_string(N) + ", 1) columns");
    }
    out.insert(out.end(), t.data().begin(), t.data().end());
    pnodes.push_back(t.node());
  }
  return make_op({C, D, H, W}, std::move(out), cols,
                 [pnodes = std::move(pnodes), N](detail::Node& self) {
                   for (std::size_t c = 0; c < pnodes.size(); ++c) {
                     const auto& p = pnodes[c];
                     if (!p->requires_grad) continue;
                     p->ensure_grad();
                     for (std::int64_t n = 0; n < N; ++n) {
                       p->grad[n] += self.grad[c * N + n];
                     }
                   }
                 });
}

Tensor trilinear_resize(const Tensor& x, std::int64_t D2, std::int64_t H2,
                        std::int64_t W2) {
  require_rank(x, 4, "trilinear_resize");
  if (D2 < 1 || H2 < 1 || W2 < 1) throw ShapeError("trilinear_resize: empty target");
  const std::int64_t C = x.size(0), D = x.size(1), H = x.size(2), W = x.size(3);
  const auto& xd = x.data();
  std::vector<double> out(C * D2 * H2 * W2);

  auto coord = [](std::int64_t i, std::int64_t n_out, std::int64_t n_in) {
    if (n_out == 1) return 0.5 * static_cast<double>(n_in - 1);
    return static_cast<double>(i) * static_cast<double>(n_in - 1) /
           static_cast<double>(n_out - 1);
  };

  std::int64_t o = 0;
  for (std::int64_t c = 0; c < C; ++c) {
    const double* src = &xd[c * D * H * W];
    for (std::int64_t zd = 0; zd < D2; ++zd) {
      const double fz = coord(zd, D2, D);
      const std::int64_t z0 = static_cast<std::int64_t>(fz);
      const std::int64_t z1 = std::min(z0 + 1, D - 1);
      const double tz = fz - static_cast<double>(z0);
      for (std::int64_t yd = 0; yd < H2; ++yd) {
        const double fy = coord(yd, H2, H);
        const std::int64_t y0 = static_cast<std::int64_t>(fy);
        const std::int64_t y1 = std::min(y0 + 1, H - 1);
        const double ty = fy - static_cast<double>(y0);
        for (std::int64_t xd2 = 0; xd2 < W2; ++xd2, ++o) {
          const double fx = coord(xd2, W2, W);
          const std::int64_t x0 = static_cast<std::int64_t>(fx);
          const std::int64_t x1 = std::min(x0 + 1, W - 1);
          const double tx = fx - static_cast<double>(x0);
          auto at = [&](std::int64_t z, std::int64_t y, std::int64_t xx) {
            return src[(z * H + y) * W + xx];
          };
          const double c00 = at(z0, y0, x0) * (1 - tx) + at(z0, y0, x1) * tx;
          const double c01 = at(z0, y1, x0) * (1 - tx) + at(z0, y1, x1) * tx;
          const double c10 = at(z1, y0, x0) * (1 - tx) + at(z1, y0, x1) * tx;
          const double c11 = at(z1, y1, x0) * (1 - tx) + at(z1, y1, x1) * tx;
          const double c0 = c00 * (1 - ty) + c01 * ty;
          const double c1 = c10 * (1 - ty) + c11 * ty;
          out[o] = c0 * (1 - tz) + c1 * tz;
        }
      }
    }
  }
  return Tensor::from_data({C, D2, H2, W2}, std::move(out));
}

}  // namespace hyperseg::nn
