#include "wavelet.hpp"

#include <algorithm>

#include "error.hpp"

namespace awf {

namespace wavelet {

namespace {

inline int clampi(int i, int hi) { return i < hi ? i : hi - 1; }

}  // namespace

Subbands dwt2(const double* img, int H, int W) {
  require(H >= 1 && W >= 1, ErrorKind::invalid_argument,
          "dwt2: image must be at least 1x1, got ", H, "x", W);
  Subbands s;
  s.h = (H + 1) / 2;
  s.w = (W + 1) / 2;
  const std::size_t n = static_cast<std::size_t>(s.h) * s.w;
  s.ll.resize(n);
  s.hl.resize(n);
  s.lh.resize(n);
  s.hh.resize(n);
  for (int y = 0; y < s.h; ++y) {
    const int r0 = 2 * y, r1 = clampi(2 * y + 1, H);
    for (int x = 0; x < s.w; ++x) {
      const int c0 = 2 * x, c1 = clampi(2 * x + 1, W);
      const double a = img[r0 * W + c0];
      const double b = img[r0 * W + c1];
      const double c = img[r1 * W + c0];
      const double d = img[r1 * W + c1];
      const std::size_t o = static_cast<std::size_t>(y) * s.w + x;
      s.ll[o] = 0.5 * (a + b + c + d);
      s.hl[o] = 0.5 * (a - b + c - d);
      s.lh[o] = 0.5 * (a + b - c - d);
      s.hh[o] = 0.5 * (a - b - c + d);
    }
  }
  return s;
}

Subbands dwt2(const std::vector<double>& img, int H, int W) {
  require(static_cast<int>(img.size()) == H * W, ErrorKind::shape_mismatch,
          "dwt2: ", img.size(), " pixels for a ", H, "x", W, " image");
  return dwt2(img.data(), H, W);
}

std::vector<double> idwt2(const Subbands& s, int H, int W) {
  require((H + 1) / 2 == s.h && (W + 1) / 2 == s.w, ErrorKind::shape_mismatch,
          "idwt2: subbands ", s.h, "x", s.w, " cannot restore a ", H, "x", W,
          " image");
  std::vector<double> img(static_cast<std::size_t>(H) * W);
  for (int y = 0; y < s.h; ++y)
    for (int x = 0; x < s.w; ++x) {
      const std::size_t o = static_cast<std::size_t>(y) * s.w + x;
      const double ll = s.ll[o], hl = s.hl[o], lh = s.lh[o], hh = s.hh[o];
      const double a = 0.5 * (ll + hl + lh + hh);
      const double b = 0.5 * (ll - hl + lh - hh);
      const double c = 0.5 * (ll + hl - lh - hh);
      const double d = 0.5 * (ll - hl - lh + hh);
      const int r0 = 2 * y, r1 = 2 * y + 1;
      const int c0 = 2 * x, c1 = 2 * x + 1;
      img[r0 * W + c0] = a;
      if (c1 < W) img[r0 * W + c1] = b;
      if (r1 < H) img[r1 * W + c0] = c;
      if (r1 < H && c1 < W) img[r1 * W + c1] = d;
    }
  return img;
}

}  // namespace wavelet

Tensor haar_dwt2(const Tensor& x) {
  Graph& g = x.graph();
  const Shape& xs = x.shape();
  require(xs.size() == 4 && xs[1] == 1, ErrorKind::shape_mismatch,
          "haar_dwt2: input must be [B,1,H,W], got ", shape_str(xs));
  const int B = xs[0], H = xs[2], W = xs[3];
  const int SH = (H + 1) / 2, SW = (W + 1) / 2;
  const int plane = SH * SW;

  auto xv = g.value_of(x.id());
  std::vector<double> out(static_cast<std::size_t>(B) * 4 * plane);
  for (int n = 0; n < B; ++n) {
    auto s = wavelet::dwt2(xv.data() + static_cast<std::size_t>(n) * H * W, H, W);
    double* const base = out.data() + static_cast<std::size_t>(n) * 4 * plane;
    std::copy_n(s.ll.data(), plane, base);
    std::copy_n(s.hl.data(), plane, base + plane);
    std::copy_n(s.lh.data(), plane, base + 2 * plane);
    std::copy_n(s.hh.data(), plane, base + 3 * plane);
  }

  const int xi = x.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(xi)) return;
    const auto gout = gr.grad_view(self);
    auto gin = gr.grad_of(xi);
    for (int n = 0; n < B; ++n) {
      const double* const base = gout.data() + static_cast<std::size_t>(n) * 4 * plane;
      double* const gplane = gin.data() + static_cast<std::size_t>(n) * H * W;
      for (int y = 0; y < SH; ++y) {
        const int r0 = 2 * y, r1 = std::min(2 * y + 1, H - 1);
        for (int xq = 0; xq < SW; ++xq) {
          const int c0 = 2 * xq, c1 = std::min(2 * xq + 1, W - 1);
          const std::size_t o = static_cast<std::size_t>(y) * SW + xq;
          const double gll = base[o];
          const double ghl = base[plane + o];
          const double glh = base[2 * plane + o];
          const double ghh = base[3 * plane + o];
          // transpose of the analysis matrix; clamped indices fold the
          // replicated border contributions back onto the real pixels
          gplane[r0 * W + c0] += 0.5 * (gll + ghl + glh + ghh);
          gplane[r0 * W + c1] += 0.5 * (gll - ghl + glh - ghh);
          gplane[r1 * W + c0] += 0.5 * (gll + ghl - glh - ghh);
          gplane[r1 * W + c1] += 0.5 * (gll - ghl - glh + ghh);
        }
      }
    }
  };
  return g.make_node("haar_dwt2", {xi}, {B, 4, SH, SW}, std::move(out), back);
}

}  // namespace awf
