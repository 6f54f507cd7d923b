#include "losses.hpp"

#include <cmath>
#include <memory>

#include "wavelet.hpp"

namespace awf {

namespace {

constexpr int kWindow = 11;
constexpr double kC = 9e-4;

void check_images(const Tensor& x, const Tensor& y, const char* who) {
  require(&x.graph() == &y.graph(), ErrorKind::invalid_argument, who,
          ": operands from different graphs");
  const Shape& xs = x.shape();
  require(xs.size() == 4, ErrorKind::shape_mismatch, who,
          ": expected [B,C,H,W], got ", shape_str(xs));
  require(xs == y.shape(), ErrorKind::shape_mismatch, who, ": shapes differ, ",
          shape_str(xs), " vs ", shape_str(y.shape()));
}

// per-position window mean through a uniform kernel, valid positions only
Tensor window_mean(const Tensor& t, const Tensor& kernel,
                   const Tensor& zero_bias) {
  return conv2d(t, kernel, zero_bias, 1, 0);
}

Tensor ssim_from_moments(const Tensor& mx, const Tensor& my, const Tensor& mxx,
                         const Tensor& myy, const Tensor& mxy) {
  Tensor vx = sub(mxx, mul(mx, mx));
  Tensor vy = sub(myy, mul(my, my));
  Tensor cxy = sub(mxy, mul(mx, my));
  Tensor num = add_scalar(scalar_mul(cxy, 2.0), kC);
  Tensor den = add_scalar(add(vx, vy), kC);
  return mean(div(num, den));
}

}  // namespace

Tensor mse(const Tensor& x, const Tensor& y) {
  check_images(x, y, "mse");
  Tensor d = sub(x, y);
  return mean(mul(d, d));
}

Tensor ssim_paper(const Tensor& x, const Tensor& y, bool global_window) {
  check_images(x, y, "ssim_paper");
  Graph& g = x.graph();
  const Shape xs = x.shape();
  require(xs[1] == 1, ErrorKind::shape_mismatch,
          "ssim_paper: expected single-channel images, got ", shape_str(xs));

  if (global_window || xs[2] < kWindow || xs[3] < kWindow) {
    Tensor mx = global_avg_pool(x);
    Tensor my = global_avg_pool(y);
    Tensor mxx = global_avg_pool(mul(x, x));
    Tensor myy = global_avg_pool(mul(y, y));
    Tensor mxy = global_avg_pool(mul(x, y));
    return ssim_from_moments(mx, my, mxx, myy, mxy);
  }

  const double wgt = 1.0 / (kWindow * kWindow);
  Tensor kernel = g.constant({1, 1, kWindow, kWindow},
                             std::vector<double>(kWindow * kWindow, wgt));
  Tensor zero = g.constant({1}, {0.0});
  Tensor mx = window_mean(x, kernel, zero);
  Tensor my = window_mean(y, kernel, zero);
  Tensor mxx = window_mean(mul(x, x), kernel, zero);
  Tensor myy = window_mean(mul(y, y), kernel, zero);
  Tensor mxy = window_mean(mul(x, y), kernel, zero);
  return ssim_from_moments(mx, my, mxx, myy, mxy);
}

Tensor content_loss(const Tensor& ir, const Tensor& vi, const Tensor& fused,
                    const LossWeights& w, bool ssim_global) {
  check_images(ir, fused, "content_loss");
  check_images(vi, fused, "content_loss");
  require(w.gamma >= 0.0, ErrorKind::invalid_argument,
          "content_loss: gamma must be non-negative, got ", w.gamma);
  Tensor pixel = mse(ir, fused);
  Tensor structure =
      add_scalar(scalar_mul(ssim_paper(vi, fused, ssim_global), -1.0), 1.0);
  return add(pixel, scalar_mul(structure, w.gamma));
}

Tensor adv_loss(const Tensor& fused, const Tensor& mask,
                const SpatialCritic& d_spa, const FrequencyCritic& d_fre) {
  check_images(fused, mask, "adv_loss");
  Graph& g = fused.graph();
  Tensor s_spa = d_spa.forward(g, mul(fused, mask));
  Tensor s_fre = d_fre.forward(g, haar_dwt2(fused));
  return scalar_mul(add(mean(s_spa), mean(s_fre)), -1.0);
}

Tensor gradient_penalty(Graph& g, const CriticFn& critic,
                        std::span<const double> real,
                        std::span<const double> fake, const Shape& shape,
                        Rng& rng, double fd_step) {
  require(shape.size() == 4, ErrorKind::shape_mismatch,
          "gradient_penalty: expected [B,C,H,W], got ", shape_str(shape));
  const int total = numel(shape);
  const int B = shape[0];
  const int per = total / B;
  require(static_cast<int>(real.size()) == total &&
              static_cast<int>(fake.size()) == total,
          ErrorKind::shape_mismatch, "gradient_penalty: data size ",
          real.size(), "/", fake.size(), " vs shape ", shape_str(shape));
  require(fd_step > 0.0, ErrorKind::invalid_argument,
          "gradient_penalty: fd_step must be positive");

  // interpolate between the pairs, one draw per sample
  std::vector<double> interp(static_cast<std::size_t>(total));
  for (int b = 0; b < B; ++b) {
    const double eps = rng.uniform01();
    for (int i = 0; i < per; ++i) {
      const std::size_t at = static_cast<std::size_t>(b) * per + i;
      interp[at] = eps * real[at] + (1.0 - eps) * fake[at];
    }
  }

  // input gradient of the critic at the interpolation points; remember which
  // way every piecewise op branched so the probes below see the same
  // linearization
  Graph::Routing routing;
  Graph scratch;
  scratch.set_params_frozen(true);
  scratch.record_routing(&routing);
  Tensor xin = scratch.input(shape, interp);
  Tensor score = critic(scratch, xin);
  scratch.record_routing(nullptr);
  require(score.shape() == Shape{B, 1}, ErrorKind::shape_mismatch,
          "gradient_penalty: critic returned ", shape_str(score.shape()),
          ", expected [", B, ",1]");
  scratch.backward(sum(score));
  // empty when the score never touches the input; the norms are then zero
  const auto gin = xin.grad();

  double value = 0.0;
  std::vector<double> plus(interp), minus(interp);
  auto coeff = std::make_shared<std::vector<double>>(B, 0.0);
  for (int b = 0; b < B; ++b) {
    double nn = 0.0;
    const std::size_t base = static_cast<std::size_t>(b) * per;
    if (!gin.empty())
      for (int i = 0; i < per; ++i) nn += gin[base + i] * gin[base + i];
    nn = std::sqrt(nn);
    value += (nn - 1.0) * (nn - 1.0) / B;
    if (nn > 0.0) {
      (*coeff)[b] = (nn - 1.0) / (B * fd_step);
      for (int i = 0; i < per; ++i) {
        const double step = fd_step * gin[base + i] / nn;
        plus[base + i] += step;
        minus[base + i] -= step;
      }
    }
  }

  // probes on the live graph carry the parameter gradient of the penalty;
  // replaying the recorded branches keeps the pair inside one linear region,
  // otherwise a crossed branch injects its jump scaled by 1/fd_step
  g.replay_routing(&routing);
  Tensor sp = critic(g, g.constant(shape, std::move(plus)));
  g.replay_routing(&routing);
  Tensor sm = critic(g, g.constant(shape, std::move(minus)));
  g.replay_routing(nullptr);
  const int spi = sp.id(), smi = sm.id();
  auto back = [=](Graph& gr, int self) {
    const double gout = gr.grad_view(self)[0];
    if (gr.wants_grad(spi)) {
      auto gp = gr.grad_of(spi);
      for (int b = 0; b < B; ++b) gp[b] += gout * (*coeff)[b];
    }
    if (gr.wants_grad(smi)) {
      auto gm = gr.grad_of(smi);
      for (int b = 0; b < B; ++b) gm[b] -= gout * (*coeff)[b];
    }
  };
  return g.make_node("gradient_penalty", {spi, smi}, {1}, {value}, back);
}

namespace {

double batch_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

CriticLoss d_spa_loss(Graph& g, const SpatialCritic& d, const Tensor& ir,
                      const Tensor& fused, const Tensor& mask, double alpha,
                      Rng& rng, double fd_step) {
  check_images(ir, fused, "d_spa_loss");
  check_images(ir, mask, "d_spa_loss");
  require(alpha >= 0.0, ErrorKind::invalid_argument,
          "d_spa_loss: alpha must be non-negative, got ", alpha);

  Tensor masked_real = mul(ir, mask);
  Tensor masked_fake = mul(fused, mask);
  Tensor s_real = d.forward(g, masked_real);
  Tensor s_fake = d.forward(g, masked_fake);

  const CriticFn fn = [&d](Graph& gg, const Tensor& x) {
    return d.forward(gg, x);
  };
  Tensor gp = gradient_penalty(g, fn, masked_real.value(), masked_fake.value(),
                               masked_real.shape(), rng, fd_step);

  CriticLoss out;
  out.total = add(sub(mean(s_fake), mean(s_real)), scalar_mul(gp, alpha));
  out.wgap = batch_mean(s_real.value()) - batch_mean(s_fake.value());
  out.penalty = gp.value()[0];
  return out;
}

CriticLoss d_fre_loss(Graph& g, const FrequencyCritic& d, const Tensor& vi,
                      const Tensor& fused, double beta, Rng& rng,
                      double fd_step) {
  check_images(vi, fused, "d_fre_loss");
  require(beta >= 0.0, ErrorKind::invalid_argument,
          "d_fre_loss: beta must be non-negative, got ", beta);

  Tensor bands_real = haar_dwt2(vi);
  Tensor bands_fake = haar_dwt2(fused);
  Tensor s_real = d.forward(g, bands_real);
  Tensor s_fake = d.forward(g, bands_fake);

  const CriticFn fn = [&d](Graph& gg, const Tensor& x) {
    return d.forward(gg, x);
  };
  Tensor gp = gradient_penalty(g, fn, bands_real.value(), bands_fake.value(),
                               bands_real.shape(), rng, fd_step);

  CriticLoss out;
  out.total = add(sub(mean(s_fake), mean(s_real)), scalar_mul(gp, beta));
  out.wgap = batch_mean(s_real.value()) - batch_mean(s_fake.value());
  out.penalty = gp.value()[0];
  return out;
}

}  // namespace awf
