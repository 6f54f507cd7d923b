#pragma once

#include <functional>
#include <span>

#include "discriminators.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace awf {

struct LossWeights {
  double lambda = 1.0;  // content term weight in the generator objective
  double gamma = 1.0;   // SSIM term weight inside the content loss
  double alpha = 10.0;  // gradient penalty coefficient, spatial critic
  double beta = 10.0;   // gradient penalty coefficient, frequency critic
};

// mean squared pixel difference
Tensor mse(const Tensor& x, const Tensor& y);

// (2 cov + C)/(var_x + var_y + C) with C = 9e-4, evaluated over 11x11
// sliding windows with uniform weights and averaged. Images smaller than
// the window, or global_window = true, use one window spanning the image.
Tensor ssim_paper(const Tensor& x, const Tensor& y, bool global_window = false);

// MSE(ir, fused) + gamma*(1 - SSIM(vi, fused))
Tensor content_loss(const Tensor& ir, const Tensor& vi, const Tensor& fused,
                    const LossWeights& w, bool ssim_global = false);

// -mean D_spa(fused*mask) - mean D_fre(subbands(fused))
Tensor adv_loss(const Tensor& fused, const Tensor& mask,
                const SpatialCritic& d_spa, const FrequencyCritic& d_fre);

using CriticFn = std::function<Tensor(Graph&, const Tensor&)>;

// One-sided WGAN gradient penalty mean((|grad D(interp)| - 1)^2) with
// per-sample interpolation points. The input gradient comes from a frozen
// backward pass; the returned node's backward estimates the parameter
// gradient by a central difference along the unit input-gradient direction,
// so the engine never needs second derivatives. Samples whose input
// gradient vanishes contribute value 1 and no parameter gradient.
Tensor gradient_penalty(Graph& g, const CriticFn& critic,
                        std::span<const double> real,
                        std::span<const double> fake, const Shape& shape,
                        Rng& rng, double fd_step = 1e-4);

struct CriticLoss {
  Tensor total;          // scalar on the caller's graph
  double wgap = 0.0;     // mean real score - mean fake score
  double penalty = 0.0;  // gradient penalty value
};

// mean D_spa(fused*mask) - mean D_spa(ir*mask) + alpha * penalty
CriticLoss d_spa_loss(Graph& g, const SpatialCritic& d, const Tensor& ir,
                      const Tensor& fused, const Tensor& mask, double alpha,
                      Rng& rng, double fd_step = 1e-4);

// mean D_fre(subbands(fused)) - mean D_fre(subbands(vi)) + beta * penalty
CriticLoss d_fre_loss(Graph& g, const FrequencyCritic& d, const Tensor& vi,
                      const Tensor& fused, double beta, Rng& rng,
                      double fd_step = 1e-4);

}  // namespace awf
