#pragma once

#include "layers.hpp"

namespace awf {

// Fusion network. Each modality runs through its own feature branch whose
// output is reweighted by a spatial attention map; the concatenated branches
// pass through a residual trunk that squeezes down to one sigmoid channel.
class Generator {
public:
  // Binds to existing "g.*" parameters in ps or creates freshly initialized
  // ones; rng is only consumed when parameters are created.
  Generator(ParamSet& ps, Rng& rng);

  struct Output {
    Tensor fused;   // [B,1,H,W], values in (0,1)
    Tensor att_ir;  // [B,1,H,W] attention over the infrared branch
    Tensor att_vi;  // same for the visible branch
  };

  // ir and vi must both be [B,1,H,W] on the same graph.
  Output forward(Graph& g, const Tensor& ir, const Tensor& vi) const;

private:
  struct Res {
    LayerP c1, c2;
  };
  struct Branch {
    LayerP c1, c2;
    Res res[3];
    LayerP att;
  };

  Tensor branch_forward(Graph& g, const Branch& br, const Tensor& x,
                        Tensor* att_out) const;

  Branch ir_, vi_;
  Res trunk_[3];
  LayerP sq1_, sq2_, sq3_;
};

}  // namespace awf
