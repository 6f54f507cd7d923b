#pragma once

#include <string>

#include "rng.hpp"
#include "tensor.hpp"

namespace awf {

// Weight/bias pair owned by a ParamSet.
struct LayerP {
  Param* w = nullptr;
  Param* b = nullptr;
};

// Find-or-create layer parameters. Fresh convolution weights are drawn from
// N(0, 2/fan_in) with fan_in = cin_g*k*k, fully connected ones with
// fan_in = in_n; biases start at zero. Existing parameters (a loaded
// checkpoint) are shape checked and reused without touching the rng.
LayerP conv_params(ParamSet& ps, Rng& rng, const std::string& name, int cout,
                   int cin_g, int k);
LayerP fc_params(ParamSet& ps, Rng& rng, const std::string& name, int out_n,
                 int in_n);

inline Tensor conv_op(Graph& g, const Tensor& x, const LayerP& l, int stride,
                      int padding, int groups = 1) {
  return conv2d(x, g.leaf(*l.w), g.leaf(*l.b), stride, padding, groups);
}

inline Tensor fc_op(Graph& g, const Tensor& x, const LayerP& l) {
  return fully_connected(x, g.leaf(*l.w), g.leaf(*l.b));
}

}  // namespace awf
