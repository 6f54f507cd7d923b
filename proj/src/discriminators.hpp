#pragma once

#include "layers.hpp"

namespace awf {

// Critic over raw images. Four conv/pool/lrelu stages then two fully
// connected layers down to one unbounded score per sample. The fully
// connected width is tied to the square image size given at construction.
class SpatialCritic {
public:
  SpatialCritic(ParamSet& ps, Rng& rng, int image_size);

  Tensor forward(Graph& g, const Tensor& x) const;  // [B,1,s,s] -> [B,1]
  int image_size() const { return size_; }

private:
  int size_;
  LayerP c1_, c2_, c3_, c4_, fc1_, fc2_;
};

// Critic over wavelet subbands. A grouped conv lifts each of the four bands
// separately, a squeeze-and-excitation block reweights the resulting
// channels, and a conv/pool tail feeds the fully connected head. Input is
// [B,4,s/2,s/2] for the image size s given at construction.
class FrequencyCritic {
public:
  FrequencyCritic(ParamSet& ps, Rng& rng, int image_size);

  Tensor forward(Graph& g, const Tensor& bands) const;  // -> [B,1]
  int image_size() const { return size_; }

private:
  int size_;
  LayerP gc_, se1_, se2_, c1_, c2_, fc1_, fc2_;
};

}  // namespace awf
