#include "discriminators.hpp"

namespace awf {

namespace {

constexpr double kSlope = 0.2;

inline int pooled(int n) { return (n - 2) / 2 + 1; }

Tensor stage(Graph& g, const Tensor& x, const LayerP& conv) {
  return leaky_relu(maxpool2d(conv_op(g, x, conv, 1, 1), 2, 2), kSlope);
}

}  // namespace

// ---- spatial critic -----------------------------------------------------

SpatialCritic::SpatialCritic(ParamSet& ps, Rng& rng, int image_size)
    : size_(image_size) {
  require(image_size >= 16, ErrorKind::invalid_argument,
          "SpatialCritic: image size must be at least 16, got ", image_size);
  c1_ = conv_params(ps, rng, "d_spa.c1", 16, 1, 3);
  c2_ = conv_params(ps, rng, "d_spa.c2", 32, 16, 3);
  c3_ = conv_params(ps, rng, "d_spa.c3", 64, 32, 3);
  c4_ = conv_params(ps, rng, "d_spa.c4", 64, 64, 3);
  int side = image_size;
  for (int i = 0; i < 4; ++i) side = pooled(side);
  fc1_ = fc_params(ps, rng, "d_spa.fc1", 64, 64 * side * side);
  fc2_ = fc_params(ps, rng, "d_spa.fc2", 1, 64);
}

Tensor SpatialCritic::forward(Graph& g, const Tensor& x) const {
  const Shape& xs = x.shape();
  require(xs.size() == 4 && xs[1] == 1 && xs[2] == size_ && xs[3] == size_,
          ErrorKind::shape_mismatch, "SpatialCritic: expected [B,1,", size_,
          ",", size_, "], got ", shape_str(xs));
  Tensor t = stage(g, x, c1_);
  t = stage(g, t, c2_);
  t = stage(g, t, c3_);
  t = stage(g, t, c4_);
  t = leaky_relu(fc_op(g, flatten(t), fc1_), kSlope);
  return fc_op(g, t, fc2_);
}

// ---- frequency critic ---------------------------------------------------

FrequencyCritic::FrequencyCritic(ParamSet& ps, Rng& rng, int image_size)
    : size_(image_size) {
  require(image_size >= 16, ErrorKind::invalid_argument,
          "FrequencyCritic: image size must be at least 16, got ", image_size);
  gc_ = conv_params(ps, rng, "d_fre.gc", 16, 1, 3);  // groups = 4
  se1_ = fc_params(ps, rng, "d_fre.se1", 4, 16);
  se2_ = fc_params(ps, rng, "d_fre.se2", 16, 4);
  c1_ = conv_params(ps, rng, "d_fre.c1", 32, 16, 3);
  c2_ = conv_params(ps, rng, "d_fre.c2", 64, 32, 3);
  int side = (image_size + 1) / 2;
  for (int i = 0; i < 2; ++i) side = pooled(side);
  fc1_ = fc_params(ps, rng, "d_fre.fc1", 64, 64 * side * side);
  fc2_ = fc_params(ps, rng, "d_fre.fc2", 1, 64);
}

Tensor FrequencyCritic::forward(Graph& g, const Tensor& bands) const {
  const Shape bs = bands.shape();
  const int sub = (size_ + 1) / 2;
  require(bs.size() == 4 && bs[1] == 4 && bs[2] == sub && bs[3] == sub,
          ErrorKind::shape_mismatch, "FrequencyCritic: expected [B,4,", sub,
          ",", sub, "], got ", shape_str(bs));
  // each subband gets its own filters
  Tensor t = leaky_relu(conv_op(g, bands, gc_, 1, 1, 4), kSlope);

  // squeeze and excitation over the lifted channels
  Tensor se = flatten(global_avg_pool(t));
  se = leaky_relu(fc_op(g, se, se1_), kSlope);
  se = sigmoid(fc_op(g, se, se2_));
  se = reshape(se, {bs[0], 16, 1, 1});
  t = mul(t, upsample_copy(se, bs[2], bs[3]));

  t = stage(g, t, c1_);
  t = stage(g, t, c2_);
  t = leaky_relu(fc_op(g, flatten(t), fc1_), kSlope);
  return fc_op(g, t, fc2_);
}

}  // namespace awf
