#include "generator.hpp"

namespace awf {

namespace {

constexpr int kBranchNarrow = 16;
constexpr int kBranchWide = 32;
constexpr int kTrunkWide = 64;
constexpr double kSlope = 0.2;

// out = in + c2(lrelu(c1(in))), both convs 3x3 keeping the channel count
struct ResDef {
  LayerP c1, c2;
};

ResDef res_params(ParamSet& ps, Rng& rng, const std::string& name,
                  int channels) {
  ResDef r;
  r.c1 = conv_params(ps, rng, name + ".c1", channels, channels, 3);
  r.c2 = conv_params(ps, rng, name + ".c2", channels, channels, 3);
  return r;
}

Tensor res_forward(Graph& g, const LayerP& c1, const LayerP& c2,
                   const Tensor& x) {
  Tensor t = leaky_relu(conv_op(g, x, c1, 1, 1), kSlope);
  return add(x, conv_op(g, t, c2, 1, 1));
}

}  // namespace

Generator::Generator(ParamSet& ps, Rng& rng) {
  const auto branch = [&](Branch& br, const std::string& name) {
    br.c1 = conv_params(ps, rng, name + ".c1", kBranchNarrow, 1, 3);
    br.c2 = conv_params(ps, rng, name + ".c2", kBranchWide, kBranchNarrow, 3);
    for (int i = 0; i < 3; ++i) {
      const auto r = res_params(ps, rng, name + ".res" + std::to_string(i + 1),
                                kBranchWide);
      br.res[i] = {r.c1, r.c2};
    }
    br.att = conv_params(ps, rng, name + ".att", 1, 2, 7);
  };
  branch(ir_, "g.ir");
  branch(vi_, "g.vi");
  for (int i = 0; i < 3; ++i) {
    const auto r = res_params(ps, rng, "g.trunk.res" + std::to_string(i + 1),
                              kTrunkWide);
    trunk_[i] = {r.c1, r.c2};
  }
  sq1_ = conv_params(ps, rng, "g.trunk.sq1", kBranchWide, kTrunkWide, 1);
  sq2_ = conv_params(ps, rng, "g.trunk.sq2", kBranchNarrow, kBranchWide, 1);
  sq3_ = conv_params(ps, rng, "g.trunk.sq3", 1, kBranchNarrow, 1);
}

Tensor Generator::branch_forward(Graph& g, const Branch& br, const Tensor& x,
                                 Tensor* att_out) const {
  Tensor t = leaky_relu(conv_op(g, x, br.c1, 1, 1), kSlope);
  t = leaky_relu(conv_op(g, t, br.c2, 1, 1), kSlope);
  for (const Res& r : br.res) t = res_forward(g, r.c1, r.c2, t);
  // spatial attention from the channel statistics of the feature stack
  Tensor stats = concat(channel_mean(t), channel_max(t), 1);
  Tensor att = sigmoid(conv_op(g, stats, br.att, 1, 3));
  if (att_out) *att_out = att;
  return mul(t, expand_channels(att, kBranchWide));
}

Generator::Output Generator::forward(Graph& g, const Tensor& ir,
                                     const Tensor& vi) const {
  require(&ir.graph() == &g && &vi.graph() == &g, ErrorKind::invalid_argument,
          "Generator::forward: inputs from another graph");
  const Shape& is = ir.shape();
  require(is.size() == 4 && is[1] == 1, ErrorKind::shape_mismatch,
          "Generator::forward: ir must be [B,1,H,W], got ", shape_str(is));
  require(is == vi.shape(), ErrorKind::shape_mismatch,
          "Generator::forward: ir ", shape_str(is), " and vi ",
          shape_str(vi.shape()), " differ");

  Output out;
  Tensor fi = branch_forward(g, ir_, ir, &out.att_ir);
  Tensor fv = branch_forward(g, vi_, vi, &out.att_vi);
  Tensor t = concat(fi, fv, 1);
  for (const Res& r : trunk_) t = res_forward(g, r.c1, r.c2, t);
  t = leaky_relu(conv_op(g, t, sq1_, 1, 0), kSlope);
  t = leaky_relu(conv_op(g, t, sq2_, 1, 0), kSlope);
  out.fused = sigmoid(conv_op(g, t, sq3_, 1, 0));
  return out;
}

}  // namespace awf
