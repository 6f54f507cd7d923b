#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gradcheck.hpp"
#include "rng.hpp"
#include "tensor.hpp"

using awf::Graph;
using awf::ParamSet;
using awf::Shape;
using awf::Tensor;
using awf::testing::gradcheck;

namespace {

std::vector<double> randu(awf::Rng& rng, int n, double lo = -1.0,
                          double hi = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = lo + (hi - lo) * rng.uniform01();
  return v;
}

// reference convolution over an explicitly zero-padded copy of the input
std::vector<double> naive_conv(const std::vector<double>& in, int B, int Cin,
                               int H, int W, const std::vector<double>& w,
                               int Cout, int k, const std::vector<double>& bias,
                               int stride, int pad, int groups) {
  const int PH = H + 2 * pad, PW = W + 2 * pad;
  std::vector<double> padded(static_cast<std::size_t>(B) * Cin * PH * PW, 0.0);
  for (int n = 0; n < B; ++n)
    for (int c = 0; c < Cin; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          padded[((n * Cin + c) * PH + y + pad) * PW + x + pad] =
              in[((n * Cin + c) * H + y) * W + x];
  const int OH = (PH - k) / stride + 1, OW = (PW - k) / stride + 1;
  const int cin_g = Cin / groups, cout_g = Cout / groups;
  std::vector<double> out(static_cast<std::size_t>(B) * Cout * OH * OW);
  for (int n = 0; n < B; ++n)
    for (int oc = 0; oc < Cout; ++oc) {
      const int grp = oc / cout_g;
      for (int oh = 0; oh < OH; ++oh)
        for (int ow = 0; ow < OW; ++ow) {
          double acc = bias[oc];
          for (int icg = 0; icg < cin_g; ++icg)
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw)
                acc += w[((oc * cin_g + icg) * k + kh) * k + kw] *
                       padded[((n * Cin + grp * cin_g + icg) * PH +
                               oh * stride + kh) *
                                  PW +
                              ow * stride + kw];
          out[((n * Cout + oc) * OH + oh) * OW + ow] = acc;
        }
    }
  return out;
}

}  // namespace

TEST_CASE("conv2d with a centered identity kernel reproduces the input") {
  Graph g;
  std::vector<double> data{1, 2, 3, 4, 5, 6, 7, 8, 9};
  Tensor x = g.input({1, 1, 3, 3}, data);
  std::vector<double> w(9, 0.0);
  w[4] = 1.0;
  Tensor wt = g.constant({1, 1, 3, 3}, w);
  Tensor b = g.constant({1}, {0.0});
  Tensor y = awf::conv2d(x, wt, b, 1, 1);
  REQUIRE(y.shape() == Shape{1, 1, 3, 3});
  for (int i = 0; i < 9; ++i) CHECK(y.value()[i] == data[i]);
}

TEST_CASE("conv2d sums the window and applies the bias") {
  Graph g;
  Tensor x = g.input({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor w = g.constant({1, 1, 2, 2}, {1, 1, 1, 1});
  Tensor b = g.constant({1}, {0.5});
  Tensor y = awf::conv2d(x, w, b, 1, 0);
  REQUIRE(y.shape() == Shape{1, 1, 1, 1});
  CHECK(y.value()[0] == 10.5);
}

TEST_CASE("conv2d output size follows stride and padding") {
  Graph g;
  Tensor x = g.input({2, 3, 5, 5}, std::vector<double>(150, 0.25));
  Tensor w = g.constant({4, 3, 3, 3}, std::vector<double>(108, 0.1));
  Tensor b = g.constant({4}, std::vector<double>(4, 0.0));
  Tensor y = awf::conv2d(x, w, b, 2, 1);
  CHECK(y.shape() == Shape{2, 4, 3, 3});
}

TEST_CASE("conv2d matches a zero-padding reference on random problems") {
  awf::Rng rng(7);
  struct Case {
    int B, Cin, H, W, Cout, k, stride, pad, groups;
  };
  const Case cases[] = {
      {1, 1, 4, 4, 1, 3, 1, 1, 1},  {2, 3, 6, 5, 4, 3, 1, 1, 1},
      {1, 2, 7, 7, 3, 5, 2, 2, 1},  {1, 4, 6, 6, 8, 3, 1, 1, 4},
      {2, 4, 5, 5, 4, 3, 2, 0, 2},  {1, 1, 9, 3, 2, 3, 3, 1, 1},
  };
  for (const auto& c : cases) {
    auto in = randu(rng, c.B * c.Cin * c.H * c.W);
    auto w = randu(rng, c.Cout * (c.Cin / c.groups) * c.k * c.k);
    auto bias = randu(rng, c.Cout);
    auto expect = naive_conv(in, c.B, c.Cin, c.H, c.W, w, c.Cout, c.k, bias,
                             c.stride, c.pad, c.groups);
    Graph g;
    Tensor y = awf::conv2d(g.input({c.B, c.Cin, c.H, c.W}, in),
                           g.constant({c.Cout, c.Cin / c.groups, c.k, c.k}, w),
                           g.constant({c.Cout}, bias), c.stride, c.pad,
                           c.groups);
    REQUIRE(y.numel() == static_cast<int>(expect.size()));
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(y.value()[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("grouped conv2d equals dense convolutions on the channel slices") {
  awf::Rng rng(11);
  const int B = 1, Cin = 4, H = 5, W = 5, Cout = 6, k = 3;
  auto in = randu(rng, B * Cin * H * W);
  auto w = randu(rng, Cout * 2 * k * k);
  auto bias = randu(rng, Cout);

  Graph g;
  Tensor y = awf::conv2d(g.input({B, Cin, H, W}, in),
                         g.constant({Cout, 2, k, k}, w), g.constant({Cout}, bias),
                         1, 1, 2);

  // same thing as two dense convolutions on the two halves of the channels
  for (int grp = 0; grp < 2; ++grp) {
    std::vector<double> in_half(in.begin() + grp * 2 * H * W,
                                in.begin() + (grp + 1) * 2 * H * W);
    std::vector<double> w_half(w.begin() + grp * 3 * 2 * k * k,
                               w.begin() + (grp + 1) * 3 * 2 * k * k);
    std::vector<double> b_half(bias.begin() + grp * 3,
                               bias.begin() + (grp + 1) * 3);
    Graph gh;
    Tensor yh = awf::conv2d(gh.input({1, 2, H, W}, in_half),
                            gh.constant({3, 2, k, k}, w_half),
                            gh.constant({3}, b_half), 1, 1);
    for (int i = 0; i < yh.numel(); ++i)
      CHECK(y.value()[grp * 3 * H * W + i] == doctest::Approx(yh.value()[i]));
  }
}

TEST_CASE("conv2d gradients agree with finite differences") {
  awf::Rng rng(3);
  const int B = 1, Cin = 2, H = 4, W = 4, Cout = 3, k = 3;
  auto in = randu(rng, B * Cin * H * W);
  auto w = randu(rng, Cout * Cin * k * k, -0.5, 0.5);
  auto bias = randu(rng, Cout, -0.2, 0.2);
  gradcheck(
      "conv2d",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({B, Cin, H, W}, v[0]);
        Tensor wt = g.input({Cout, Cin, k, k}, v[1]);
        Tensor b = g.input({Cout}, v[2]);
        return awf::mean(awf::conv2d(x, wt, b, 1, 1));
      },
      {in, w, bias});
}

TEST_CASE("strided grouped conv2d gradients agree with finite differences") {
  awf::Rng rng(5);
  const int B = 2, Cin = 4, H = 5, W = 5, Cout = 4, k = 3;
  auto in = randu(rng, B * Cin * H * W);
  auto w = randu(rng, Cout * 2 * k * k, -0.5, 0.5);
  auto bias = randu(rng, Cout, -0.2, 0.2);
  gradcheck(
      "conv2d s2 g2",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({B, Cin, H, W}, v[0]);
        Tensor wt = g.input({Cout, 2, k, k}, v[1]);
        Tensor b = g.input({Cout}, v[2]);
        Tensor y = awf::conv2d(x, wt, b, 2, 1, 2);
        return awf::mean(awf::mul(y, y));
      },
      {in, w, bias});
}

TEST_CASE("maxpool2d picks window maxima") {
  Graph g;
  Tensor x = g.input({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor y = awf::maxpool2d(x, 2, 2);
  REQUIRE(y.shape() == Shape{1, 1, 1, 1});
  CHECK(y.value()[0] == 4.0);
  g.backward(awf::sum(y));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 0.0);
  CHECK(x.grad()[3] == 1.0);
}

TEST_CASE("maxpool2d ties route gradient to the first window element") {
  Graph g;
  Tensor x = g.input({1, 1, 2, 2}, {1, 1, 1, 1});
  Tensor y = awf::maxpool2d(x, 2, 2);
  g.backward(awf::sum(y));
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 0.0);
  CHECK(x.grad()[3] == 0.0);
}

TEST_CASE("maxpool2d gradients agree with finite differences") {
  awf::Rng rng(13);
  // well separated values keep the argmax stable under the probe step
  std::vector<double> in(2 * 2 * 4 * 4);
  for (std::size_t i = 0; i < in.size(); ++i)
    in[i] = static_cast<double>(i % 7) + 0.1 * rng.uniform01();
  gradcheck(
      "maxpool2d",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({2, 2, 4, 4}, v[0]);
        Tensor y = awf::maxpool2d(x, 2, 2);
        return awf::mean(awf::mul(y, y));
      },
      {in});
}

TEST_CASE("fully_connected computes x W^T + b") {
  Graph g;
  Tensor x = g.input({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor w = g.constant({2, 3}, {1, 0, 0, 0, 0, 1});
  Tensor b = g.constant({2}, {0.5, -0.5});
  Tensor y = awf::fully_connected(x, w, b);
  REQUIRE(y.shape() == Shape{2, 2});
  CHECK(y.value()[0] == 1.5);
  CHECK(y.value()[1] == 2.5);
  CHECK(y.value()[2] == 4.5);
  CHECK(y.value()[3] == 5.5);
}

TEST_CASE("fully_connected gradients agree with finite differences") {
  awf::Rng rng(17);
  auto in = randu(rng, 2 * 5);
  auto w = randu(rng, 3 * 5, -0.5, 0.5);
  auto b = randu(rng, 3, -0.2, 0.2);
  gradcheck(
      "fully_connected",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({2, 5}, v[0]);
        Tensor wt = g.input({3, 5}, v[1]);
        Tensor bt = g.input({3}, v[2]);
        Tensor y = awf::fully_connected(x, wt, bt);
        return awf::mean(awf::mul(y, y));
      },
      {in, w, b});
}

TEST_CASE("elementwise ops compute expected values") {
  Graph g;
  Tensor a = g.input({4}, {1.0, -2.0, 0.5, 0.0});
  Tensor b = g.input({4}, {2.0, 4.0, -1.0, 1.0});
  CHECK(awf::add(a, b).value()[1] == 2.0);
  CHECK(awf::sub(a, b).value()[0] == -1.0);
  CHECK(awf::mul(a, b).value()[2] == -0.5);
  CHECK(awf::div(a, b).value()[1] == -0.5);
  CHECK(awf::add_scalar(a, 3.0).value()[3] == 3.0);
  CHECK(awf::scalar_mul(a, -2.0).value()[0] == -2.0);
  CHECK(awf::leaky_relu(a, 0.2).value()[0] == 1.0);
  CHECK(awf::leaky_relu(a, 0.2).value()[1] == doctest::Approx(-0.4));
  CHECK(awf::sigmoid(g.input({1}, {0.0})).value()[0] == 0.5);
  CHECK(awf::tanh(g.input({1}, {0.0})).value()[0] == 0.0);
}

TEST_CASE("composite elementwise chain gradients agree with finite differences") {
  awf::Rng rng(19);
  auto a = randu(rng, 6, 0.2, 1.5);
  auto b = randu(rng, 6, 0.5, 2.0);
  gradcheck(
      "elementwise chain",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({6}, v[0]);
        Tensor y = g.input({6}, v[1]);
        Tensor t = awf::mul(awf::add(x, y), awf::sub(x, y));
        t = awf::div(t, awf::add_scalar(awf::mul(y, y), 1.0));
        t = awf::leaky_relu(t, 0.2);
        t = awf::sigmoid(awf::scalar_mul(t, 0.7));
        t = awf::tanh(t);
        return awf::mean(t);
      },
      {a, b});
}

TEST_CASE("sum of x*x backpropagates 2x exactly") {
  Graph g;
  std::vector<double> data{1.5, -2.0, 0.25, 3.0};
  Tensor x = g.input({4}, data);
  g.backward(awf::sum(awf::mul(x, x)));
  for (int i = 0; i < 4; ++i)
    CHECK(x.grad()[i] == doctest::Approx(2.0 * data[i]).epsilon(1e-12));
}

TEST_CASE("concat joins along the channel axis and splits gradient") {
  Graph g;
  Tensor a = g.input({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor b = g.input({1, 2, 2, 2}, {5, 6, 7, 8, 9, 10, 11, 12});
  Tensor y = awf::concat(a, b, 1);
  REQUIRE(y.shape() == Shape{1, 3, 2, 2});
  for (int i = 0; i < 12; ++i) CHECK(y.value()[i] == i + 1.0);
  g.backward(awf::sum(awf::mul(y, y)));
  for (int i = 0; i < 4; ++i) CHECK(a.grad()[i] == 2.0 * (i + 1));
  for (int i = 0; i < 8; ++i) CHECK(b.grad()[i] == 2.0 * (i + 5));
}

TEST_CASE("concat along the batch axis stacks whole samples") {
  Graph g;
  Tensor a = g.input({1, 2}, {1, 2});
  Tensor b = g.input({2, 2}, {3, 4, 5, 6});
  Tensor y = awf::concat(a, b, 0);
  REQUIRE(y.shape() == Shape{3, 2});
  for (int i = 0; i < 6; ++i) CHECK(y.value()[i] == i + 1.0);
}

TEST_CASE("channel_mean and channel_max reduce across channels") {
  Graph g;
  Tensor x = g.input({1, 3, 1, 2}, {1, 2, 3, 4, 8, 6});
  Tensor m = awf::channel_mean(x);
  REQUIRE(m.shape() == Shape{1, 1, 1, 2});
  CHECK(m.value()[0] == doctest::Approx(4.0));
  CHECK(m.value()[1] == doctest::Approx(4.0));
  Tensor mx = awf::channel_max(x);
  CHECK(mx.value()[0] == 8.0);
  CHECK(mx.value()[1] == 6.0);
  g.backward(awf::sum(awf::add(m, mx)));
  // mean spreads 1/3 to every channel, max goes to the winning channel only
  CHECK(x.grad()[0] == doctest::Approx(1.0 / 3));
  CHECK(x.grad()[4] == doctest::Approx(1.0 / 3 + 1.0));
  CHECK(x.grad()[5] == doctest::Approx(1.0 / 3 + 1.0));
}

TEST_CASE("channel_max ties route gradient to the first channel") {
  Graph g;
  Tensor x = g.input({1, 2, 1, 1}, {2.0, 2.0});
  g.backward(awf::sum(awf::channel_max(x)));
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
}

TEST_CASE("channel reductions pass finite difference checks") {
  awf::Rng rng(23);
  std::vector<double> in(2 * 3 * 2 * 2);
  for (std::size_t i = 0; i < in.size(); ++i)
    in[i] = static_cast<double>((i * 5) % 11) + 0.1 * rng.uniform01();
  gradcheck(
      "channel reductions",
      [&](Graph& g, const std::vector<std::vector<double>>& v) {
        Tensor x = g.input({2, 3, 2, 2}, v[0]);
        Tensor y = awf::concat(awf::channel_mean(x), awf::channel_max(x), 1);
        return awf::mean(awf::mul(y, y));
      },
      {in});
}

TEST_CASE("global_avg_pool averages each plane") {
  Graph g;
  Tensor x = g.input({1, 2, 2, 2}, {1, 2, 3, 4, 10, 10, 10, 10});
  Tensor y = awf::global_avg_pool(x);
  REQUIRE(y.shape() == Shape{1, 2, 1, 1});
  CHECK(y.value()[0] == doctest::Approx(2.5));
  CHECK(y.value()[1] == doctest::Approx(10.0));
  g.backward(awf::sum(y));
  for (int i = 0; i < 8; ++i) CHECK(x.grad()[i] == doctest::Approx(0.25));
}

TEST_CASE("upsample_copy repeats pixels and pools gradient back") {
  Graph g;
  Tensor x = g.input({1, 1, 1, 2}, {3.0, 5.0});
  Tensor y = awf::upsample_copy(x, 2, 2);
  REQUIRE(y.shape() == Shape{1, 1, 2, 4});
  const std::vector<double> expect{3, 3, 5, 5, 3, 3, 5, 5};
  for (int i = 0; i < 8; ++i) CHECK(y.value()[i] == expect[i]);
  g.backward(awf::sum(y));
  CHECK(x.grad()[0] == 4.0);
  CHECK(x.grad()[1] == 4.0);
}

TEST_CASE("expand_channels broadcasts and sums gradient across channels") {
  Graph g;
  Tensor x = g.input({1, 1, 1, 2}, {1.0, 2.0});
  Tensor y = awf::expand_channels(x, 3);
  REQUIRE(y.shape() == Shape{1, 3, 1, 2});
  for (int c = 0; c < 3; ++c) {
    CHECK(y.value()[c * 2 + 0] == 1.0);
    CHECK(y.value()[c * 2 + 1] == 2.0);
  }
  g.backward(awf::sum(y));
  CHECK(x.grad()[0] == 3.0);
  CHECK(x.grad()[1] == 3.0);
}

TEST_CASE("reshape and flatten preserve data and pass gradient through") {
  Graph g;
  Tensor x = g.input({2, 2, 1, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
  Tensor y = awf::flatten(x);
  REQUIRE(y.shape() == Shape{2, 4});
  for (int i = 0; i < 8; ++i) CHECK(y.value()[i] == i + 1.0);
  Tensor z = awf::reshape(y, {8});
  g.backward(awf::sum(awf::mul(z, z)));
  for (int i = 0; i < 8; ++i) CHECK(x.grad()[i] == 2.0 * (i + 1));
}

TEST_CASE("mean reduces to the arithmetic mean") {
  Graph g;
  Tensor x = g.input({4}, {1, 2, 3, 4});
  CHECK(awf::mean(x).scalar() == doctest::Approx(2.5));
  CHECK(awf::sum(x).scalar() == doctest::Approx(10.0));
}

TEST_CASE("sgd_step applies lr*grad and clears the gradient") {
  ParamSet params;
  awf::Param& p = params.add("w", {1});
  p.value[0] = 1.0;
  Graph g;
  Tensor w = g.leaf(p);
  g.backward(awf::sum(awf::mul(w, w)));  // d/dw w^2 = 2
  CHECK(p.grad[0] == doctest::Approx(2.0));
  awf::sgd_step(params, 0.1);
  CHECK(p.value[0] == doctest::Approx(0.8));
  CHECK(p.grad[0] == 0.0);
}

TEST_CASE("sgd drives a quadratic to its minimum") {
  ParamSet params;
  awf::Param& p = params.add("w", {1});
  p.value[0] = 0.0;
  for (int step = 0; step < 50; ++step) {
    Graph g;
    Tensor w = g.leaf(p);
    Tensor diff = awf::add_scalar(w, -3.0);
    g.backward(awf::sum(awf::mul(diff, diff)));
    awf::sgd_step(params, 0.2);
  }
  CHECK(std::abs(p.value[0] - 3.0) < 1e-9);
}

TEST_CASE("parameters shared between terms accumulate both gradients") {
  ParamSet params;
  awf::Param& p = params.add("w", {1});
  p.value[0] = 2.0;
  Graph g;
  Tensor w1 = g.leaf(p);
  Tensor w2 = g.leaf(p);
  // w^2 + 3w built from two separate leaves of the same parameter
  Tensor loss = awf::add(awf::mul(w1, w1), awf::scalar_mul(w2, 3.0));
  g.backward(awf::sum(loss));
  CHECK(p.grad[0] == doctest::Approx(2.0 * 2.0 + 3.0));
}

TEST_CASE("constants stay gradient free") {
  Graph g;
  Tensor c = g.constant({2}, {1.0, 2.0});
  Tensor x = g.input({2}, {3.0, 4.0});
  g.backward(awf::sum(awf::mul(c, x)));
  CHECK(c.grad().empty());
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 2.0);
}

TEST_CASE("forward evaluation is deterministic") {
  awf::Rng rng(29);
  auto in = randu(rng, 1 * 2 * 6 * 6);
  auto w = randu(rng, 4 * 2 * 3 * 3);
  auto b = randu(rng, 4);
  std::vector<double> first;
  for (int round = 0; round < 2; ++round) {
    Graph g;
    Tensor y = awf::sigmoid(awf::conv2d(g.input({1, 2, 6, 6}, in),
                                        g.constant({4, 2, 3, 3}, w),
                                        g.constant({4}, b), 1, 1));
    if (round == 0)
      first.assign(y.value().begin(), y.value().end());
    else
      for (std::size_t i = 0; i < first.size(); ++i)
        CHECK(y.value()[i] == first[i]);
  }
}

TEST_CASE("shape errors carry the shape_mismatch kind") {
  Graph g;
  Tensor a = g.input({2}, {1, 2});
  Tensor b = g.input({3}, {1, 2, 3});
  CHECK_THROWS_AS(awf::add(a, b), awf::Error);
  try {
    awf::add(a, b);
  } catch (const awf::Error& e) {
    CHECK(e.kind() == awf::ErrorKind::shape_mismatch);
  }
}

TEST_CASE("a graph refuses a second backward pass") {
  Graph g;
  Tensor x = g.input({1}, {2.0});
  Tensor loss = awf::mul(x, x);
  g.backward(loss);
  CHECK_THROWS_AS(g.backward(loss), awf::Error);
}

TEST_CASE("backward requires a scalar loss") {
  Graph g;
  Tensor x = g.input({2}, {1.0, 2.0});
  CHECK_THROWS_AS(g.backward(x), awf::Error);
}

TEST_CASE("sgd_step rejects parameters that never saw a gradient") {
  ParamSet params;
  params.add("w", {2});
  CHECK_THROWS_AS(awf::sgd_step(params, 0.1), awf::Error);
}

TEST_CASE("conv2d rejects mismatched channel counts") {
  Graph g;
  Tensor x = g.input({1, 3, 4, 4}, std::vector<double>(48, 0.0));
  Tensor w = g.constant({2, 2, 3, 3}, std::vector<double>(36, 0.0));
  Tensor b = g.constant({2}, {0.0, 0.0});
  CHECK_THROWS_AS(awf::conv2d(x, w, b, 1, 1), awf::Error);
}

TEST_CASE("rng state round trips through serialization") {
  awf::Rng a(42);
  a.uniform01();
  a.normal();
  const std::string s = a.state();
  awf::Rng b(0);
  b.restore(s);
  for (int i = 0; i < 16; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("rng shuffle is a permutation and is seed stable") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  awf::Rng a(9);
  a.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7};
  awf::Rng b(9);
  b.shuffle(w);
  CHECK(v == w);
}
