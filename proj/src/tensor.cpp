#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace awf {

int numel(const Shape& shape) {
  int n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

void check_shape(const Shape& shape, const char* who) {
  require(!shape.empty(), ErrorKind::invalid_argument, who, ": empty shape");
  for (int d : shape)
    require(d > 0, ErrorKind::invalid_argument, who,
            ": non-positive dimension in ", shape_str(shape));
}

}  // namespace

// ---- parameters ---------------------------------------------------------

Param& ParamSet::add(const std::string& name, Shape shape) {
  check_shape(shape, "ParamSet::add");
  require(find(name) == nullptr, ErrorKind::invalid_argument,
          "ParamSet::add: duplicate parameter '", name, "'");
  auto p = std::make_unique<Param>();
  p->name = name;
  p->shape = std::move(shape);
  p->value.assign(p->numel(), 0.0);
  params_.push_back(std::move(p));
  return *params_.back();
}

Param* ParamSet::find(std::string_view name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

void ParamSet::zero_grads() {
  for (auto& p : params_) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

void sgd_step(ParamSet& params, double lr) {
  for (auto& p : params.params()) {
    require(!p->grad.empty(), ErrorKind::invalid_argument,
            "sgd_step: parameter '", p->name, "' has no gradient");
    for (std::size_t i = 0; i < p->value.size(); ++i)
      p->value[i] -= lr * p->grad[i];
    std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }
}

// ---- tensor handle ------------------------------------------------------

const Shape& Tensor::shape() const { return g_->shape_of(id_); }
int Tensor::numel() const { return awf::numel(shape()); }
std::span<const double> Tensor::value() const { return g_->value_of(id_); }

std::span<const double> Tensor::grad() const {
  return g_->grad_allocated(id_) ? g_->grad_view(id_)
                                 : std::span<const double>{};
}

double Tensor::scalar() const {
  require(numel() == 1, ErrorKind::shape_mismatch,
          "Tensor::scalar: tensor has shape ", shape_str(shape()));
  return value()[0];
}

// ---- graph --------------------------------------------------------------

Graph::Node& Graph::node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
const Graph::Node& Graph::node(int id) const {
  return nodes_[static_cast<std::size_t>(id)];
}

Tensor Graph::input(Shape shape, std::vector<double> data) {
  check_shape(shape, "Graph::input");
  require(static_cast<int>(data.size()) == awf::numel(shape),
          ErrorKind::shape_mismatch, "Graph::input: ", data.size(),
          " values for shape ", shape_str(shape));
  Node n;
  n.op = "input";
  n.shape = std::move(shape);
  n.value = std::move(data);
  n.wants_grad = true;
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Graph::constant(Shape shape, std::vector<double> data) {
  Tensor t = input(std::move(shape), std::move(data));
  node(t.id()).op = "constant";
  node(t.id()).wants_grad = false;
  return t;
}

Tensor Graph::leaf(Param& p) {
  Node n;
  n.op = "param";
  n.shape = p.shape;
  n.param = &p;
  n.wants_grad = !params_frozen_;
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Graph::make_node(const char* op, std::vector<int> inputs, Shape shape,
                        std::vector<double> value,
                        std::function<void(Graph&, int)> backward_fn) {
  check_shape(shape, op);
  require(static_cast<int>(value.size()) == awf::numel(shape),
          ErrorKind::shape_mismatch, op, ": ", value.size(),
          " values for shape ", shape_str(shape));
  Node n;
  n.op = op;
  n.shape = std::move(shape);
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  n.backward_fn = std::move(backward_fn);
  n.wants_grad = false;
  for (int in : n.inputs) {
    require(in >= 0 && in < static_cast<int>(nodes_.size()),
            ErrorKind::invalid_argument, op, ": input from another graph");
    if (node(in).wants_grad) n.wants_grad = true;
  }
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

std::span<const double> Graph::value_of(int id) const {
  const Node& n = node(id);
  if (n.param) return n.param->value;
  return n.value;
}

std::span<double> Graph::grad_of(int id) {
  Node& n = node(id);
  if (n.param) {
    n.param->ensure_grad();
    return n.param->grad;
  }
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

std::span<const double> Graph::grad_view(int id) const {
  const Node& n = node(id);
  if (n.param) return n.param->grad;
  return n.grad;
}

bool Graph::wants_grad(int id) const { return node(id).wants_grad; }

const std::vector<unsigned char>* Graph::next_relu_routing() {
  if (!replay_) return nullptr;
  require(replay_relu_ < replay_->relu_neg.size(), ErrorKind::invalid_argument,
          "routing replay: more leaky_relu calls than were recorded");
  return &replay_->relu_neg[replay_relu_++];
}

const std::vector<int>* Graph::next_pool_routing() {
  if (!replay_) return nullptr;
  require(replay_pool_ < replay_->pool_at.size(), ErrorKind::invalid_argument,
          "routing replay: more maxpool2d calls than were recorded");
  return &replay_->pool_at[replay_pool_++];
}

bool Graph::grad_allocated(int id) const {
  const Node& n = node(id);
  if (n.param) return !n.param->grad.empty();
  return !n.grad.empty();
}

const Shape& Graph::shape_of(int id) const { return node(id).shape; }

void Graph::backward(const Tensor& loss) {
  require(!consumed_, ErrorKind::invalid_argument,
          "Graph::backward: graph already consumed");
  require(loss.valid() && &loss.graph() == this, ErrorKind::invalid_argument,
          "Graph::backward: loss from another graph");
  require(loss.numel() == 1, ErrorKind::shape_mismatch,
          "Graph::backward: loss has shape ", shape_str(loss.shape()));
  consumed_ = true;
  grad_of(loss.id())[0] = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = node(id);
    if (!n.wants_grad || !n.backward_fn) continue;
    if (n.grad.empty()) continue;  // no gradient reached this node
    n.backward_fn(*this, id);
  }
}

// ---- convolution --------------------------------------------------------

namespace {

// first output index whose receptive field enters the array for kernel tap kk
inline int out_lo(int pad, int kk, int stride) {
  int off = pad - kk;
  return off <= 0 ? 0 : (off + stride - 1) / stride;
}

// unrolled dot product with a fixed combination order so results stay
// reproducible while the partial sums still vectorize
inline double dot_stride1(const double* a, const double* b, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double acc = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// one past the last valid output index for kernel tap kk
inline int out_hi(int limit, int pad, int kk, int stride, int out_dim) {
  int off = limit - 1 + pad - kk;
  return off < 0 ? 0 : std::min(out_dim, off / stride + 1);
}

// The 3x3 stride-1 pad-1 case covers every hot convolution, so it gets
// row kernels that apply all three horizontal taps in one pass instead of
// sweeping the plane once per tap.

// dst[y][x] += sum_{kh,kw} w[kh*3+kw] * src[y-1+kh][x-1+kw], zero padded
inline void corr3_accum(double* dst, const double* src, const double* w,
                        int H, int W) {
  for (int y = 0; y < H; ++y) {
    double* const drow = dst + static_cast<std::size_t>(y) * W;
    const int kh0 = y == 0 ? 1 : 0, kh1 = y == H - 1 ? 2 : 3;
    for (int kh = kh0; kh < kh1; ++kh) {
      const double* const srow =
          src + static_cast<std::size_t>(y - 1 + kh) * W;
      const double w0 = w[kh * 3], w1 = w[kh * 3 + 1], w2 = w[kh * 3 + 2];
      drow[0] += w1 * srow[0] + w2 * srow[1];
      for (int x = 1; x < W - 1; ++x)
        drow[x] += w0 * srow[x - 1] + w1 * srow[x] + w2 * srow[x + 1];
      drow[W - 1] += w0 * srow[W - 2] + w1 * srow[W - 1];
    }
  }
}

// gw[kh*3+kw] += sum_{y,x} src[y-1+kh][x-1+kw] * gout[y][x], zero padded
inline void wgrad3_accum(double* gw, const double* src, const double* gout,
                         int H, int W) {
  for (int kh = 0; kh < 3; ++kh) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    const int y0 = kh == 0 ? 1 : 0, y1 = kh == 2 ? H - 1 : H;
    for (int y = y0; y < y1; ++y) {
      const double* const srow =
          src + static_cast<std::size_t>(y - 1 + kh) * W;
      const double* const grow = gout + static_cast<std::size_t>(y) * W;
      a1 += srow[0] * grow[0];
      a2 += srow[1] * grow[0];
      for (int x = 1; x < W - 1; ++x) {
        const double gv = grow[x];
        a0 += srow[x - 1] * gv;
        a1 += srow[x] * gv;
        a2 += srow[x + 1] * gv;
      }
      const double gl = grow[W - 1];
      a0 += srow[W - 2] * gl;
      a1 += srow[W - 1] * gl;
    }
    gw[kh * 3] += a0;
    gw[kh * 3 + 1] += a1;
    gw[kh * 3 + 2] += a2;
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
              int stride, int padding, int groups) {
  Graph& g = input.graph();
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();
  const Shape& bs = bias.shape();
  require(is.size() == 4, ErrorKind::shape_mismatch,
          "conv2d: input must be [B,C,H,W], got ", shape_str(is));
  require(ws.size() == 4, ErrorKind::shape_mismatch,
          "conv2d: weight must be [Cout,Cin/groups,k,k], got ", shape_str(ws));
  require(ws[2] == ws[3], ErrorKind::shape_mismatch,
          "conv2d: kernel must be square, got ", shape_str(ws));
  require(stride >= 1 && padding >= 0 && groups >= 1,
          ErrorKind::invalid_argument, "conv2d: bad stride/padding/groups");
  const int B = is[0], Cin = is[1], H = is[2], W = is[3];
  const int Cout = ws[0], Cin_g = ws[1], k = ws[2];
  require(Cin % groups == 0 && Cout % groups == 0, ErrorKind::shape_mismatch,
          "conv2d: channels ", Cin, "->", Cout, " not divisible by groups=",
          groups);
  require(Cin_g == Cin / groups, ErrorKind::shape_mismatch,
          "conv2d: weight expects ", Cin_g * groups, " input channels, input has ",
          Cin);
  require(bs.size() == 1 && bs[0] == Cout, ErrorKind::shape_mismatch,
          "conv2d: bias must be [", Cout, "], got ", shape_str(bs));
  const int OH = (H + 2 * padding - k) / stride + 1;
  const int OW = (W + 2 * padding - k) / stride + 1;
  require(H + 2 * padding >= k && W + 2 * padding >= k, ErrorKind::shape_mismatch,
          "conv2d: kernel ", k, "x", k, " exceeds padded input ", H + 2 * padding,
          "x", W + 2 * padding);

  const int oc_per_group = Cout / groups;
  const bool fast3 = k == 3 && stride == 1 && padding == 1 && W >= 2;
  const double* in = g.value_of(input.id()).data();
  const double* w = g.value_of(weight.id()).data();
  const double* b = g.value_of(bias.id()).data();
  std::vector<double> out(static_cast<std::size_t>(B) * Cout * OH * OW);

  for (int n = 0; n < B; ++n) {
    for (int oc = 0; oc < Cout; ++oc) {
      const int grp = oc / oc_per_group;
      double* const oplane = out.data() + (static_cast<std::size_t>(n) * Cout + oc) * OH * OW;
      std::fill(oplane, oplane + OH * OW, b[oc]);
      for (int icg = 0; icg < Cin_g; ++icg) {
        const int ic = grp * Cin_g + icg;
        const double* const iplane = in + (static_cast<std::size_t>(n) * Cin + ic) * H * W;
        const double* const wbase = w + (static_cast<std::size_t>(oc) * Cin_g + icg) * k * k;
        if (fast3) {
          corr3_accum(oplane, iplane, wbase, H, W);
          continue;
        }
        for (int kh = 0; kh < k; ++kh) {
          const int oh0 = out_lo(padding, kh, stride);
          const int oh1 = out_hi(H, padding, kh, stride, OH);
          for (int oh = oh0; oh < oh1; ++oh) {
            const int ih = oh * stride - padding + kh;
            const double* const irow = iplane + ih * W;
            double* const orow = oplane + oh * OW;
            for (int kw = 0; kw < k; ++kw) {
              const double wv = wbase[kh * k + kw];
              const int ow0 = out_lo(padding, kw, stride);
              const int ow1 = out_hi(W, padding, kw, stride, OW);
              const int shift = kw - padding;
              if (stride == 1) {
                const double* const ir = irow + shift;
                for (int ow = ow0; ow < ow1; ++ow) orow[ow] += wv * ir[ow];
              } else {
                for (int ow = ow0; ow < ow1; ++ow)
                  orow[ow] += wv * irow[ow * stride + shift];
              }
            }
          }
        }
      }
    }
  }

  const int in_id = input.id(), w_id = weight.id(), b_id = bias.id();
  auto back = [=](Graph& gr, int self) {
    const double* gout = gr.grad_view(self).data();
    const double* inv = gr.value_of(in_id).data();
    const double* wv = gr.value_of(w_id).data();

    if (gr.wants_grad(b_id)) {
      double* gb = gr.grad_of(b_id).data();
      for (int n = 0; n < B; ++n)
        for (int oc = 0; oc < Cout; ++oc) {
          const double* gp = gout + (static_cast<std::size_t>(n) * Cout + oc) * OH * OW;
          double acc = 0.0;
          for (int i = 0; i < OH * OW; ++i) acc += gp[i];
          gb[oc] += acc;
        }
    }

    if (gr.wants_grad(in_id)) {
      double* gin = gr.grad_of(in_id).data();
      for (int n = 0; n < B; ++n) {
        for (int oc = 0; oc < Cout; ++oc) {
          const int grp = oc / oc_per_group;
          const double* const gplane = gout + (static_cast<std::size_t>(n) * Cout + oc) * OH * OW;
          for (int icg = 0; icg < Cin_g; ++icg) {
            const int ic = grp * Cin_g + icg;
            double* const giplane = gin + (static_cast<std::size_t>(n) * Cin + ic) * H * W;
            const double* const wbase = wv + (static_cast<std::size_t>(oc) * Cin_g + icg) * k * k;
            if (fast3) {
              double rot[9];
              for (int i = 0; i < 9; ++i) rot[i] = wbase[8 - i];
              corr3_accum(giplane, gplane, rot, H, W);
              continue;
            }
            for (int kh = 0; kh < k; ++kh) {
              const int oh0 = out_lo(padding, kh, stride);
              const int oh1 = out_hi(H, padding, kh, stride, OH);
              for (int oh = oh0; oh < oh1; ++oh) {
                const int ih = oh * stride - padding + kh;
                double* const girow = giplane + ih * W;
                const double* const grow = gplane + oh * OW;
                for (int kw = 0; kw < k; ++kw) {
                  const double wval = wbase[kh * k + kw];
                  const int ow0 = out_lo(padding, kw, stride);
                  const int ow1 = out_hi(W, padding, kw, stride, OW);
                  const int shift = kw - padding;
                  if (stride == 1) {
                    double* const gi = girow + shift;
                    for (int ow = ow0; ow < ow1; ++ow) gi[ow] += wval * grow[ow];
                  } else {
                    for (int ow = ow0; ow < ow1; ++ow)
                      girow[ow * stride + shift] += wval * grow[ow];
                  }
                }
              }
            }
          }
        }
      }
    }

    if (gr.wants_grad(w_id)) {
      double* gw = gr.grad_of(w_id).data();
      for (int n = 0; n < B; ++n) {
        for (int oc = 0; oc < Cout; ++oc) {
          const int grp = oc / oc_per_group;
          const double* const gplane = gout + (static_cast<std::size_t>(n) * Cout + oc) * OH * OW;
          for (int icg = 0; icg < Cin_g; ++icg) {
            const int ic = grp * Cin_g + icg;
            const double* const iplane = inv + (static_cast<std::size_t>(n) * Cin + ic) * H * W;
            double* const gwbase = gw + (static_cast<std::size_t>(oc) * Cin_g + icg) * k * k;
            if (fast3) {
              wgrad3_accum(gwbase, iplane, gplane, H, W);
              continue;
            }
            for (int kh = 0; kh < k; ++kh) {
              const int oh0 = out_lo(padding, kh, stride);
              const int oh1 = out_hi(H, padding, kh, stride, OH);
              for (int kw = 0; kw < k; ++kw) {
                const int ow0 = out_lo(padding, kw, stride);
                const int ow1 = out_hi(W, padding, kw, stride, OW);
                const int shift = kw - padding;
                double acc = 0.0;
                for (int oh = oh0; oh < oh1; ++oh) {
                  const int ih = oh * stride - padding + kh;
                  const double* const irow = iplane + ih * W;
                  const double* const grow = gplane + oh * OW;
                  if (stride == 1) {
                    acc += dot_stride1(irow + ow0 + shift, grow + ow0,
                                       ow1 - ow0);
                  } else {
                    for (int ow = ow0; ow < ow1; ++ow)
                      acc += irow[ow * stride + shift] * grow[ow];
                  }
                }
                gwbase[kh * k + kw] += acc;
              }
            }
          }
        }
      }
    }
  };

  return g.make_node("conv2d", {in_id, w_id, b_id}, {B, Cout, OH, OW},
                     std::move(out), back);
}

// ---- pooling ------------------------------------------------------------

Tensor maxpool2d(const Tensor& input, int k, int stride) {
  Graph& g = input.graph();
  const Shape& is = input.shape();
  require(is.size() == 4, ErrorKind::shape_mismatch,
          "maxpool2d: input must be [B,C,H,W], got ", shape_str(is));
  require(k >= 1 && stride >= 1, ErrorKind::invalid_argument,
          "maxpool2d: bad window/stride");
  const int B = is[0], C = is[1], H = is[2], W = is[3];
  require(H >= k && W >= k, ErrorKind::shape_mismatch, "maxpool2d: window ", k,
          "x", k, " exceeds input ", H, "x", W);
  const int OH = (H - k) / stride + 1;
  const int OW = (W - k) / stride + 1;

  const double* in = g.value_of(input.id()).data();
  std::vector<double> out(static_cast<std::size_t>(B) * C * OH * OW);
  std::shared_ptr<std::vector<int>> argmax;

  if (const auto* routed = g.next_pool_routing()) {
    require(routed->size() == out.size(), ErrorKind::shape_mismatch,
            "routing replay: maxpool2d size changed between passes");
    argmax = std::make_shared<std::vector<int>>(*routed);
    std::size_t o = 0;
    for (int n = 0; n < B; ++n)
      for (int c = 0; c < C; ++c) {
        const double* const plane = in + (static_cast<std::size_t>(n) * C + c) * H * W;
        for (int i = 0; i < OH * OW; ++i, ++o) out[o] = plane[(*argmax)[o]];
      }
  } else {
    argmax = std::make_shared<std::vector<int>>(out.size());
    std::size_t o = 0;
    for (int n = 0; n < B; ++n)
      for (int c = 0; c < C; ++c) {
        const double* const plane = in + (static_cast<std::size_t>(n) * C + c) * H * W;
        for (int oh = 0; oh < OH; ++oh)
          for (int ow = 0; ow < OW; ++ow, ++o) {
            const int ih0 = oh * stride, iw0 = ow * stride;
            double best = plane[ih0 * W + iw0];
            int best_at = ih0 * W + iw0;
            for (int kh = 0; kh < k; ++kh)
              for (int kw = 0; kw < k; ++kw) {
                const int at = (ih0 + kh) * W + iw0 + kw;
                if (plane[at] > best) {
                  best = plane[at];
                  best_at = at;
                }
              }
            out[o] = best;
            (*argmax)[o] = best_at;
          }
      }
    if (Graph::Routing* rec = g.recording()) rec->pool_at.push_back(*argmax);
  }

  const int in_id = input.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(in_id)) return;
    const double* gout = gr.grad_view(self).data();
    double* gin = gr.grad_of(in_id).data();
    std::size_t o2 = 0;
    for (int n = 0; n < B; ++n)
      for (int c = 0; c < C; ++c) {
        double* const plane = gin + (static_cast<std::size_t>(n) * C + c) * H * W;
        for (int i = 0; i < OH * OW; ++i, ++o2) plane[(*argmax)[o2]] += gout[o2];
      }
  };

  return g.make_node("maxpool2d", {in_id}, {B, C, OH, OW}, std::move(out), back);
}

// ---- fully connected ----------------------------------------------------

Tensor fully_connected(const Tensor& input, const Tensor& weight,
                       const Tensor& bias) {
  Graph& g = input.graph();
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();
  const Shape& bs = bias.shape();
  require(is.size() == 2, ErrorKind::shape_mismatch,
          "fully_connected: input must be [B,N], got ", shape_str(is));
  require(ws.size() == 2, ErrorKind::shape_mismatch,
          "fully_connected: weight must be [M,N], got ", shape_str(ws));
  require(ws[1] == is[1], ErrorKind::shape_mismatch,
          "fully_connected: weight expects ", ws[1], " features, input has ",
          is[1]);
  require(bs.size() == 1 && bs[0] == ws[0], ErrorKind::shape_mismatch,
          "fully_connected: bias must be [", ws[0], "], got ", shape_str(bs));
  const int B = is[0], N = is[1], M = ws[0];

  const double* in = g.value_of(input.id()).data();
  const double* w = g.value_of(weight.id()).data();
  const double* b = g.value_of(bias.id()).data();
  std::vector<double> out(static_cast<std::size_t>(B) * M);
  for (int n = 0; n < B; ++n)
    for (int m = 0; m < M; ++m) {
      const double* const irow = in + static_cast<std::size_t>(n) * N;
      const double* const wrow = w + static_cast<std::size_t>(m) * N;
      double acc = b[m];
      for (int i = 0; i < N; ++i) acc += irow[i] * wrow[i];
      out[static_cast<std::size_t>(n) * M + m] = acc;
    }

  const int in_id = input.id(), w_id = weight.id(), b_id = bias.id();
  auto back = [=](Graph& gr, int self) {
    const double* gout = gr.grad_view(self).data();
    if (gr.wants_grad(b_id)) {
      double* gb = gr.grad_of(b_id).data();
      for (int n = 0; n < B; ++n)
        for (int m = 0; m < M; ++m) gb[m] += gout[static_cast<std::size_t>(n) * M + m];
    }
    if (gr.wants_grad(in_id)) {
      const double* w2 = gr.value_of(w_id).data();
      double* gin = gr.grad_of(in_id).data();
      for (int n = 0; n < B; ++n)
        for (int m = 0; m < M; ++m) {
          const double gv = gout[static_cast<std::size_t>(n) * M + m];
          const double* const wrow = w2 + static_cast<std::size_t>(m) * N;
          double* const grow = gin + static_cast<std::size_t>(n) * N;
          for (int i = 0; i < N; ++i) grow[i] += gv * wrow[i];
        }
    }
    if (gr.wants_grad(w_id)) {
      const double* in2 = gr.value_of(in_id).data();
      double* gw = gr.grad_of(w_id).data();
      for (int n = 0; n < B; ++n)
        for (int m = 0; m < M; ++m) {
          const double gv = gout[static_cast<std::size_t>(n) * M + m];
          const double* const irow = in2 + static_cast<std::size_t>(n) * N;
          double* const grow = gw + static_cast<std::size_t>(m) * N;
          for (int i = 0; i < N; ++i) grow[i] += gv * irow[i];
        }
    }
  };

  return g.make_node("fully_connected", {in_id, w_id, b_id}, {B, M},
                     std::move(out), back);
}

// ---- elementwise --------------------------------------------------------

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  require(&a.graph() == &b.graph(), ErrorKind::invalid_argument, who,
          ": operands from different graphs");
  require(a.shape() == b.shape(), ErrorKind::shape_mismatch, who,
          ": shapes differ, ", shape_str(a.shape()), " vs ",
          shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  auto bv = g.value_of(b.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const int ai = a.id(), bi = b.id();
  auto back = [=](Graph& gr, int self) {
    const auto gout = gr.grad_view(self);
    if (gr.wants_grad(ai)) {
      auto ga = gr.grad_of(ai);
      for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
    }
    if (gr.wants_grad(bi)) {
      auto gb = gr.grad_of(bi);
      for (std::size_t i = 0; i < gout.size(); ++i) gb[i] += gout[i];
    }
  };
  return g.make_node("add", {ai, bi}, a.shape(), std::move(out), back);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  auto bv = g.value_of(b.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const int ai = a.id(), bi = b.id();
  auto back = [=](Graph& gr, int self) {
    const auto gout = gr.grad_view(self);
    if (gr.wants_grad(ai)) {
      auto ga = gr.grad_of(ai);
      for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
    }
    if (gr.wants_grad(bi)) {
      auto gb = gr.grad_of(bi);
      for (std::size_t i = 0; i < gout.size(); ++i) gb[i] -= gout[i];
    }
  };
  return g.make_node("sub", {ai, bi}, a.shape(), std::move(out), back);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  auto bv = g.value_of(b.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const int ai = a.id(), bi = b.id();
  auto back = [=](Graph& gr, int self) {
    const auto gout = gr.grad_view(self);
    if (gr.wants_grad(ai)) {
      auto ga = gr.grad_of(ai);
      const auto b2 = gr.value_of(bi);
      for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i] * b2[i];
    }
    if (gr.wants_grad(bi)) {
      auto gb = gr.grad_of(bi);
      const auto a2 = gr.value_of(ai);
      for (std::size_t i = 0; i < gout.size(); ++i) gb[i] += gout[i] * a2[i];
    }
  };
  return g.make_node("mul", {ai, bi}, a.shape(), std::move(out), back);
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "div");
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  auto bv = g.value_of(b.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
  const int ai = a.id(), bi = b.id();
  auto back = [=](Graph& gr, int self) {
    const auto gout = gr.grad_view(self);
    const auto a2 = gr.value_of(ai);
    const auto b2 = gr.value_of(bi);
    if (gr.wants_grad(ai)) {
      auto ga = gr.grad_of(ai);
      for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i] / b2[i];
    }
    if (gr.wants_grad(bi)) {
      auto gb = gr.grad_of(bi);
      for (std::size_t i = 0; i < gout.size(); ++i)
        gb[i] -= gout[i] * a2[i] / (b2[i] * b2[i]);
    }
  };
  return g.make_node("div", {ai, bi}, a.shape(), std::move(out), back);
}

Tensor add_scalar(const Tensor& a, double c) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + c;
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
  };
  return g.make_node("add_scalar", {ai}, a.shape(), std::move(out), back);
}

Tensor scalar_mul(const Tensor& a, double c) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * c;
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i] * c;
  };
  return g.make_node("scalar_mul", {ai}, a.shape(), std::move(out), back);
}

Tensor leaky_relu(const Tensor& a, double slope) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  const int ai = a.id();

  if (const auto* routed = g.next_relu_routing()) {
    require(routed->size() == av.size(), ErrorKind::shape_mismatch,
            "routing replay: leaky_relu size changed between passes");
    auto neg = std::make_shared<std::vector<unsigned char>>(*routed);
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (*neg)[i] ? slope * av[i] : av[i];
    auto back = [=](Graph& gr, int self) {
      if (!gr.wants_grad(ai)) return;
      const auto gout = gr.grad_view(self);
      auto ga = gr.grad_of(ai);
      for (std::size_t i = 0; i < gout.size(); ++i)
        ga[i] += (*neg)[i] ? slope * gout[i] : gout[i];
    };
    return g.make_node("leaky_relu", {ai}, a.shape(), std::move(out), back);
  }

  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = av[i] > 0.0 ? av[i] : slope * av[i];
  if (Graph::Routing* rec = g.recording()) {
    std::vector<unsigned char> neg(av.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = !(av[i] > 0.0);
    rec->relu_neg.push_back(std::move(neg));
  }
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    const auto a2 = gr.value_of(ai);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i)
      ga[i] += a2[i] > 0.0 ? gout[i] : slope * gout[i];
  };
  return g.make_node("leaky_relu", {ai}, a.shape(), std::move(out), back);
}

Tensor sigmoid(const Tensor& a) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 1.0 / (1.0 + std::exp(-av[i]));
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    const auto y = gr.value_of(self);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i)
      ga[i] += gout[i] * y[i] * (1.0 - y[i]);
  };
  return g.make_node("sigmoid", {ai}, a.shape(), std::move(out), back);
}

Tensor tanh(const Tensor& a) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    const auto y = gr.value_of(self);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i)
      ga[i] += gout[i] * (1.0 - y[i] * y[i]);
  };
  return g.make_node("tanh", {ai}, a.shape(), std::move(out), back);
}

// ---- structural ---------------------------------------------------------

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  Graph& g = a.graph();
  require(&g == &b.graph(), ErrorKind::invalid_argument,
          "concat: operands from different graphs");
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  require(as.size() == bs.size(), ErrorKind::shape_mismatch,
          "concat: rank mismatch, ", shape_str(as), " vs ", shape_str(bs));
  require(axis >= 0 && axis < static_cast<int>(as.size()),
          ErrorKind::invalid_argument, "concat: axis ", axis,
          " out of range for rank ", as.size());
  for (int d = 0; d < static_cast<int>(as.size()); ++d)
    require(d == axis || as[d] == bs[d], ErrorKind::shape_mismatch,
            "concat: shapes ", shape_str(as), " and ", shape_str(bs),
            " differ outside axis ", axis);

  Shape os = as;
  os[axis] += bs[axis];
  int outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= as[d];
  for (int d = axis + 1; d < static_cast<int>(as.size()); ++d) inner *= as[d];
  const int a_blk = as[axis] * inner;
  const int b_blk = bs[axis] * inner;

  auto av = g.value_of(a.id());
  auto bv = g.value_of(b.id());
  std::vector<double> out(static_cast<std::size_t>(outer) * (a_blk + b_blk));
  for (int o = 0; o < outer; ++o) {
    std::copy_n(av.data() + static_cast<std::size_t>(o) * a_blk, a_blk,
                out.data() + static_cast<std::size_t>(o) * (a_blk + b_blk));
    std::copy_n(bv.data() + static_cast<std::size_t>(o) * b_blk, b_blk,
                out.data() + static_cast<std::size_t>(o) * (a_blk + b_blk) + a_blk);
  }

  const int ai = a.id(), bi = b.id();
  auto back = [=](Graph& gr, int self) {
    const auto gout = gr.grad_view(self);
    if (gr.wants_grad(ai)) {
      auto ga = gr.grad_of(ai);
      for (int o = 0; o < outer; ++o)
        for (int i = 0; i < a_blk; ++i)
          ga[static_cast<std::size_t>(o) * a_blk + i] +=
              gout[static_cast<std::size_t>(o) * (a_blk + b_blk) + i];
    }
    if (gr.wants_grad(bi)) {
      auto gb = gr.grad_of(bi);
      for (int o = 0; o < outer; ++o)
        for (int i = 0; i < b_blk; ++i)
          gb[static_cast<std::size_t>(o) * b_blk + i] +=
              gout[static_cast<std::size_t>(o) * (a_blk + b_blk) + a_blk + i];
    }
  };
  return g.make_node("concat", {ai, bi}, std::move(os), std::move(out), back);
}

Tensor channel_mean(const Tensor& a) {
  Graph& g = a.graph();
  const Shape& as = a.shape();
  require(as.size() == 4, ErrorKind::shape_mismatch,
          "channel_mean: input must be [B,C,H,W], got ", shape_str(as));
  const int B = as[0], C = as[1], HW = as[2] * as[3];
  auto av = g.value_of(a.id());
  std::vector<double> out(static_cast<std::size_t>(B) * HW, 0.0);
  for (int n = 0; n < B; ++n)
    for (int c = 0; c < C; ++c) {
      const double* const plane = av.data() + (static_cast<std::size_t>(n) * C + c) * HW;
      double* const orow = out.data() + static_cast<std::size_t>(n) * HW;
      for (int i = 0; i < HW; ++i) orow[i] += plane[i];
    }
  const double inv = 1.0 / C;
  for (double& v : out) v *= inv;

  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (int n = 0; n < B; ++n)
      for (int c = 0; c < C; ++c) {
        double* const plane = ga.data() + (static_cast<std::size_t>(n) * C + c) * HW;
        const double* const grow = gout.data() + static_cast<std::size_t>(n) * HW;
        for (int i = 0; i < HW; ++i) plane[i] += grow[i] * inv;
      }
  };
  return g.make_node("channel_mean", {ai}, {B, 1, as[2], as[3]}, std::move(out),
                     back);
}

Tensor channel_max(const Tensor& a) {
  Graph& g = a.graph();
  const Shape& as = a.shape();
  require(as.size() == 4, ErrorKind::shape_mismatch,
          "channel_max: input must be [B,C,H,W], got ", shape_str(as));
  const int B = as[0], C = as[1], HW = as[2] * as[3];
  auto av = g.value_of(a.id());
  std::vector<double> out(static_cast<std::size_t>(B) * HW);
  auto argmax = std::make_shared<std::vector<int>>(out.size());
  for (int n = 0; n < B; ++n)
    for (int i = 0; i < HW; ++i) {
      const double* const base = av.data() + static_cast<std::size_t>(n) * C * HW;
      double best = base[i];
      int best_c = 0;
      for (int c = 1; c < C; ++c)
        if (base[c * HW + i] > best) {
          best = base[c * HW + i];
          best_c = c;
        }
      out[static_cast<std::size_t>(n) * HW + i] = best;
      (*argmax)[static_cast<std::size_t>(n) * HW + i] = best_c;
    }

  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (int n = 0; n < B; ++n)
      for (int i = 0; i < HW; ++i) {
        const std::size_t o = static_cast<std::size_t>(n) * HW + i;
        ga[static_cast<std::size_t>(n) * C * HW +
           static_cast<std::size_t>((*argmax)[o]) * HW + i] += gout[o];
      }
  };
  return g.make_node("channel_max", {ai}, {B, 1, as[2], as[3]}, std::move(out),
                     back);
}

Tensor global_avg_pool(const Tensor& a) {
  Graph& g = a.graph();
  const Shape& as = a.shape();
  require(as.size() == 4, ErrorKind::shape_mismatch,
          "global_avg_pool: input must be [B,C,H,W], got ", shape_str(as));
  const int B = as[0], C = as[1], HW = as[2] * as[3];
  auto av = g.value_of(a.id());
  std::vector<double> out(static_cast<std::size_t>(B) * C);
  const double inv = 1.0 / HW;
  for (int nc = 0; nc < B * C; ++nc) {
    const double* const plane = av.data() + static_cast<std::size_t>(nc) * HW;
    double acc = 0.0;
    for (int i = 0; i < HW; ++i) acc += plane[i];
    out[static_cast<std::size_t>(nc)] = acc * inv;
  }

  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (int nc = 0; nc < B * C; ++nc) {
      double* const plane = ga.data() + static_cast<std::size_t>(nc) * HW;
      const double gv = gout[static_cast<std::size_t>(nc)] * inv;
      for (int i = 0; i < HW; ++i) plane[i] += gv;
    }
  };
  return g.make_node("global_avg_pool", {ai}, {B, C, 1, 1}, std::move(out),
                     back);
}

Tensor upsample_copy(const Tensor& a, int fh, int fw) {
  Graph& g = a.graph();
  const Shape& as = a.shape();
  require(as.size() == 4, ErrorKind::shape_mismatch,
          "upsample_copy: input must be [B,C,H,W], got ", shape_str(as));
  require(fh >= 1 && fw >= 1, ErrorKind::invalid_argument,
          "upsample_copy: bad factors ", fh, "x", fw);
  const int B = as[0], C = as[1], H = as[2], W = as[3];
  const int OH = H * fh, OW = W * fw;
  auto av = g.value_of(a.id());
  std::vector<double> out(static_cast<std::size_t>(B) * C * OH * OW);
  for (int nc = 0; nc < B * C; ++nc) {
    const double* const plane = av.data() + static_cast<std::size_t>(nc) * H * W;
    double* const oplane = out.data() + static_cast<std::size_t>(nc) * OH * OW;
    for (int oh = 0; oh < OH; ++oh) {
      const double* const irow = plane + (oh / fh) * W;
      double* const orow = oplane + oh * OW;
      for (int ow = 0; ow < OW; ++ow) orow[ow] = irow[ow / fw];
    }
  }

  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (int nc = 0; nc < B * C; ++nc) {
      double* const plane = ga.data() + static_cast<std::size_t>(nc) * H * W;
      const double* const gplane = gout.data() + static_cast<std::size_t>(nc) * OH * OW;
      for (int oh = 0; oh < OH; ++oh) {
        double* const irow = plane + (oh / fh) * W;
        const double* const grow = gplane + oh * OW;
        for (int ow = 0; ow < OW; ++ow) irow[ow / fw] += grow[ow];
      }
    }
  };
  return g.make_node("upsample_copy", {ai}, {B, C, OH, OW}, std::move(out),
                     back);
}

Tensor expand_channels(const Tensor& a, int channels) {
  Graph& g = a.graph();
  const Shape& as = a.shape();
  require(as.size() == 4 && as[1] == 1, ErrorKind::shape_mismatch,
          "expand_channels: input must be [B,1,H,W], got ", shape_str(as));
  require(channels >= 1, ErrorKind::invalid_argument,
          "expand_channels: bad channel count ", channels);
  const int B = as[0], HW = as[2] * as[3];
  auto av = g.value_of(a.id());
  std::vector<double> out(static_cast<std::size_t>(B) * channels * HW);
  for (int n = 0; n < B; ++n)
    for (int c = 0; c < channels; ++c)
      std::copy_n(av.data() + static_cast<std::size_t>(n) * HW, HW,
                  out.data() + (static_cast<std::size_t>(n) * channels + c) * HW);

  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (int n = 0; n < B; ++n)
      for (int c = 0; c < channels; ++c) {
        const double* const gplane =
            gout.data() + (static_cast<std::size_t>(n) * channels + c) * HW;
        double* const arow = ga.data() + static_cast<std::size_t>(n) * HW;
        for (int i = 0; i < HW; ++i) arow[i] += gplane[i];
      }
  };
  return g.make_node("expand_channels", {ai}, {B, channels, as[2], as[3]},
                     std::move(out), back);
}

Tensor reshape(const Tensor& a, Shape shape) {
  Graph& g = a.graph();
  check_shape(shape, "reshape");
  require(awf::numel(shape) == a.numel(), ErrorKind::shape_mismatch,
          "reshape: cannot view ", shape_str(a.shape()), " as ",
          shape_str(shape));
  auto av = g.value_of(a.id());
  std::vector<double> out(av.begin(), av.end());
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const auto gout = gr.grad_view(self);
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < gout.size(); ++i) ga[i] += gout[i];
  };
  return g.make_node("reshape", {ai}, std::move(shape), std::move(out), back);
}

Tensor flatten(const Tensor& a) {
  const Shape& as = a.shape();
  require(as.size() >= 2, ErrorKind::shape_mismatch,
          "flatten: input must have a batch dimension, got ", shape_str(as));
  return reshape(a, {as[0], a.numel() / as[0]});
}

Tensor sum(const Tensor& a) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  double acc = 0.0;
  for (double v : av) acc += v;
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const double gv = gr.grad_view(self)[0];
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
  };
  return g.make_node("sum", {ai}, {1}, {acc}, back);
}

Tensor mean(const Tensor& a) {
  Graph& g = a.graph();
  auto av = g.value_of(a.id());
  double acc = 0.0;
  for (double v : av) acc += v;
  const double inv = 1.0 / static_cast<double>(av.size());
  const int ai = a.id();
  auto back = [=](Graph& gr, int self) {
    if (!gr.wants_grad(ai)) return;
    const double gv = gr.grad_view(self)[0] * inv;
    auto ga = gr.grad_of(ai);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
  };
  // divide, so a sum of exactly n equal terms averages back to that value
  return g.make_node("mean", {ai}, {1}, {acc / static_cast<double>(av.size())},
                     back);
}

}  // namespace awf
