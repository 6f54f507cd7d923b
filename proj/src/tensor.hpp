#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace awf {

using Shape = std::vector<int>;

int numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Persistent learnable array. Parameters live outside any graph; a forward
// pass views the values through Graph::leaf() and backward() accumulates
// directly into grad. grad stays empty until the first backward touches it.
struct Param {
  std::string name;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;

  int numel() const { return awf::numel(shape); }
  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

// Named parameter collection. Registration order is the serialization and
// update order, which keeps checkpoints and training deterministic.
class ParamSet {
public:
  Param& add(const std::string& name, Shape shape);
  Param* find(std::string_view name);
  const std::vector<std::unique_ptr<Param>>& params() const { return params_; }
  void zero_grads();

private:
  std::vector<std::unique_ptr<Param>> params_;
};

// p <- p - lr * grad for every parameter, then grads are cleared to zero.
// A parameter whose grad was never populated is an error.
void sgd_step(ParamSet& params, double lr);

class Graph;

// Handle to one node of a Graph. Cheap to copy; valid while the graph lives.
class Tensor {
public:
  Tensor() = default;
  const Shape& shape() const;
  int numel() const;
  std::span<const double> value() const;
  std::span<const double> grad() const;  // empty before backward()
  double scalar() const;                 // value of a single-element tensor
  Graph& graph() const { return *g_; }
  int id() const { return id_; }
  bool valid() const { return g_ != nullptr; }

private:
  friend class Graph;
  Tensor(Graph* g, int id) : g_(g), id_(id) {}
  Graph* g_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in forward order and backward() walks
// the tape once in strict reverse order; append order is the topological
// order. A graph serves exactly one backward() call.
class Graph {
public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor input(Shape shape, std::vector<double> data);     // differentiable leaf
  Tensor constant(Shape shape, std::vector<double> data);  // gradient-free leaf
  Tensor leaf(Param& p);                                   // parameter leaf

  // While frozen, leaf() yields constant views of the parameters, so a
  // backward pass leaves every Param::grad untouched.
  void set_params_frozen(bool on) { params_frozen_ = on; }

  // Piecewise ops (leaky_relu, maxpool2d) normally branch on their input
  // values. A recording pass stores every branch decision in call order; a
  // replaying pass reuses them instead of re-deciding, so a network can be
  // re-evaluated as its local linearization. The gradient penalty probes
  // rely on this: without it a probe pair straddling a branch boundary
  // injects the branch jump scaled by the inverse step into the parameter
  // gradient.
  struct Routing {
    std::vector<std::vector<unsigned char>> relu_neg;  // negative side flags
    std::vector<std::vector<int>> pool_at;  // picked index per window
  };
  void record_routing(Routing* r) {
    record_ = r;
    replay_ = nullptr;
  }
  // Passing the same routing again rewinds to its start; null ends replay.
  void replay_routing(const Routing* r) {
    replay_ = r;
    record_ = nullptr;
    replay_relu_ = 0;
    replay_pool_ = 0;
  }
  Routing* recording() { return record_; }
  const std::vector<unsigned char>* next_relu_routing();
  const std::vector<int>* next_pool_routing();

  // loss must hold exactly one element; populates grads of every leaf that
  // can reach it. Consumes the graph: a second call is an error.
  void backward(const Tensor& loss);
  bool consumed() const { return consumed_; }

  // Appends an op node. backward_fn runs during the reverse sweep with the
  // node's own grad already accumulated; it is responsible for pushing
  // gradient into the inputs (guarded by wants_grad). Null backward_fn makes
  // the node a gradient sink.
  Tensor make_node(const char* op, std::vector<int> inputs, Shape shape,
                   std::vector<double> value,
                   std::function<void(Graph&, int)> backward_fn);

  std::span<const double> value_of(int id) const;
  std::span<double> grad_of(int id);  // allocates zeros on first use
  std::span<const double> grad_view(int id) const;
  bool wants_grad(int id) const;
  bool grad_allocated(int id) const;
  const Shape& shape_of(int id) const;
  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    const char* op;
    Shape shape;
    std::vector<int> inputs;
    std::vector<double> value;  // unused for parameter leaves
    std::vector<double> grad;   // unused for parameter leaves
    Param* param = nullptr;
    bool wants_grad = true;
    std::function<void(Graph&, int)> backward_fn;
  };

  Node& node(int id);
  const Node& node(int id) const;

  // deque keeps references to live nodes stable while the tape grows
  std::deque<Node> nodes_;
  bool consumed_ = false;
  bool params_frozen_ = false;
  Routing* record_ = nullptr;
  const Routing* replay_ = nullptr;
  std::size_t replay_relu_ = 0;
  std::size_t replay_pool_ = 0;
};

// ---- network operations -------------------------------------------------

// input [B,Cin,H,W], weight [Cout,Cin/groups,k,k], bias [Cout]
// -> [B,Cout,H',W'] with H' = (H + 2*padding - k)/stride + 1
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
              int stride, int padding, int groups = 1);

// window max; gradient routes to the first maximum in row-major window order
Tensor maxpool2d(const Tensor& input, int k, int stride);

// input [B,N], weight [M,N], bias [M] -> [B,M]
Tensor fully_connected(const Tensor& input, const Tensor& weight,
                       const Tensor& bias);

// ---- elementwise and structural operations ------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor scalar_mul(const Tensor& a, double c);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor channel_mean(const Tensor& a);  // [B,C,H,W] -> [B,1,H,W]
Tensor channel_max(const Tensor& a);   // grad to first argmax channel
Tensor global_avg_pool(const Tensor& a);  // [B,C,H,W] -> [B,C,1,1]
Tensor upsample_copy(const Tensor& a, int fh, int fw);  // nearest, integer factors
Tensor expand_channels(const Tensor& a, int channels);  // [B,1,H,W] -> [B,C,H,W]
Tensor reshape(const Tensor& a, Shape shape);
Tensor flatten(const Tensor& a);  // [B,...] -> [B,N]
Tensor sum(const Tensor& a);      // -> [1]
Tensor mean(const Tensor& a);     // -> [1]

}  // namespace awf
