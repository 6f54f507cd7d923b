#include "layers.hpp"

#include <cmath>

namespace awf {

namespace {

Param& fetch(ParamSet& ps, Rng& rng, const std::string& name, Shape shape,
             double stddev) {
  if (Param* p = ps.find(name)) {
    require(p->shape == shape, ErrorKind::shape_mismatch, name,
            ": stored shape ", shape_str(p->shape), " does not match expected ",
            shape_str(shape));
    return *p;
  }
  Param& p = ps.add(name, std::move(shape));
  if (stddev > 0.0)
    for (double& v : p.value) v = stddev * rng.normal();
  return p;
}

}  // namespace

LayerP conv_params(ParamSet& ps, Rng& rng, const std::string& name, int cout,
                   int cin_g, int k) {
  const double stddev = std::sqrt(2.0 / (cin_g * k * k));
  LayerP l;
  l.w = &fetch(ps, rng, name + ".w", {cout, cin_g, k, k}, stddev);
  l.b = &fetch(ps, rng, name + ".b", {cout}, 0.0);
  return l;
}

LayerP fc_params(ParamSet& ps, Rng& rng, const std::string& name, int out_n,
                 int in_n) {
  const double stddev = std::sqrt(2.0 / in_n);
  LayerP l;
  l.w = &fetch(ps, rng, name + ".w", {out_n, in_n}, stddev);
  l.b = &fetch(ps, rng, name + ".b", {out_n}, 0.0);
  return l;
}

}  // namespace awf
