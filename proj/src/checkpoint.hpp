#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace awf {

struct ParamRecord {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

// Everything needed to resume or run a model: all parameter tensors of the
// generator and both critics, the step counter, and the engine state.
struct Checkpoint {
  std::int32_t version = 1;
  std::int32_t image_size = 0;
  std::int64_t step = 0;
  std::string rng_state;
  std::vector<ParamRecord> records;
};

// Snapshots every parameter of the set into records, in set order.
void append_params(Checkpoint& ck, const ParamSet& ps);

// Copies record data back into the set. Every parameter of the set must have
// a record with a matching shape; records the set does not mention are left
// alone, so one checkpoint can feed several networks.
void restore_params(const Checkpoint& ck, ParamSet& ps);

// Binary file, native byte order, bit-exact double round trip.
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace awf
