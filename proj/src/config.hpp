#pragma once

#include <cstdint>
#include <string>

#include "losses.hpp"

namespace awf {

// Run settings for the training loop. Field defaults apply when the config
// text leaves a key out.
struct TrainConfig {
  int epochs = 1;
  int n_critic = 2;    // critic rounds per generator step
  int batch_size = 2;
  double lr_g = 1e-3;
  double lr_d = 1e-3;
  LossWeights weights;
  int image_size = 64;  // training resize target, even and >= 32
  std::uint64_t rng_seed = 1;
  int checkpoint_every = 0;  // generator steps between saves, 0 = final only
  bool ssim_global = false;  // single-window SSIM instead of sliding windows
  bool scd_differences = false;  // correlate sources against F-B / F-A
};

// Accepts "key = value" lines; '#' starts a comment, blank lines are
// skipped. Keys: epochs, n_critic, batch_size, lr_g, lr_d, lambda, gamma,
// alpha, beta, image_size, rng_seed, checkpoint_every, ssim_global,
// scd_differences. Unknown keys and unparsable values are errors.
TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::string& path);

void validate_config(const TrainConfig& cfg);

}  // namespace awf
