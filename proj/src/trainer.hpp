#pragma once

#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "image.hpp"

namespace awf {

// One training example, already resized to the configured square size.
struct TrainPair {
  Image ir, vi;
};

// Alternating optimization: per batch, n_critic rounds of spatial and
// frequency critic updates on the frozen generator output, then one
// generator step. Appends one CSV row per generator step to
// <out_dir>/loss_log.csv, saves periodic checkpoints when configured, and
// writes the returned final state to <out_dir>/checkpoint_final.awf.
// Aborts with a diagnostic naming the offending term if any loss turns
// non-finite. A resume checkpoint, when given, restores the parameters, the
// engine state, and the step counter before the loop; the configured epochs
// then run on top of it.
Checkpoint train(const std::vector<TrainPair>& data, const TrainConfig& cfg,
                 const std::string& out_dir,
                 const Checkpoint* resume = nullptr);

// Loads and resizes the paired files, then trains on them.
Checkpoint train_files(const std::vector<PairPaths>& pairs,
                       const TrainConfig& cfg, const std::string& out_dir);

struct FuseOutput {
  Image fused;
  Image att_ir;  // infrared branch attention
  Image att_vi;  // visible branch attention
};

// Runs the generator from a checkpoint on one pair. The images must share
// their size; odd dimensions are edge-replicated to even for the forward
// pass and the result is cropped back.
FuseOutput fuse_images_full(const Image& ir, const Image& vi,
                            const Checkpoint& ck);
Image fuse_images(const Image& ir, const Image& vi, const Checkpoint& ck);

}  // namespace awf
