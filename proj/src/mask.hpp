#pragma once

#include "image.hpp"

namespace awf {

// Binary map of the brightest regions of an infrared image. Pixels at or
// above half the image maximum are candidates; candidates are grouped into
// 8-connected components and the largest keep_regions components survive
// (ties go to the component appearing first in scan order). A non-positive
// image maximum yields an all-zero mask.
Image extract_target_mask(const Image& ir, int keep_regions = 3);

// Same computation with the intermediate stages kept for inspection:
// the candidate map (1 at or above half maximum), the component labels
// rendered as distinct grays in scan order, and the final mask.
struct MaskStages {
  Image threshold_map;
  Image components;
  Image mask;
};

MaskStages extract_target_mask_stages(const Image& ir, int keep_regions = 3);

}  // namespace awf
