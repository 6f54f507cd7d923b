#include "mask.hpp"

#include <algorithm>
#include <queue>
#include <vector>

namespace awf {

MaskStages extract_target_mask_stages(const Image& ir, int keep_regions) {
  require(ir.h >= 1 && ir.w >= 1 &&
              ir.pix.size() == static_cast<std::size_t>(ir.h) * ir.w,
          ErrorKind::invalid_argument, "extract_target_mask: empty image");
  require(keep_regions >= 1, ErrorKind::invalid_argument,
          "extract_target_mask: keep_regions must be positive, got ",
          keep_regions);
  const int H = ir.h, W = ir.w;
  MaskStages out{Image(H, W, 0.0), Image(H, W, 0.0), Image(H, W, 0.0)};

  double peak = ir.pix[0];
  for (double v : ir.pix) peak = std::max(peak, v);
  if (peak <= 0.0) return out;
  const double threshold = 0.5 * peak;

  // label 8-connected components of the candidate set in scan order
  std::vector<int> label(ir.pix.size(), -1);
  struct Region {
    int id, area, first;
  };
  std::vector<Region> regions;
  std::queue<int> frontier;
  for (int start = 0; start < H * W; ++start) {
    if (label[start] >= 0 || ir.pix[start] < threshold) continue;
    const int id = static_cast<int>(regions.size());
    regions.push_back({id, 0, start});
    label[start] = id;
    frontier.push(start);
    while (!frontier.empty()) {
      const int at = frontier.front();
      frontier.pop();
      ++regions[id].area;
      const int y = at / W, x = at % W;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
          const int n = ny * W + nx;
          if (label[n] >= 0 || ir.pix[n] < threshold) continue;
          label[n] = id;
          frontier.push(n);
        }
    }
  }

  std::sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
    if (a.area != b.area) return a.area > b.area;
    return a.first < b.first;
  });
  const int kept = std::min<int>(keep_regions, static_cast<int>(regions.size()));
  std::vector<char> keep(regions.size() + 1, 0);
  for (int i = 0; i < kept; ++i) keep[static_cast<std::size_t>(regions[i].id)] = 1;

  const double n_regions = static_cast<double>(regions.size());
  for (std::size_t i = 0; i < ir.pix.size(); ++i) {
    if (label[i] < 0) continue;
    out.threshold_map.pix[i] = 1.0;
    out.components.pix[i] = (label[i] + 1) / n_regions;
    if (keep[static_cast<std::size_t>(label[i])]) out.mask.pix[i] = 1.0;
  }
  return out;
}

Image extract_target_mask(const Image& ir, int keep_regions) {
  return extract_target_mask_stages(ir, keep_regions).mask;
}

}  // namespace awf
