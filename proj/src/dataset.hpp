#pragma once

#include <string>
#include <vector>

namespace awf {

struct PairPaths {
  std::string id;  // shared file stem
  std::string ir;
  std::string vi;
};

// Pairs image files (.pgm/.png, any case) with identical stems between the
// two directories. Every stem must appear on both sides and only once per
// side; violations name the offending stem. The result is sorted by id.
std::vector<PairPaths> pair_directories(const std::string& ir_dir,
                                        const std::string& vi_dir);

}  // namespace awf
