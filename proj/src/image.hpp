#pragma once

#include <string>
#include <vector>

#include "error.hpp"

namespace awf {

// Grayscale image with intensities in [0,1], row major.
struct Image {
  int h = 0, w = 0;
  std::vector<double> pix;

  Image() = default;
  Image(int height, int width, double fill = 0.0);

  double& at(int y, int x) { return pix[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const {
    return pix[static_cast<std::size_t>(y) * w + x];
  }
};

// Format is chosen by file extension: .pgm/.PGM or .png/.PNG. PGM reading
// accepts both the ASCII (P2) and binary (P5) flavors with maxval up to
// 65535; PNG reading accepts grayscale and color files, color is reduced to
// luma as 0.299 R + 0.587 G + 0.114 B. Writing produces binary 8 bit files.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

// Align-corners bilinear resampling. An output axis of length 1 samples
// coordinate 0.
Image resize_bilinear(const Image& img, int oh, int ow);

}  // namespace awf
