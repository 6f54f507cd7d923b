#pragma once

#include "image.hpp"

namespace awf {

// Quality scores for one fusion result F against its sources A (infrared)
// and B (visible). Higher is better for every field.
struct MetricReport {
  double mi = 0.0;    // mutual information carried from both sources
  double en = 0.0;    // Shannon entropy of the fused image, bits
  double sd = 0.0;    // population standard deviation
  double sf = 0.0;    // spatial frequency
  double viff = 0.0;  // visual information fidelity for fusion
  double scd = 0.0;   // sum of source-to-fused correlations
};

// MI(A,F) + MI(B,F) over 256 uniform gray bins, log base 2.
double mutual_information(const Image& a, const Image& b, const Image& f);

// -sum p log2 p over the 256-bin histogram; 0 log 0 counts as 0.
double entropy(const Image& f);

double standard_deviation(const Image& f);

// sqrt(RF^2 + CF^2) with squared neighbor differences normalized by the
// pixel count. Needs at least a 2x2 image.
double spatial_frequency(const Image& f);

// Four Gaussian scales (sigma 1, 2, 4, 8), non-overlapping 8x8 blocks,
// additive noise variance 2.0; per scale the fidelity ratios against both
// sources are averaged, then the scales are averaged. Needs 32x32 or more.
double viff(const Image& a, const Image& b, const Image& f);

// r(A,F) + r(B,F) with Pearson r; a zero-variance operand makes that term 0.
// The difference form correlates A with F-B and B with F-A instead.
double scd(const Image& a, const Image& b, const Image& f,
           bool differences = false);

MetricReport evaluate_pair(const Image& a, const Image& b, const Image& f,
                           bool scd_differences = false);

}  // namespace awf
