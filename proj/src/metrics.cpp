#include "metrics.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace awf {

namespace {

constexpr int kBins = 256;

void check_nonempty(const Image& x, const char* who) {
  require(x.h > 0 && x.w > 0 &&
              x.pix.size() == static_cast<std::size_t>(x.h) * x.w,
          ErrorKind::invalid_argument, who, ": empty or inconsistent image");
}

void check_same_size(const Image& x, const Image& y, const char* who) {
  require(x.h == y.h && x.w == y.w, ErrorKind::shape_mismatch, who,
          ": sizes differ, ", x.h, "x", x.w, " vs ", y.h, "x", y.w);
}

int gray_bin(double v) {
  const int b = static_cast<int>(v * kBins);
  return b < 0 ? 0 : (b >= kBins ? kBins - 1 : b);
}

std::array<double, kBins> histogram(const Image& x) {
  std::array<double, kBins> h{};
  for (double v : x.pix) h[gray_bin(v)] += 1.0;
  const double n = static_cast<double>(x.pix.size());
  for (double& v : h) v /= n;
  return h;
}

// mutual information of one source against the fused image, in bits
double mi_pair(const Image& x, const Image& f) {
  std::vector<double> joint(kBins * kBins, 0.0);
  for (std::size_t i = 0; i < x.pix.size(); ++i)
    joint[gray_bin(x.pix[i]) * kBins + gray_bin(f.pix[i])] += 1.0;
  const double n = static_cast<double>(x.pix.size());
  for (double& v : joint) v /= n;

  std::array<double, kBins> px{}, pf{};
  for (int i = 0; i < kBins; ++i)
    for (int j = 0; j < kBins; ++j) {
      px[i] += joint[i * kBins + j];
      pf[j] += joint[i * kBins + j];
    }

  double mi = 0.0;
  for (int i = 0; i < kBins; ++i)
    for (int j = 0; j < kBins; ++j) {
      const double p = joint[i * kBins + j];
      if (p > 0.0) mi += p * std::log2(p / (px[i] * pf[j]));
    }
  return mi;
}

double mean_of(const Image& x) {
  double s = 0.0;
  for (double v : x.pix) s += v;
  return s / static_cast<double>(x.pix.size());
}

// separable Gaussian low-pass with replicated edges
Image gauss_filter(const Image& x, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double s = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    s += k[i + r];
  }
  for (double& v : k) v /= s;

  auto clamp = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
  Image rows(x.h, x.w);
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * x.at(y, clamp(xx + t, x.w));
      rows.at(y, xx) = acc;
    }
  Image out(x.h, x.w);
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * rows.at(clamp(y + t, x.h), xx);
      out.at(y, xx) = acc;
    }
  return out;
}

// ratio of preserved to available visual information over full 8x8 blocks
double vif_ratio(const Image& x, const Image& f) {
  constexpr int kBlock = 8;
  constexpr double kStab = 1e-10;
  constexpr double kNoise = 2.0;
  double num = 0.0, den = 0.0;
  for (int by = 0; by + kBlock <= x.h; by += kBlock)
    for (int bx = 0; bx + kBlock <= x.w; bx += kBlock) {
      double sx = 0.0, sf = 0.0;
      for (int y = 0; y < kBlock; ++y)
        for (int xx = 0; xx < kBlock; ++xx) {
          sx += x.at(by + y, bx + xx);
          sf += f.at(by + y, bx + xx);
        }
      const double n = kBlock * kBlock;
      const double mx = sx / n, mf = sf / n;
      double vx = 0.0, vf = 0.0, cxf = 0.0;
      for (int y = 0; y < kBlock; ++y)
        for (int xx = 0; xx < kBlock; ++xx) {
          const double dx = x.at(by + y, bx + xx) - mx;
          const double df = f.at(by + y, bx + xx) - mf;
          vx += dx * dx;
          vf += df * df;
          cxf += dx * df;
        }
      vx /= n;
      vf /= n;
      cxf /= n;

      double g = cxf / (vx + kStab);
      double sv = vf - g * cxf;
      if (g < 0.0) {
        g = 0.0;
        sv = vf;
      }
      if (sv < 0.0) sv = 0.0;
      num += std::log2(1.0 + g * g * vx / (sv + kNoise));
      den += std::log2(1.0 + vx / kNoise);
    }
  return den > 0.0 ? num / den : 0.0;
}

// Pearson correlation; either operand constant makes it 0. The floor keeps
// the rounding residue of a constant operand from passing as signal.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  constexpr double kVarFloor = 1e-24;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cxy += dx * dy;
  }
  if (vx <= kVarFloor || vy <= kVarFloor) return 0.0;
  return cxy / (std::sqrt(vx) * std::sqrt(vy));
}

std::vector<double> diff_of(const Image& a, const Image& b) {
  std::vector<double> d(a.pix.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.pix[i] - b.pix[i];
  return d;
}

}  // namespace

double mutual_information(const Image& a, const Image& b, const Image& f) {
  check_nonempty(a, "mutual_information");
  check_same_size(a, b, "mutual_information");
  check_same_size(a, f, "mutual_information");
  return mi_pair(a, f) + mi_pair(b, f);
}

double entropy(const Image& f) {
  check_nonempty(f, "entropy");
  const auto h = histogram(f);
  double en = 0.0;
  for (double p : h)
    if (p > 0.0) en -= p * std::log2(p);
  return en;
}

double standard_deviation(const Image& f) {
  check_nonempty(f, "standard_deviation");
  const double m = mean_of(f);
  double acc = 0.0;
  for (double v : f.pix) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(f.pix.size()));
}

double spatial_frequency(const Image& f) {
  check_nonempty(f, "spatial_frequency");
  require(f.h >= 2 && f.w >= 2, ErrorKind::invalid_argument,
          "spatial_frequency: image must be at least 2x2, got ", f.h, "x",
          f.w);
  const double n = static_cast<double>(f.pix.size());
  double rf = 0.0, cf = 0.0;
  for (int y = 0; y < f.h; ++y)
    for (int x = 1; x < f.w; ++x) {
      const double d = f.at(y, x) - f.at(y, x - 1);
      rf += d * d;
    }
  for (int y = 1; y < f.h; ++y)
    for (int x = 0; x < f.w; ++x) {
      const double d = f.at(y, x) - f.at(y - 1, x);
      cf += d * d;
    }
  return std::sqrt(rf / n + cf / n);
}

double viff(const Image& a, const Image& b, const Image& f) {
  check_nonempty(a, "viff");
  check_same_size(a, b, "viff");
  check_same_size(a, f, "viff");
  require(a.h >= 32 && a.w >= 32, ErrorKind::invalid_argument,
          "viff: needs at least 32x32 images, got ", a.h, "x", a.w);
  double total = 0.0;
  for (double sigma : {1.0, 2.0, 4.0, 8.0}) {
    const Image fa = gauss_filter(a, sigma);
    const Image fb = gauss_filter(b, sigma);
    const Image ff = gauss_filter(f, sigma);
    total += 0.5 * (vif_ratio(fa, ff) + vif_ratio(fb, ff));
  }
  return total / 4.0;
}

double scd(const Image& a, const Image& b, const Image& f, bool differences) {
  check_nonempty(a, "scd");
  check_same_size(a, b, "scd");
  check_same_size(a, f, "scd");
  if (differences)
    return pearson(a.pix, diff_of(f, b)) + pearson(b.pix, diff_of(f, a));
  return pearson(a.pix, f.pix) + pearson(b.pix, f.pix);
}

MetricReport evaluate_pair(const Image& a, const Image& b, const Image& f,
                           bool scd_differences) {
  MetricReport r;
  r.mi = mutual_information(a, b, f);
  r.en = entropy(f);
  r.sd = standard_deviation(f);
  r.sf = spatial_frequency(f);
  r.viff = viff(a, b, f);
  r.scd = scd(a, b, f, scd_differences);
  return r;
}

}  // namespace awf
