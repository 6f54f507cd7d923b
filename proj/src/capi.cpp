#include "awfgan.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "image.hpp"
#include "mask.hpp"
#include "metrics.hpp"
#include "report.hpp"
#include "trainer.hpp"
#include "wavelet.hpp"

struct awf_image {
  awf::Image img;
};

struct awf_checkpoint {
  awf::Checkpoint ck;
};

namespace {

thread_local std::string tl_error = "no error";

awf_status kind_code(awf::ErrorKind k) {
  switch (k) {
    case awf::ErrorKind::invalid_argument: return AWF_ERR_INVALID_ARGUMENT;
    case awf::ErrorKind::shape_mismatch: return AWF_ERR_SHAPE_MISMATCH;
    case awf::ErrorKind::io: return AWF_ERR_IO;
    case awf::ErrorKind::format: return AWF_ERR_FORMAT;
    case awf::ErrorKind::version: return AWF_ERR_VERSION;
    case awf::ErrorKind::numeric: return AWF_ERR_NUMERIC;
  }
  return AWF_ERR_UNKNOWN;
}

awf_status set_error(awf_status code, std::string msg) {
  tl_error = std::move(msg);
  return code;
}

// Runs the body and funnels every throw into a status code.
template <class Fn>
awf_status guarded(Fn&& fn) {
  try {
    fn();
    return AWF_OK;
  } catch (const awf::Error& e) {
    return set_error(kind_code(e.kind()), e.what());
  } catch (const std::exception& e) {
    return set_error(AWF_ERR_UNKNOWN, e.what());
  } catch (...) {
    return set_error(AWF_ERR_UNKNOWN, "unknown failure");
  }
}

awf_status need(bool ok, const char* what) {
  if (ok) return AWF_OK;
  return set_error(AWF_ERR_INVALID_ARGUMENT,
                   std::string(what) + " must not be NULL");
}

awf_image* wrap(awf::Image img) {
  return new awf_image{std::move(img)};
}

}  // namespace

extern "C" {

const char* awf_version(void) { return "1.0.0"; }

const char* awf_last_error(void) { return tl_error.c_str(); }

/* ---- images ----------------------------------------------------------- */

awf_status awf_image_create(int height, int width, awf_image** out) {
  if (auto s = need(out, "out")) return s;
  return guarded([&] {
    awf::require(height > 0 && width > 0, awf::ErrorKind::invalid_argument,
                 "image size must be positive, got ", height, "x", width);
    *out = wrap(awf::Image(height, width));
  });
}

awf_status awf_image_load(const char* path, awf_image** out) {
  if (auto s = need(path, "path")) return s;
  if (auto s = need(out, "out")) return s;
  return guarded([&] { *out = wrap(awf::load_image(path)); });
}

awf_status awf_image_save(const awf_image* img, const char* path) {
  if (auto s = need(img, "img")) return s;
  if (auto s = need(path, "path")) return s;
  return guarded([&] { awf::save_image(img->img, path); });
}

int awf_image_height(const awf_image* img) { return img ? img->img.h : 0; }

int awf_image_width(const awf_image* img) { return img ? img->img.w : 0; }

double* awf_image_pixels(awf_image* img) {
  return img ? img->img.pix.data() : nullptr;
}

awf_status awf_image_resize(const awf_image* img, int height, int width,
                            awf_image** out) {
  if (auto s = need(img, "img")) return s;
  if (auto s = need(out, "out")) return s;
  return guarded(
      [&] { *out = wrap(awf::resize_bilinear(img->img, height, width)); });
}

void awf_image_free(awf_image* img) { delete img; }

/* ---- checkpoints ------------------------------------------------------ */

awf_status awf_checkpoint_load(const char* path, awf_checkpoint** out) {
  if (auto s = need(path, "path")) return s;
  if (auto s = need(out, "out")) return s;
  return guarded(
      [&] { *out = new awf_checkpoint{awf::load_checkpoint(path)}; });
}

awf_status awf_checkpoint_save(const awf_checkpoint* ck, const char* path) {
  if (auto s = need(ck, "ck")) return s;
  if (auto s = need(path, "path")) return s;
  return guarded([&] { awf::save_checkpoint(ck->ck, path); });
}

int64_t awf_checkpoint_step(const awf_checkpoint* ck) {
  return ck ? ck->ck.step : -1;
}

int awf_checkpoint_image_size(const awf_checkpoint* ck) {
  return ck ? ck->ck.image_size : 0;
}

void awf_checkpoint_free(awf_checkpoint* ck) { delete ck; }

/* ---- training and fusion ---------------------------------------------- */

awf_status awf_train(const char* config_path, const char* data_dir,
                     const char* out_dir, const char* resume_path,
                     awf_checkpoint** final_out) {
  if (auto s = need(data_dir, "data_dir")) return s;
  if (auto s = need(out_dir, "out_dir")) return s;
  return guarded([&] {
    const awf::TrainConfig cfg = config_path
                                     ? awf::load_train_config(config_path)
                                     : awf::TrainConfig{};
    const std::filesystem::path data(data_dir);
    const auto pairs =
        awf::pair_directories((data / "ir").string(), (data / "vi").string());
    awf::Checkpoint final_ck;
    if (resume_path) {
      // train_files has no resume path, so load and resize here
      const awf::Checkpoint resume = awf::load_checkpoint(resume_path);
      std::vector<awf::TrainPair> data_pairs;
      data_pairs.reserve(pairs.size());
      for (const auto& p : pairs) {
        awf::Image ir = awf::resize_bilinear(awf::load_image(p.ir),
                                             cfg.image_size, cfg.image_size);
        awf::Image vi = awf::resize_bilinear(awf::load_image(p.vi),
                                             cfg.image_size, cfg.image_size);
        data_pairs.push_back({std::move(ir), std::move(vi)});
      }
      final_ck = awf::train(data_pairs, cfg, out_dir, &resume);
    } else {
      final_ck = awf::train_files(pairs, cfg, out_dir);
    }
    if (final_out) *final_out = new awf_checkpoint{std::move(final_ck)};
  });
}

awf_status awf_fuse(const awf_checkpoint* ck, const awf_image* ir,
                    const awf_image* vi, awf_image** fused,
                    awf_image** att_ir, awf_image** att_vi) {
  if (auto s = need(ck, "ck")) return s;
  if (auto s = need(ir, "ir")) return s;
  if (auto s = need(vi, "vi")) return s;
  if (auto s = need(fused, "fused")) return s;
  return guarded([&] {
    awf::FuseOutput out = awf::fuse_images_full(ir->img, vi->img, ck->ck);
    *fused = wrap(std::move(out.fused));
    if (att_ir) *att_ir = wrap(std::move(out.att_ir));
    if (att_vi) *att_vi = wrap(std::move(out.att_vi));
  });
}

/* ---- evaluation ------------------------------------------------------- */

awf_status awf_evaluate_pair(const awf_image* ir, const awf_image* vi,
                             const awf_image* fused, awf_metrics* out) {
  if (auto s = need(ir, "ir")) return s;
  if (auto s = need(vi, "vi")) return s;
  if (auto s = need(fused, "fused")) return s;
  if (auto s = need(out, "out")) return s;
  return guarded([&] {
    const awf::MetricReport r =
        awf::evaluate_pair(ir->img, vi->img, fused->img);
    *out = {r.mi, r.en, r.sd, r.sf, r.viff, r.scd};
  });
}

awf_status awf_eval_directories(const char* ir_dir, const char* vi_dir,
                                const char* fused_dir, const char* csv_path) {
  if (auto s = need(ir_dir, "ir_dir")) return s;
  if (auto s = need(vi_dir, "vi_dir")) return s;
  if (auto s = need(fused_dir, "fused_dir")) return s;
  if (auto s = need(csv_path, "csv_path")) return s;
  return guarded([&] {
    const auto src = awf::pair_directories(ir_dir, vi_dir);
    const auto res = awf::pair_directories(ir_dir, fused_dir);
    std::vector<awf::EvalRow> rows;
    rows.reserve(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      const awf::Image ir = awf::load_image(src[i].ir);
      const awf::Image vi = awf::load_image(src[i].vi);
      const awf::Image fused = awf::load_image(res[i].vi);
      rows.push_back(
          {src[i].id, awf::evaluate_pair(ir, vi, fused)});
    }
    awf::write_metrics_csv(rows, csv_path);
    std::filesystem::path summary(csv_path);
    summary.replace_extension(".json");
    awf::write_metrics_summary(rows, summary.string());
  });
}

/* ---- wavelet ---------------------------------------------------------- */

awf_status awf_haar_dwt2(const double* pixels, int height, int width,
                         double* ll, double* hl, double* lh, double* hh) {
  if (auto s = need(pixels, "pixels")) return s;
  if (auto s = need(ll, "ll")) return s;
  if (auto s = need(hl, "hl")) return s;
  if (auto s = need(lh, "lh")) return s;
  if (auto s = need(hh, "hh")) return s;
  return guarded([&] {
    const awf::wavelet::Subbands s = awf::wavelet::dwt2(pixels, height, width);
    const std::size_t n = s.ll.size();
    std::memcpy(ll, s.ll.data(), n * sizeof(double));
    std::memcpy(hl, s.hl.data(), n * sizeof(double));
    std::memcpy(lh, s.lh.data(), n * sizeof(double));
    std::memcpy(hh, s.hh.data(), n * sizeof(double));
  });
}

awf_status awf_haar_idwt2(const double* ll, const double* hl,
                          const double* lh, const double* hh, int height,
                          int width, double* pixels_out) {
  if (auto s = need(ll, "ll")) return s;
  if (auto s = need(hl, "hl")) return s;
  if (auto s = need(lh, "lh")) return s;
  if (auto s = need(hh, "hh")) return s;
  if (auto s = need(pixels_out, "pixels_out")) return s;
  return guarded([&] {
    awf::require(height > 0 && width > 0, awf::ErrorKind::invalid_argument,
                 "image size must be positive, got ", height, "x", width);
    awf::wavelet::Subbands s;
    s.h = (height + 1) / 2;
    s.w = (width + 1) / 2;
    const std::size_t n = static_cast<std::size_t>(s.h) * s.w;
    s.ll.assign(ll, ll + n);
    s.hl.assign(hl, hl + n);
    s.lh.assign(lh, lh + n);
    s.hh.assign(hh, hh + n);
    const std::vector<double> img = awf::wavelet::idwt2(s, height, width);
    std::memcpy(pixels_out, img.data(), img.size() * sizeof(double));
  });
}

/* ---- target mask ------------------------------------------------------ */

awf_status awf_extract_mask(const awf_image* attention, int keep_regions,
                            awf_image** out) {
  if (auto s = need(attention, "attention")) return s;
  if (auto s = need(out, "out")) return s;
  return guarded([&] {
    *out = wrap(awf::extract_target_mask(attention->img, keep_regions));
  });
}

awf_status awf_mask_stages(const awf_image* attention, int keep_regions,
                           awf_image** threshold_map, awf_image** components,
                           awf_image** mask) {
  if (auto s = need(attention, "attention")) return s;
  return guarded([&] {
    awf::MaskStages st =
        awf::extract_target_mask_stages(attention->img, keep_regions);
    if (threshold_map) *threshold_map = wrap(std::move(st.threshold_map));
    if (components) *components = wrap(std::move(st.components));
    if (mask) *mask = wrap(std::move(st.mask));
  });
}

}  // extern "C"
