// Command line front end over the C interface: train, fuse, eval, wavelet,
// and mask subcommands. Every failure is one diagnostic line on stderr and
// a nonzero exit; bad flags exit 2 with usage.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "awfgan.h"

namespace fs = std::filesystem;

namespace {

int fail_current() {
  std::fprintf(stderr, "awfgan: %s\n", awf_last_error());
  return 1;
}

int fail_msg(const std::string& msg) {
  std::fprintf(stderr, "awfgan: %s\n", msg.c_str());
  return 1;
}

struct ImageGuard {
  awf_image* p = nullptr;
  ~ImageGuard() { awf_image_free(p); }
};

struct CkptGuard {
  awf_checkpoint* p = nullptr;
  ~CkptGuard() { awf_checkpoint_free(p); }
};

int run_train(const std::string& config, const std::string& data,
              const std::string& out) {
  if (awf_train(config.c_str(), data.c_str(), out.c_str(), nullptr, nullptr))
    return fail_current();
  std::printf("wrote %s/checkpoint_final.awf\n", out.c_str());
  return 0;
}

int run_fuse(const std::string& ckpt, const std::string& ir_path,
             const std::string& vi_path, const std::string& out,
             const std::string& att_dir) {
  CkptGuard ck;
  if (awf_checkpoint_load(ckpt.c_str(), &ck.p)) return fail_current();
  ImageGuard ir, vi, fused, att_ir, att_vi;
  if (awf_image_load(ir_path.c_str(), &ir.p)) return fail_current();
  if (awf_image_load(vi_path.c_str(), &vi.p)) return fail_current();
  const bool dump = !att_dir.empty();
  if (awf_fuse(ck.p, ir.p, vi.p, &fused.p, dump ? &att_ir.p : nullptr,
               dump ? &att_vi.p : nullptr))
    return fail_current();
  if (awf_image_save(fused.p, out.c_str())) return fail_current();
  if (dump) {
    std::error_code ec;
    fs::create_directories(att_dir, ec);
    if (ec) return fail_msg("cannot create " + att_dir + ": " + ec.message());
    if (awf_image_save(att_ir.p, (att_dir + "/att_ir.png").c_str()))
      return fail_current();
    if (awf_image_save(att_vi.p, (att_dir + "/att_vi.png").c_str()))
      return fail_current();
  }
  return 0;
}

int run_eval(const std::string& ir_dir, const std::string& vi_dir,
             const std::string& fused_dir, const std::string& out) {
  if (awf_eval_directories(ir_dir.c_str(), vi_dir.c_str(), fused_dir.c_str(),
                           out.c_str()))
    return fail_current();
  return 0;
}

int run_wavelet(const std::string& in_path, const std::string& out_dir) {
  ImageGuard img;
  if (awf_image_load(in_path.c_str(), &img.p)) return fail_current();
  const int h = awf_image_height(img.p), w = awf_image_width(img.p);
  const int sh = (h + 1) / 2, sw = (w + 1) / 2;
  const std::size_t n = static_cast<std::size_t>(sh) * sw;
  std::vector<double> ll(n), hl(n), lh(n), hh(n);
  if (awf_haar_dwt2(awf_image_pixels(img.p), h, w, ll.data(), hl.data(),
                    lh.data(), hh.data()))
    return fail_current();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return fail_msg("cannot create " + out_dir + ": " + ec.message());

  // map the low band's [0,2] and the signed detail bands' [-1,1] onto gray
  const struct {
    const char* name;
    const std::vector<double>* band;
    bool low;
  } bands[] = {{"ll", &ll, true},
               {"hl", &hl, false},
               {"lh", &lh, false},
               {"hh", &hh, false}};
  for (const auto& b : bands) {
    ImageGuard view;
    if (awf_image_create(sh, sw, &view.p)) return fail_current();
    double* px = awf_image_pixels(view.p);
    for (std::size_t i = 0; i < n; ++i)
      px[i] = b.low ? (*b.band)[i] / 2.0 : 0.5 + (*b.band)[i] / 2.0;
    const std::string path = out_dir + "/" + b.name + ".png";
    if (awf_image_save(view.p, path.c_str())) return fail_current();
  }
  return 0;
}

int run_mask(const std::string& att_path, const std::string& out) {
  ImageGuard att, threshold, components, mask;
  if (awf_image_load(att_path.c_str(), &att.p)) return fail_current();
  if (awf_mask_stages(att.p, 3, &threshold.p, &components.p, &mask.p))
    return fail_current();
  if (awf_image_save(mask.p, out.c_str())) return fail_current();
  // stages go next to the mask under derived names
  fs::path base(out);
  const std::string ext = base.extension().string();
  const std::string stem = (base.parent_path() / base.stem()).string();
  if (awf_image_save(threshold.p, (stem + "_threshold" + ext).c_str()))
    return fail_current();
  if (awf_image_save(components.p, (stem + "_components" + ext).c_str()))
    return fail_current();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infrared/visible image fusion"};
  app.require_subcommand(1);

  std::string config, data, out, ckpt, ir, vi, att_dir, in_path;
  std::string ir_dir, vi_dir, fused_dir;

  auto* train = app.add_subcommand("train", "train a model on paired images");
  train->add_option("--config", config, "key = value settings file")->required();
  train->add_option("--data", data, "directory holding ir/ and vi/")->required();
  train->add_option("--out", out, "run directory for logs and checkpoints")
      ->required();

  auto* fuse = app.add_subcommand("fuse", "fuse one infrared/visible pair");
  fuse->add_option("--ckpt", ckpt, "trained checkpoint")->required();
  fuse->add_option("--ir", ir, "infrared image")->required();
  fuse->add_option("--vi", vi, "visible image")->required();
  fuse->add_option("--out", out, "fused output image")->required();
  fuse->add_option("--dump-attention", att_dir,
                   "also write both attention maps into this directory");

  auto* eval = app.add_subcommand("eval", "score fused images against sources");
  eval->add_option("--ir-dir", ir_dir, "infrared sources")->required();
  eval->add_option("--vi-dir", vi_dir, "visible sources")->required();
  eval->add_option("--fused-dir", fused_dir, "fusion results")->required();
  eval->add_option("--out", out, "CSV report path")->required();

  auto* wavelet = app.add_subcommand("wavelet", "decompose one image");
  wavelet->add_option("--in", in_path, "input image")->required();
  wavelet->add_option("--out", out, "directory for the four subband images")
      ->required();

  auto* mask = app.add_subcommand("mask", "extract the target mask of a map");
  mask->add_option("--attention", att_dir, "attention map image")->required();
  mask->add_option("--out", out, "mask output image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.got_subcommand(train)) return run_train(config, data, out);
  if (app.got_subcommand(fuse)) return run_fuse(ckpt, ir, vi, out, att_dir);
  if (app.got_subcommand(eval)) return run_eval(ir_dir, vi_dir, fused_dir, out);
  if (app.got_subcommand(wavelet)) return run_wavelet(in_path, out);
  if (app.got_subcommand(mask)) return run_mask(att_dir, out);
  return 2;
}
