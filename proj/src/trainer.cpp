#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <utility>

#include "discriminators.hpp"
#include "error.hpp"
#include "generator.hpp"
#include "losses.hpp"
#include "mask.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace awf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_finite(double v, const char* term, std::int64_t step) {
  if (!std::isfinite(v)) {
    fail(ErrorKind::numeric, "train: non-finite ", term, " at step ", step);
  }
}

// one side of the indexed pairs flattened into a [B,1,S,S] value block
std::vector<double> gather(const std::vector<TrainPair>& data,
                           const std::vector<int>& order, std::size_t first,
                           int bsz, bool infrared) {
  std::vector<double> out;
  for (int b = 0; b < bsz; ++b) {
    const TrainPair& p = data[static_cast<std::size_t>(order[first + b])];
    const std::vector<double>& src = infrared ? p.ir.pix : p.vi.pix;
    out.insert(out.end(), src.begin(), src.end());
  }
  return out;
}

Image pad_even(const Image& im) {
  const int h = im.h + (im.h & 1), w = im.w + (im.w & 1);
  if (h == im.h && w == im.w) return im;
  Image out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(y, x) = im.at(std::min(y, im.h - 1), std::min(x, im.w - 1));
    }
  }
  return out;
}

Image crop_to(std::span<const double> v, int padded_w, int h, int w) {
  Image out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(y, x) = v[static_cast<std::size_t>(y) * padded_w + x];
    }
  }
  return out;
}

}  // namespace

Checkpoint train(const std::vector<TrainPair>& data, const TrainConfig& cfg,
                 const std::string& out_dir, const Checkpoint* resume) {
  validate_config(cfg);
  require(!data.empty(), ErrorKind::invalid_argument, "train: empty dataset");
  const int S = cfg.image_size;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const TrainPair& p = data[i];
    require(p.ir.h == S && p.ir.w == S && p.vi.h == S && p.vi.w == S,
            ErrorKind::shape_mismatch, "train: pair ", i, " is ", p.ir.h, "x",
            p.ir.w, "/", p.vi.h, "x", p.vi.w, ", expected ", S, "x", S);
  }

  Rng rng(cfg.rng_seed);
  ParamSet ps_g, ps_spa, ps_fre;
  Generator gen(ps_g, rng);
  SpatialCritic d_spa(ps_spa, rng, S);
  FrequencyCritic d_fre(ps_fre, rng, S);

  std::int64_t step = 0;
  if (resume) {
    require(resume->version == 1, ErrorKind::version,
            "train: unsupported checkpoint version ", resume->version);
    require(resume->image_size == S, ErrorKind::shape_mismatch,
            "train: checkpoint image size ", resume->image_size,
            " does not match configured ", S);
    restore_params(*resume, ps_g);
    restore_params(*resume, ps_spa);
    restore_params(*resume, ps_fre);
    rng.restore(resume->rng_state);
    step = resume->step;
  }

  std::filesystem::create_directories(out_dir);
  const auto log_path = std::filesystem::path(out_dir) / "loss_log.csv";
  std::ofstream log(log_path, std::ios::trunc);
  require(log.good(), ErrorKind::io, "train: cannot open ", log_path.string());
  const LossWeights& w = cfg.weights;
  log << "# lambda=" << num_short(w.lambda) << " gamma=" << num_short(w.gamma)
      << " alpha=" << num_short(w.alpha) << " beta=" << num_short(w.beta)
      << "\n";
  log << "step,loss_g,loss_con,loss_adv,loss_d_spa,loss_d_fre,"
         "wgap_spa,wgap_fre,gp_spa,gp_fre\n";

  auto snapshot = [&]() {
    Checkpoint ck;
    ck.image_size = S;
    ck.step = step;
    ck.rng_state = rng.state();
    append_params(ck, ps_g);
    append_params(ck, ps_spa);
    append_params(ck, ps_fre);
    return ck;
  };

  const std::size_t n = data.size();
  std::vector<int> order(n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t first = 0; first < n; first += cfg.batch_size) {
      const int bsz = static_cast<int>(
          std::min<std::size_t>(cfg.batch_size, n - first));
      const Shape shape{bsz, 1, S, S};
      const std::vector<double> ir_vals = gather(data, order, first, bsz, true);
      const std::vector<double> vi_vals =
          gather(data, order, first, bsz, false);

      // The generator does not change during the critic rounds, so its
      // output and the mask are computed once per batch and fed to the
      // critics as constants.
      std::vector<double> fused_vals, mask_vals;
      {
        Graph g;
        g.set_params_frozen(true);
        auto out = gen.forward(g, g.constant(shape, ir_vals),
                               g.constant(shape, vi_vals));
        const auto fv = out.fused.value();
        fused_vals.assign(fv.begin(), fv.end());
        const std::span<const double> att = out.att_ir.value();
        const std::size_t plane = static_cast<std::size_t>(S) * S;
        mask_vals.resize(fused_vals.size());
        for (int b = 0; b < bsz; ++b) {
          Image a(S, S);
          std::copy_n(att.begin() + b * plane, plane, a.pix.begin());
          const Image m = extract_target_mask(a);
          std::copy_n(m.pix.begin(), plane, mask_vals.begin() + b * plane);
        }
      }

      double d_spa_val = 0.0, d_fre_val = 0.0;
      double wgap_spa = 0.0, wgap_fre = 0.0, gp_spa = 0.0, gp_fre = 0.0;
      for (int k = 0; k < cfg.n_critic; ++k) {
        {
          Graph g;
          const CriticLoss cl = d_spa_loss(
              g, d_spa, g.constant(shape, ir_vals),
              g.constant(shape, fused_vals), g.constant(shape, mask_vals),
              w.alpha, rng);
          d_spa_val = cl.total.value()[0];
          check_finite(d_spa_val, "spatial critic loss", step);
          check_finite(cl.penalty, "spatial gradient penalty", step);
          check_finite(cl.wgap, "spatial score gap", step);
          g.backward(cl.total);
          sgd_step(ps_spa, cfg.lr_d);
          wgap_spa = cl.wgap;
          gp_spa = cl.penalty;
        }
        {
          Graph g;
          const CriticLoss cl =
              d_fre_loss(g, d_fre, g.constant(shape, vi_vals),
                         g.constant(shape, fused_vals), w.beta, rng);
          d_fre_val = cl.total.value()[0];
          check_finite(d_fre_val, "frequency critic loss", step);
          check_finite(cl.penalty, "frequency gradient penalty", step);
          check_finite(cl.wgap, "frequency score gap", step);
          g.backward(cl.total);
          sgd_step(ps_fre, cfg.lr_d);
          wgap_fre = cl.wgap;
          gp_fre = cl.penalty;
        }
      }

      double loss_g = 0.0, loss_con = 0.0, loss_adv = 0.0;
      {
        Graph g;
        const Tensor ir_c = g.constant(shape, ir_vals);
        const Tensor vi_c = g.constant(shape, vi_vals);
        auto out = gen.forward(g, ir_c, vi_c);
        const Tensor con =
            content_loss(ir_c, vi_c, out.fused, w, cfg.ssim_global);
        const Tensor adv = adv_loss(out.fused, g.constant(shape, mask_vals),
                                    d_spa, d_fre);
        const Tensor total = add(adv, scalar_mul(con, w.lambda));
        loss_con = con.value()[0];
        loss_adv = adv.value()[0];
        loss_g = total.value()[0];
        check_finite(loss_con, "content loss", step);
        check_finite(loss_adv, "adversarial loss", step);
        check_finite(loss_g, "generator loss", step);
        g.backward(total);
        sgd_step(ps_g, cfg.lr_g);
        // the adversarial term backpropagates through both critics as well
        ps_spa.zero_grads();
        ps_fre.zero_grads();
      }

      log << step << ',' << num(loss_g) << ',' << num(loss_con) << ','
          << num(loss_adv) << ',' << num(d_spa_val) << ',' << num(d_fre_val)
          << ',' << num(wgap_spa) << ',' << num(wgap_fre) << ','
          << num(gp_spa) << ',' << num(gp_fre) << '\n';
      log.flush();
      ++step;

      if (cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
        const auto p = std::filesystem::path(out_dir) /
                       ("checkpoint_" + std::to_string(step) + ".awf");
        save_checkpoint(snapshot(), p.string());
      }
    }
  }

  Checkpoint ck = snapshot();
  const auto final_path =
      std::filesystem::path(out_dir) / "checkpoint_final.awf";
  save_checkpoint(ck, final_path.string());
  return ck;
}

Checkpoint train_files(const std::vector<PairPaths>& pairs,
                       const TrainConfig& cfg, const std::string& out_dir) {
  validate_config(cfg);
  require(!pairs.empty(), ErrorKind::invalid_argument, "train: empty dataset");
  std::vector<TrainPair> data;
  data.reserve(pairs.size());
  for (const PairPaths& p : pairs) {
    TrainPair tp;
    tp.ir = resize_bilinear(load_image(p.ir), cfg.image_size, cfg.image_size);
    tp.vi = resize_bilinear(load_image(p.vi), cfg.image_size, cfg.image_size);
    data.push_back(std::move(tp));
  }
  return train(data, cfg, out_dir);
}

FuseOutput fuse_images_full(const Image& ir, const Image& vi,
                            const Checkpoint& ck) {
  require(ck.version == 1, ErrorKind::version,
          "fuse: unsupported checkpoint version ", ck.version);
  require(ir.h > 0 && ir.w > 0, ErrorKind::invalid_argument,
          "fuse: empty image");
  require(ir.h == vi.h && ir.w == vi.w, ErrorKind::shape_mismatch,
          "fuse: image sizes differ, ", ir.h, "x", ir.w, " vs ", vi.h, "x",
          vi.w);

  ParamSet ps;
  Rng init_rng(0);
  Generator gen(ps, init_rng);
  restore_params(ck, ps);

  const Image pir = pad_even(ir), pvi = pad_even(vi);
  Graph g;
  g.set_params_frozen(true);
  const Shape shape{1, 1, pir.h, pir.w};
  auto out = gen.forward(g, g.constant(shape, pir.pix),
                         g.constant(shape, pvi.pix));

  FuseOutput fo;
  fo.fused = crop_to(out.fused.value(), pir.w, ir.h, ir.w);
  fo.att_ir = crop_to(out.att_ir.value(), pir.w, ir.h, ir.w);
  fo.att_vi = crop_to(out.att_vi.value(), pir.w, ir.h, ir.w);
  return fo;
}

Image fuse_images(const Image& ir, const Image& vi, const Checkpoint& ck) {
  return fuse_images_full(ir, vi, ck).fused;
}

}  // namespace awf
