#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <limits>

#include "checkpoint.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "discriminators.hpp"
#include "doctest.h"
#include "error.hpp"
#include "generator.hpp"
#include "image.hpp"
#include "rng.hpp"
#include "trainer.hpp"

using awf::Checkpoint;
using awf::Error;
using awf::ErrorKind;
using awf::Image;
using awf::train;
using awf::train_files;
using awf::TrainConfig;
using awf::TrainPair;

namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path root = fs::path("/tmp/awfgan_trainer_test") / name;
  fs::remove_all(root);
  fs::create_directories(root);
  return root.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// bright blob on a dim field vs a striped texture
TrainPair make_pair(int S, std::uint64_t seed) {
  awf::Rng r(seed);
  Image ir(S, S), vi(S, S);
  const double cy = S * (0.25 + 0.5 * r.uniform01());
  const double cx = S * (0.25 + 0.5 * r.uniform01());
  const double rad = S / 8.0;
  const double fx = 2.0 + std::floor(3.0 * r.uniform01());
  const double fy = 1.0 + std::floor(3.0 * r.uniform01());
  constexpr double two_pi = 6.283185307179586;
  const double phase = two_pi * r.uniform01();
  for (int y = 0; y < S; ++y) {
    for (int x = 0; x < S; ++x) {
      const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
      const double iv = 0.15 + 0.8 * std::exp(-d2 / (2.0 * rad * rad));
      const double vv =
          0.5 + 0.3 * std::sin(two_pi * (fx * x + fy * y) / S + phase) +
          0.05 * (r.uniform01() - 0.5);
      ir.at(y, x) = std::clamp(iv, 0.0, 1.0);
      vi.at(y, x) = std::clamp(vv, 0.0, 1.0);
    }
  }
  return {ir, vi};
}

std::vector<TrainPair> make_pairs(int S, int count) {
  std::vector<TrainPair> out;
  for (int i = 0; i < count; ++i)
    out.push_back(make_pair(S, 1000 + static_cast<std::uint64_t>(i)));
  return out;
}

struct Log {
  std::string weights_line;
  std::string header;
  std::vector<std::vector<double>> rows;
};

Log parse_log(const std::string& path) {
  Log log;
  std::ifstream in(path);
  REQUIRE(in.good());
  REQUIRE(std::getline(in, log.weights_line));
  REQUIRE(std::getline(in, log.header));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    REQUIRE(row.size() == 10);
    log.rows.push_back(std::move(row));
  }
  return log;
}

bool records_equal(const Checkpoint& a, const Checkpoint& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    if (ra.name != rb.name || ra.shape != rb.shape) return false;
    if (ra.data.size() != rb.data.size()) return false;
    if (std::memcmp(ra.data.data(), rb.data.data(),
                    ra.data.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.image_size = 32;
  cfg.epochs = 1;
  cfg.n_critic = 2;
  cfg.batch_size = 2;
  return cfg;
}

// same construction order as the trainer, for init comparisons
Checkpoint fresh_init(const TrainConfig& cfg) {
  awf::Rng rng(cfg.rng_seed);
  awf::ParamSet ps_g, ps_spa, ps_fre;
  awf::Generator gen(ps_g, rng);
  awf::SpatialCritic d_spa(ps_spa, rng, cfg.image_size);
  awf::FrequencyCritic d_fre(ps_fre, rng, cfg.image_size);
  Checkpoint ck;
  ck.image_size = cfg.image_size;
  awf::append_params(ck, ps_g);
  awf::append_params(ck, ps_spa);
  awf::append_params(ck, ps_fre);
  return ck;
}

}  // namespace

TEST_CASE("smoke run finishes with finite losses in the log") {
  TrainConfig cfg;
  cfg.image_size = 64;
  cfg.epochs = 2;
  cfg.n_critic = 2;
  cfg.batch_size = 2;
  const std::string out = fresh_dir("smoke");
  const Checkpoint ck = train(make_pairs(64, 4), cfg, out);

  CHECK(ck.step == 4);
  CHECK(ck.image_size == 64);
  CHECK(fs::exists(fs::path(out) / "checkpoint_final.awf"));

  const Log log = parse_log((fs::path(out) / "loss_log.csv").string());
  CHECK(log.weights_line == "# lambda=1 gamma=1 alpha=10 beta=10");
  CHECK(log.header ==
        "step,loss_g,loss_con,loss_adv,loss_d_spa,loss_d_fre,"
        "wgap_spa,wgap_fre,gp_spa,gp_fre");
  REQUIRE(log.rows.size() == 4);
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    CHECK(log.rows[i][0] == static_cast<double>(i));
    for (double v : log.rows[i]) CHECK(std::isfinite(v));
  }
}

TEST_CASE("zero learning rates leave the initialization untouched") {
  TrainConfig cfg = small_config();
  cfg.lr_g = 0.0;
  cfg.lr_d = 0.0;
  cfg.rng_seed = 7;
  const Checkpoint ck = train(make_pairs(32, 2), cfg, fresh_dir("lr0"));
  CHECK(records_equal(ck, fresh_init(cfg)));
}

TEST_CASE("one seed, one trajectory") {
  TrainConfig cfg = small_config();
  cfg.rng_seed = 11;
  const auto data = make_pairs(32, 2);

  const std::string out_a = fresh_dir("det_a");
  const std::string out_b = fresh_dir("det_b");
  train(data, cfg, out_a);
  train(data, cfg, out_b);
  CHECK(slurp(out_a + "/checkpoint_final.awf") ==
        slurp(out_b + "/checkpoint_final.awf"));
  CHECK(slurp(out_a + "/loss_log.csv") == slurp(out_b + "/loss_log.csv"));

  TrainConfig other = cfg;
  other.rng_seed = 12;
  const std::string out_c = fresh_dir("det_c");
  train(data, other, out_c);
  CHECK(slurp(out_a + "/checkpoint_final.awf") !=
        slurp(out_c + "/checkpoint_final.awf"));
}

TEST_CASE("a reloaded checkpoint continues the exact trajectory") {
  TrainConfig cfg = small_config();
  cfg.rng_seed = 21;
  const auto data = make_pairs(32, 2);

  TrainConfig two = cfg;
  two.epochs = 2;
  const std::string out_full = fresh_dir("resume_full");
  const Checkpoint full = train(data, two, out_full);

  const std::string out_half = fresh_dir("resume_half");
  train(data, cfg, out_half);
  const Checkpoint half =
      awf::load_checkpoint(out_half + "/checkpoint_final.awf");
  CHECK(half.step == 1);

  const std::string out_rest = fresh_dir("resume_rest");
  const Checkpoint rest = train(data, cfg, out_rest, &half);

  CHECK(rest.step == full.step);
  CHECK(rest.rng_state == full.rng_state);
  CHECK(records_equal(rest, full));

  // the resumed log holds exactly the second row of the full log
  std::istringstream full_log(slurp(out_full + "/loss_log.csv"));
  std::istringstream rest_log(slurp(out_rest + "/loss_log.csv"));
  std::string f1, f2, f3, f4, r1, r2, r3;
  std::getline(full_log, f1);
  std::getline(full_log, f2);
  std::getline(full_log, f3);
  std::getline(full_log, f4);
  std::getline(rest_log, r1);
  std::getline(rest_log, r2);
  std::getline(rest_log, r3);
  CHECK(r3 == f4);
  CHECK(r3.substr(0, 2) == "1,");
}

TEST_CASE("periodic checkpoints appear and the last equals the final") {
  TrainConfig cfg = small_config();
  cfg.epochs = 2;
  cfg.checkpoint_every = 1;
  const std::string out = fresh_dir("periodic");
  train(make_pairs(32, 2), cfg, out);
  CHECK(fs::exists(fs::path(out) / "checkpoint_1.awf"));
  CHECK(fs::exists(fs::path(out) / "checkpoint_2.awf"));
  CHECK(slurp(out + "/checkpoint_2.awf") ==
        slurp(out + "/checkpoint_final.awf"));
}

TEST_CASE("input validation") {
  TrainConfig cfg = small_config();
  CHECK_THROWS_WITH_AS(train({}, cfg, fresh_dir("empty")),
                       doctest::Contains("empty dataset"), Error);

  const auto wrong = make_pairs(64, 2);
  try {
    train(wrong, cfg, fresh_dir("wrong_size"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape_mismatch);
    CHECK(std::string(e.what()).find("expected 32x32") != std::string::npos);
  }

  TrainConfig bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(train(make_pairs(32, 2), bad, fresh_dir("bad_cfg")), Error);
}

TEST_CASE("a poisoned input aborts with the term named") {
  TrainConfig cfg = small_config();
  auto data = make_pairs(32, 2);
  data[0].ir.at(3, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(
      train(data, cfg, fresh_dir("nan")),
      doctest::Contains("non-finite spatial critic loss at step 0"), Error);
  try {
    train(data, cfg, fresh_dir("nan2"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
  }
}

TEST_CASE("training from paired files resizes and runs") {
  const std::string root = fresh_dir("files");
  fs::create_directories(fs::path(root) / "ir");
  fs::create_directories(fs::path(root) / "vi");
  for (int i = 0; i < 2; ++i) {
    const TrainPair p = make_pair(48, 500 + static_cast<std::uint64_t>(i));
    const std::string stem = "pair" + std::to_string(i);
    awf::save_image(p.ir, root + "/ir/" + stem + ".pgm");
    awf::save_image(p.vi, root + "/vi/" + stem + ".png");
  }
  TrainConfig cfg = small_config();
  const auto pairs = awf::pair_directories(root + "/ir", root + "/vi");
  const Checkpoint ck = train_files(pairs, cfg, fresh_dir("files_out"));
  CHECK(ck.step == 1);
  CHECK(ck.image_size == 32);
}

TEST_CASE("fusing runs the generator and respects sizes") {
  TrainConfig cfg = small_config();
  cfg.rng_seed = 31;
  const Checkpoint ck = fresh_init(cfg);

  const TrainPair p = make_pair(32, 600);
  const Image fused = awf::fuse_images(p.ir, p.vi, ck);
  CHECK(fused.h == 32);
  CHECK(fused.w == 32);
  for (double v : fused.pix) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // pure function of inputs and checkpoint
  const Image again = awf::fuse_images(p.ir, p.vi, ck);
  CHECK(std::memcmp(fused.pix.data(), again.pix.data(),
                    fused.pix.size() * sizeof(double)) == 0);

  const awf::FuseOutput full = awf::fuse_images_full(p.ir, p.vi, ck);
  CHECK(std::memcmp(full.fused.pix.data(), fused.pix.data(),
                    fused.pix.size() * sizeof(double)) == 0);
  for (double v : full.att_ir.pix) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(full.att_vi.h == 32);

  // the generator is size-agnostic; odd sizes go through edge padding
  const TrainPair q = make_pair(37, 601);
  Image vi_odd(37, 37);
  vi_odd.pix = q.vi.pix;
  const Image odd = awf::fuse_images(q.ir, vi_odd, ck);
  CHECK(odd.h == 37);
  CHECK(odd.w == 37);
  for (double v : odd.pix) CHECK(std::isfinite(v));
}

TEST_CASE("fusing rejects bad checkpoints and mismatched sizes") {
  TrainConfig cfg = small_config();
  const Checkpoint ck = fresh_init(cfg);
  const TrainPair p = make_pair(32, 700);

  Checkpoint wrong = ck;
  wrong.version = 2;
  CHECK_THROWS_WITH_AS(awf::fuse_images(p.ir, p.vi, wrong),
                       doctest::Contains("version"), Error);

  const TrainPair q = make_pair(34, 701);
  try {
    awf::fuse_images(p.ir, q.vi, ck);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape_mismatch);
  }

  Checkpoint empty;
  empty.image_size = 32;
  CHECK_THROWS_WITH_AS(awf::fuse_images(p.ir, p.vi, empty),
                       doctest::Contains("no record for parameter"), Error);
}
