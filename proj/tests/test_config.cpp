#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <string>

#include "config.hpp"
#include "doctest.h"
#include "error.hpp"

using awf::Error;
using awf::ErrorKind;
using awf::parse_train_config;
using awf::TrainConfig;

namespace {

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

}  // namespace

TEST_CASE("empty text yields the documented defaults") {
  const TrainConfig cfg = parse_train_config("");
  CHECK(cfg.epochs == 1);
  CHECK(cfg.n_critic == 2);
  CHECK(cfg.batch_size == 2);
  CHECK(cfg.lr_g == 1e-3);
  CHECK(cfg.lr_d == 1e-3);
  CHECK(cfg.weights.lambda == 1.0);
  CHECK(cfg.weights.gamma == 1.0);
  CHECK(cfg.weights.alpha == 10.0);
  CHECK(cfg.weights.beta == 10.0);
  CHECK(cfg.image_size == 64);
  CHECK(cfg.rng_seed == 1);
  CHECK(cfg.checkpoint_every == 0);
  CHECK(cfg.ssim_global == false);
  CHECK(cfg.scd_differences == false);
}

TEST_CASE("every key parses, with comments and loose spacing") {
  const std::string text =
      "# run settings\n"
      "epochs = 5\n"
      "n_critic=3\n"
      "  batch_size =  4  \n"
      "lr_g = 5e-4\n"
      "lr_d = 0.002\n"
      "\n"
      "lambda = 0.5   # content weight\n"
      "gamma = 2\n"
      "alpha = 7.5\n"
      "beta = 0\n"
      "image_size = 96\n"
      "rng_seed = 12345\n"
      "checkpoint_every = 10\n"
      "ssim_global = true\n"
      "scd_differences = 1\n";
  const TrainConfig cfg = parse_train_config(text);
  CHECK(cfg.epochs == 5);
  CHECK(cfg.n_critic == 3);
  CHECK(cfg.batch_size == 4);
  CHECK(cfg.lr_g == 5e-4);
  CHECK(cfg.lr_d == 0.002);
  CHECK(cfg.weights.lambda == 0.5);
  CHECK(cfg.weights.gamma == 2.0);
  CHECK(cfg.weights.alpha == 7.5);
  CHECK(cfg.weights.beta == 0.0);
  CHECK(cfg.image_size == 96);
  CHECK(cfg.rng_seed == 12345);
  CHECK(cfg.checkpoint_every == 10);
  CHECK(cfg.ssim_global == true);
  CHECK(cfg.scd_differences == true);
}

TEST_CASE("bool spellings") {
  CHECK(parse_train_config("ssim_global = 1\n").ssim_global == true);
  CHECK(parse_train_config("ssim_global = true\n").ssim_global == true);
  CHECK(parse_train_config("ssim_global = 0\n").ssim_global == false);
  CHECK(parse_train_config("ssim_global = false\n").ssim_global == false);
  CHECK_THROWS_WITH_AS(parse_train_config("ssim_global = yes\n"),
                       doctest::Contains("0/1/true/false"), Error);
}

TEST_CASE("malformed input is rejected with the line or key named") {
  CHECK_THROWS_WITH_AS(parse_train_config("epochs\n"),
                       doctest::Contains("line 1"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("epochs = 5\nwat = 9\n"),
                       doctest::Contains("unknown key 'wat'"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("epochs = 5\nwat = 9\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("epochs = abc\n"),
                       doctest::Contains("needs an integer"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("epochs = 3x\n"),
                       doctest::Contains("needs an integer"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("lr_g = fast\n"),
                       doctest::Contains("needs a number"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("epochs =\n"),
                       doctest::Contains("needs an integer"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("= 5\n"),
                       doctest::Contains("empty key"), Error);
  try {
    parse_train_config("wat = 9\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::format));
  }
}

TEST_CASE("validation limits") {
  CHECK_THROWS_WITH_AS(parse_train_config("epochs = 0\n"),
                       doctest::Contains("epochs"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("n_critic = 0\n"),
                       doctest::Contains("n_critic"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("batch_size = 0\n"),
                       doctest::Contains("batch_size"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("lr_g = -0.1\n"),
                       doctest::Contains("learning rates"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("image_size = 63\n"),
                       doctest::Contains("even and >= 32"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("image_size = 30\n"),
                       doctest::Contains("even and >= 32"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("alpha = -1\n"),
                       doctest::Contains("non-negative"), Error);
  CHECK_THROWS_WITH_AS(parse_train_config("checkpoint_every = -1\n"),
                       doctest::Contains("checkpoint_every"), Error);
  try {
    parse_train_config("epochs = 0\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::invalid_argument));
  }
  CHECK(parse_train_config("image_size = 32\n").image_size == 32);
}

TEST_CASE("loading from a file") {
  const std::string path = "/tmp/awfgan_config_test.cfg";
  {
    std::ofstream out(path);
    out << "epochs = 7\nlambda = 3\n";
  }
  const TrainConfig cfg = awf::load_train_config(path);
  CHECK(cfg.epochs == 7);
  CHECK(cfg.weights.lambda == 3.0);
  CHECK(cfg.n_critic == 2);

  CHECK_THROWS_WITH_AS(awf::load_train_config("/tmp/awfgan_no_such_file.cfg"),
                       doctest::Contains("cannot open"), Error);
  try {
    awf::load_train_config("/tmp/awfgan_no_such_file.cfg");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::io));
  }
}
