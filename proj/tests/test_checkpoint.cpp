#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"

using awf::append_params;
using awf::Checkpoint;
using awf::Error;
using awf::ErrorKind;
using awf::load_checkpoint;
using awf::Param;
using awf::ParamSet;
using awf::restore_params;
using awf::save_checkpoint;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/awfgan_ckpt_test_") + name;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

ParamSet awkward_params() {
  ParamSet ps;
  Param& w = ps.add("net.w", {2, 3});
  w.value = {0.1, -0.0, 1e308, 5e-324, -3.5, 0.3333333333333333};
  Param& b = ps.add("net.b", {4});
  b.value = {std::numeric_limits<double>::epsilon(), -1e-300, 42.0, 0.0};
  return ps;
}

}  // namespace

TEST_CASE("save and load round trip is bit exact") {
  ParamSet ps = awkward_params();
  awf::Rng rng(99);
  rng.normal();
  rng.uniform01();

  Checkpoint ck;
  ck.image_size = 64;
  ck.step = 1234;
  ck.rng_state = rng.state();
  append_params(ck, ps);

  const std::string path = tmp_path("roundtrip.awf");
  save_checkpoint(ck, path);
  const Checkpoint back = load_checkpoint(path);

  CHECK(back.version == 1);
  CHECK(back.image_size == 64);
  CHECK(back.step == 1234);
  CHECK(back.rng_state == ck.rng_state);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].name == "net.w");
  CHECK(back.records[0].shape == awf::Shape{2, 3});
  CHECK(bits_equal(back.records[0].data, ps.params()[0]->value));
  CHECK(back.records[1].name == "net.b");
  CHECK(bits_equal(back.records[1].data, ps.params()[1]->value));

  // the restored engine continues identically
  awf::Rng other(1);
  other.restore(back.rng_state);
  CHECK(other.uniform01() == rng.uniform01());
  CHECK(other.normal() == rng.normal());
}

TEST_CASE("restore copies data back and checks shapes") {
  ParamSet ps = awkward_params();
  Checkpoint ck;
  append_params(ck, ps);

  ps.params()[0]->value.assign(6, 7.0);
  ps.params()[1]->value.assign(4, -1.0);
  restore_params(ck, ps);
  CHECK(bits_equal(ps.params()[0]->value, ck.records[0].data));
  CHECK(bits_equal(ps.params()[1]->value, ck.records[1].data));

  // records the set does not mention stay harmless
  ParamSet partial;
  Param& b = partial.add("net.b", {4});
  b.value.assign(4, 0.0);
  restore_params(ck, partial);
  CHECK(bits_equal(partial.params()[0]->value, ck.records[1].data));

  ParamSet missing;
  missing.add("net.other", {4});
  CHECK_THROWS_WITH_AS(restore_params(ck, missing),
                       doctest::Contains("no record for parameter 'net.other'"),
                       Error);

  ParamSet badshape;
  badshape.add("net.b", {2, 2});
  CHECK_THROWS_WITH_AS(restore_params(ck, badshape),
                       doctest::Contains("net.b"), Error);
  try {
    restore_params(ck, badshape);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape_mismatch);
  }
}

TEST_CASE("unreadable and malformed files") {
  CHECK_THROWS_WITH_AS(load_checkpoint(tmp_path("does_not_exist.awf")),
                       doctest::Contains("cannot open"), Error);

  const std::string garbage = tmp_path("garbage.awf");
  {
    std::ofstream out(garbage, std::ios::binary);
    out << "not a checkpoint at all, sorry";
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(garbage),
                       doctest::Contains("does not look like a checkpoint"),
                       Error);
  try {
    load_checkpoint(garbage);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
  }
}

TEST_CASE("unsupported version is refused") {
  const std::string path = tmp_path("version2.awf");
  {
    std::ofstream out(path, std::ios::binary);
    const char magic[8] = {'A', 'W', 'F', 'C', 'K', 'P', 'T', '\0'};
    out.write(magic, 8);
    const std::int32_t v = 2;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(path),
                       doctest::Contains("version 2 is not supported"), Error);
  try {
    load_checkpoint(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::version);
  }
}

TEST_CASE("truncated files are reported as truncated") {
  ParamSet ps = awkward_params();
  Checkpoint ck;
  ck.rng_state = "12 345 678";
  append_params(ck, ps);
  const std::string full = tmp_path("full.awf");
  save_checkpoint(ck, full);

  std::ifstream in(full, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() > 40);

  for (std::size_t keep : {bytes.size() - 5, bytes.size() / 2, size_t{20}}) {
    const std::string cut = tmp_path("cut.awf");
    {
      std::ofstream out(cut, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(keep));
    }
    try {
      load_checkpoint(cut);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
  }
}

TEST_CASE("a record whose data does not match its shape cannot be saved") {
  Checkpoint ck;
  ck.records.push_back({"broken", {2, 2}, {1.0, 2.0, 3.0}});
  CHECK_THROWS_WITH_AS(save_checkpoint(ck, tmp_path("broken.awf")),
                       doctest::Contains("broken"), Error);
}
