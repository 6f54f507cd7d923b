#include "checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace awf {

namespace {

constexpr char kMagic[8] = {'A', 'W', 'F', 'C', 'K', 'P', 'T', '\0'};
constexpr std::int32_t kVersion = 1;
constexpr std::uint32_t kMaxString = 1u << 20;
constexpr std::uint32_t kMaxDims = 8;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(in.good(), ErrorKind::format, "checkpoint: truncated while reading ",
          what);
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const char* what) {
  const auto n = get<std::uint32_t>(in, what);
  require(n <= kMaxString, ErrorKind::format, "checkpoint: unreasonable ",
          what, " length ", n);
  std::string s(n, '\0');
  in.read(s.data(), n);
  require(in.good(), ErrorKind::format, "checkpoint: truncated while reading ",
          what);
  return s;
}

}  // namespace

void append_params(Checkpoint& ck, const ParamSet& ps) {
  for (const auto& p : ps.params()) {
    ParamRecord r;
    r.name = p->name;
    r.shape = p->shape;
    r.data = p->value;
    ck.records.push_back(std::move(r));
  }
}

void restore_params(const Checkpoint& ck, ParamSet& ps) {
  for (const auto& p : ps.params()) {
    const ParamRecord* found = nullptr;
    for (const auto& r : ck.records)
      if (r.name == p->name) {
        found = &r;
        break;
      }
    require(found != nullptr, ErrorKind::invalid_argument,
            "checkpoint: no record for parameter '", p->name, "'");
    require(found->shape == p->shape, ErrorKind::shape_mismatch,
            "checkpoint: parameter '", p->name, "' is ",
            shape_str(p->shape), " but the record holds ",
            shape_str(found->shape));
    p->value = found->data;
  }
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::io, "checkpoint: cannot write '", path, "'");
  out.write(kMagic, sizeof(kMagic));
  put(out, ck.version);
  put(out, ck.image_size);
  put(out, ck.step);
  put_string(out, ck.rng_state);
  put(out, static_cast<std::uint32_t>(ck.records.size()));
  for (const auto& r : ck.records) {
    require(static_cast<int>(r.data.size()) == numel(r.shape),
            ErrorKind::shape_mismatch, "checkpoint: record '", r.name,
            "' holds ", r.data.size(), " values for shape ",
            shape_str(r.shape));
    put_string(out, r.name);
    put(out, static_cast<std::uint32_t>(r.shape.size()));
    for (int d : r.shape) put(out, static_cast<std::int32_t>(d));
    out.write(reinterpret_cast<const char*>(r.data.data()),
              static_cast<std::streamsize>(r.data.size() * sizeof(double)));
  }
  out.flush();
  require(out.good(), ErrorKind::io, "checkpoint: write failed for '", path,
          "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "checkpoint: cannot open '", path, "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          ErrorKind::format, "checkpoint: '", path,
          "' does not look like a checkpoint file");

  Checkpoint ck;
  ck.version = get<std::int32_t>(in, "version");
  require(ck.version == kVersion, ErrorKind::version,
          "checkpoint: version ", ck.version, " is not supported (expected ",
          kVersion, ")");
  ck.image_size = get<std::int32_t>(in, "image size");
  ck.step = get<std::int64_t>(in, "step");
  ck.rng_state = get_string(in, "rng state");
  const auto count = get<std::uint32_t>(in, "record count");
  require(count <= kMaxString, ErrorKind::format,
          "checkpoint: unreasonable record count ", count);
  ck.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ParamRecord r;
    r.name = get_string(in, "record name");
    const auto ndim = get<std::uint32_t>(in, "rank");
    require(ndim >= 1 && ndim <= kMaxDims, ErrorKind::format,
            "checkpoint: record '", r.name, "' has rank ", ndim);
    r.shape.resize(ndim);
    for (auto& d : r.shape) {
      d = get<std::int32_t>(in, "dimension");
      require(d > 0, ErrorKind::format, "checkpoint: record '", r.name,
              "' has dimension ", d);
    }
    const int n = numel(r.shape);
    r.data.resize(static_cast<std::size_t>(n));
    in.read(reinterpret_cast<char*>(r.data.data()),
            static_cast<std::streamsize>(r.data.size() * sizeof(double)));
    require(in.good(), ErrorKind::format, "checkpoint: truncated data in '",
            r.name, "'");
    ck.records.push_back(std::move(r));
  }
  return ck;
}

}  // namespace awf
