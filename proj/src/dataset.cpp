#include "dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>

#include "error.hpp"

namespace awf {

namespace {

namespace fs = std::filesystem;

bool image_extension(std::string ext) {
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

std::map<std::string, std::string> scan(const std::string& dir) {
  require(fs::is_directory(dir), ErrorKind::io, "dataset: '", dir,
          "' is not a directory");
  std::map<std::string, std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (!image_extension(p.extension().string())) continue;
    const std::string stem = p.stem().string();
    const auto [it, fresh] = stems.emplace(stem, p.string());
    require(fresh, ErrorKind::invalid_argument, "dataset: stem '", stem,
            "' appears more than once in '", dir, "'");
  }
  return stems;
}

}  // namespace

std::vector<PairPaths> pair_directories(const std::string& ir_dir,
                                        const std::string& vi_dir) {
  const auto ir = scan(ir_dir);
  const auto vi = scan(vi_dir);
  for (const auto& [stem, path] : ir)
    require(vi.count(stem) != 0, ErrorKind::invalid_argument,
            "dataset: stem '", stem, "' has no visible counterpart");
  for (const auto& [stem, path] : vi)
    require(ir.count(stem) != 0, ErrorKind::invalid_argument,
            "dataset: stem '", stem, "' has no infrared counterpart");

  std::vector<PairPaths> out;
  out.reserve(ir.size());
  for (const auto& [stem, path] : ir)
    out.push_back({stem, path, vi.at(stem)});
  return out;
}

}  // namespace awf
