#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace awf {

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty(), ErrorKind::format, "config: key '",
          key, "' needs an integer, got '", v, "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty(), ErrorKind::format, "config: key '",
          key, "' needs a number, got '", v, "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  fail(ErrorKind::format, "config: key '", key,
       "' needs 0/1/true/false, got '", v, "'");
}

}  // namespace

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    require(eq != std::string::npos, ErrorKind::format, "config line ",
            lineno, ": expected 'key = value', got '", stripped, "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    require(!key.empty(), ErrorKind::format, "config line ", lineno,
            ": empty key");

    if (key == "epochs")
      cfg.epochs = static_cast<int>(to_int(key, value));
    else if (key == "n_critic")
      cfg.n_critic = static_cast<int>(to_int(key, value));
    else if (key == "batch_size")
      cfg.batch_size = static_cast<int>(to_int(key, value));
    else if (key == "lr_g")
      cfg.lr_g = to_double(key, value);
    else if (key == "lr_d")
      cfg.lr_d = to_double(key, value);
    else if (key == "lambda")
      cfg.weights.lambda = to_double(key, value);
    else if (key == "gamma")
      cfg.weights.gamma = to_double(key, value);
    else if (key == "alpha")
      cfg.weights.alpha = to_double(key, value);
    else if (key == "beta")
      cfg.weights.beta = to_double(key, value);
    else if (key == "image_size")
      cfg.image_size = static_cast<int>(to_int(key, value));
    else if (key == "rng_seed")
      cfg.rng_seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "checkpoint_every")
      cfg.checkpoint_every = static_cast<int>(to_int(key, value));
    else if (key == "ssim_global")
      cfg.ssim_global = to_bool(key, value);
    else if (key == "scd_differences")
      cfg.scd_differences = to_bool(key, value);
    else
      fail(ErrorKind::format, "config line ", lineno, ": unknown key '", key,
           "'");
  }
  validate_config(cfg);
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "config: cannot open '", path, "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config(buf.str());
}

void validate_config(const TrainConfig& cfg) {
  require(cfg.epochs >= 1, ErrorKind::invalid_argument,
          "config: epochs must be >= 1, got ", cfg.epochs);
  require(cfg.n_critic >= 1, ErrorKind::invalid_argument,
          "config: n_critic must be >= 1, got ", cfg.n_critic);
  require(cfg.batch_size >= 1, ErrorKind::invalid_argument,
          "config: batch_size must be >= 1, got ", cfg.batch_size);
  require(cfg.lr_g >= 0.0 && cfg.lr_d >= 0.0, ErrorKind::invalid_argument,
          "config: learning rates must be non-negative");
  require(cfg.image_size >= 32 && cfg.image_size % 2 == 0,
          ErrorKind::invalid_argument,
          "config: image_size must be even and >= 32, got ", cfg.image_size);
  require(cfg.checkpoint_every >= 0, ErrorKind::invalid_argument,
          "config: checkpoint_every must be >= 0, got ",
          cfg.checkpoint_every);
  const LossWeights& w = cfg.weights;
  require(w.lambda >= 0.0 && w.gamma >= 0.0 && w.alpha >= 0.0 &&
              w.beta >= 0.0,
          ErrorKind::invalid_argument,
          "config: loss weights must be non-negative");
}

}  // namespace awf
