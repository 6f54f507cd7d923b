#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace awf {

// All randomness in the project flows through this wrapper so that one seed
// fully determines a training trajectory. Distributions are derived from the
// raw engine output by hand; the standard library distribution objects are
// implementation-defined and are not used.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0,1)
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; no cached second sample, so the engine
  // state alone captures the generator state
  double normal() {
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // integer in [0, n); n must be positive
  std::uint64_t bounded(std::uint64_t n) { return eng_() % n; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

  std::string state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }

  void restore(const std::string& s) {
    std::istringstream is(s);
    is >> eng_;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace awf
