#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace awf {

// Error kinds map one-to-one onto the C API status codes.
enum class ErrorKind {
  invalid_argument,
  shape_mismatch,
  io,
  format,
  version,
  numeric,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

namespace detail {
template <class... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}
}  // namespace detail

template <class... Args>
[[noreturn]] void fail(ErrorKind kind, const Args&... args) {
  throw Error(kind, detail::concat(args...));
}

template <class... Args>
void require(bool cond, ErrorKind kind, const Args&... args) {
  if (!cond) fail(kind, args...);
}

}  // namespace awf
