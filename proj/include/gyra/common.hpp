#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gyra {

// Error categories, aligned with the CLI exit codes.
enum class errc : int {
  ok = 0,
  invalid = 2,    // precondition / validation failure
  budget = 3,     // numerical budget breached (escaped mass etc.)
  cost_cap = 4,   // refused: estimated cost above cap
  internal = 5,   // invariant violation
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

// Compensated summation; mass-conservation checks are asserted at 1e-12
// on boxes with ~1e6 points, which plain summation cannot guarantee.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// FNV-1a, used for config hashes embedded in output manifests.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace gyra
