#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace mkdual {

// Extended real number in [-inf, +inf]. NaN is never constructible.
//
// Subtraction uses the one-sided convention inf - inf = inf, extended to
// (-inf) - (-inf) = +inf, so that c(x,y) - a(x) - b(y) never under-reports a
// cost. The full table for ext_sub(a, b):
//
//            b=-inf   b finite   b=+inf
//   a=-inf    +inf     -inf       -inf
//   a fin     +inf     a-b        -inf
//   a=+inf    +inf     +inf       +inf
class ExtReal {
 public:
  constexpr ExtReal() = default;
  // Implicit on purpose: finite literals and doubles read naturally.
  ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw std::domain_error("ExtReal: NaN is not an extended real");
  }

  static ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  [[nodiscard]] double value() const { return v_; }
  [[nodiscard]] bool is_finite() const { return std::isfinite(v_); }
  [[nodiscard]] bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  [[nodiscard]] bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Subtraction on raw doubles that may hold +-inf; see the table above.
inline double ext_sub(double a, double b) {
  if (a == kInf || b == -kInf) return kInf;
  if (a == -kInf || b == kInf) return -kInf;
  return a - b;
}

inline ExtReal ext_sub(ExtReal a, ExtReal b) { return ExtReal(ext_sub(a.value(), b.value())); }

// Addition with (+inf) + (-inf) = +inf, the same conservative resolution.
inline double ext_add(double a, double b) {
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

inline ExtReal ext_add(ExtReal a, ExtReal b) { return ExtReal(ext_add(a.value(), b.value())); }

// mass * value with 0 * (+-inf) = 0. Mass is a nonnegative real.
inline double mass_times(double mass, double v) { return mass == 0.0 ? 0.0 : mass * v; }

std::string to_string(ExtReal v);

}  // namespace mkdual
