#pragma once

#include <string>
#include <string_view>

namespace rfk {

/// Boundary parameter h of the condition du/dnu + h u = 0.
/// A finite value (units 1/length), or Dirichlet (h = +inf, u = 0).
class RobinParam {
 public:
  constexpr RobinParam() = default;

  static constexpr RobinParam finite(double h) { return RobinParam(h, false); }
  static constexpr RobinParam dirichlet() { return RobinParam(0.0, true); }
  static constexpr RobinParam neumann() { return RobinParam(0.0, false); }

  constexpr bool is_dirichlet() const { return dirichlet_; }
  constexpr bool is_neumann() const { return !dirichlet_ && value_ == 0.0; }
  constexpr bool is_finite() const { return !dirichlet_; }

  /// Finite value; 0 for Dirichlet (Dirichlet never enters a formula as a number).
  constexpr double value() const { return dirichlet_ ? 0.0 : value_; }

  /// -1, 0 or +1; Dirichlet counts as +1.
  constexpr int sign() const {
    if (dirichlet_) return 1;
    return (value_ > 0.0) - (value_ < 0.0);
  }

  /// Largest finite magnitude used by scan windows and shift heuristics.
  constexpr double finite_magnitude() const { return dirichlet_ ? 0.0 : (value_ < 0 ? -value_ : value_); }

  friend constexpr bool operator==(const RobinParam&, const RobinParam&) = default;

  /// "inf" for Dirichlet, shortest round-trip decimal otherwise.
  std::string to_string() const;

  /// Accepts "inf", "+inf", "dirichlet", or a finite decimal. Throws rfk::Error(Parse).
  static RobinParam parse(std::string_view text);

 private:
  constexpr RobinParam(double v, bool d) : value_(v), dirichlet_(d) {}

  double value_ = 0.0;
  bool dirichlet_ = false;
};

struct RobinPair {
  RobinParam inner;
  RobinParam outer;

  /// Sign of h_in * h_out with Dirichlet as +inf: -1, 0 or +1.
  int product_sign() const { return inner.sign() * outer.sign(); }
  bool is_pure_neumann() const { return inner.is_neumann() && outer.is_neumann(); }

  friend bool operator==(const RobinPair&, const RobinPair&) = default;
};

}  // namespace rfk
