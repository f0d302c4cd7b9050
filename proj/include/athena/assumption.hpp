#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "athena/models.hpp"
#include "athena/signals.hpp"

namespace athena {

/// Constraint on one input port: interpolation kind, closed value range and
/// number of evenly spaced control points.
struct InputAssumption {
  std::string name;
  Interpolation kind = Interpolation::Pchip;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t control_points = 1;

  bool operator==(const InputAssumption&) const = default;
};

/// The search box: one InputAssumption per plant input, in port order.
struct Assumption {
  std::vector<InputAssumption> inputs;

  /// Total number of control values (length of a parameter vector).
  std::size_t dimension() const noexcept;

  /// Throws InvalidArgument on empty ranges or arity violations.
  void validate() const;
  /// Additionally checks that port names and order match the plant.
  void validate(const models::PortSpec& ports) const;

  bool operator==(const Assumption&) const = default;
};

/// Parses "name:kind:lo:hi:n[,name:kind:lo:hi:n...]",
/// e.g. "throttle:pchip:0:1:7,brake:pchip:0:1:3".
Assumption parse_assumption(std::string_view text);
std::string to_string(const Assumption& assumption);

}  // namespace athena
