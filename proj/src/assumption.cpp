#include "athena/assumption.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "athena/errors.hpp"

namespace athena {

std::size_t Assumption::dimension() const noexcept {
  std::size_t n = 0;
  for (const auto& in : inputs) n += in.control_points;
  return n;
}

void Assumption::validate() const {
  std::set<std::string> seen;
  for (const auto& in : inputs) {
    if (!seen.insert(in.name).second) {
      throw InvalidArgument(fmt::format("input '{}' appears twice in the assumption", in.name));
    }
    if (!(std::isfinite(in.lo) && std::isfinite(in.hi) && in.lo < in.hi)) {
      throw InvalidArgument(fmt::format("input '{}' needs a range lo < hi", in.name));
    }
    const bool arity_ok = in.kind == Interpolation::Constant
                              ? in.control_points == 1
                              : in.control_points >= min_control_points(in.kind);
    if (!arity_ok) {
      throw InvalidArgument(fmt::format("input '{}': {} interpolation cannot use {} control points",
                                        in.name, to_string(in.kind), in.control_points));
    }
  }
}

void Assumption::validate(const models::PortSpec& ports) const {
  validate();
  if (inputs.size() != ports.inputs.size()) {
    throw InvalidArgument(fmt::format("assumption covers {} inputs, plant has {}", inputs.size(),
                                      ports.inputs.size()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].name != ports.inputs[i]) {
      throw InvalidArgument(fmt::format("assumption input {} is '{}', plant port is '{}'", i,
                                        inputs[i].name, ports.inputs[i]));
    }
  }
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? at : at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(fmt::format("bad {} '{}' in assumption", what, s));
  }
  return value;
}

}  // namespace

Assumption parse_assumption(std::string_view text) {
  Assumption a;
  for (std::string_view item : split(text, ',')) {
    const auto fields = split(trim(item), ':');
    if (fields.size() != 5) {
      throw InvalidArgument(fmt::format("assumption entry '{}' is not name:kind:lo:hi:n", item));
    }
    InputAssumption in;
    in.name = std::string(trim(fields[0]));
    in.kind = parse_interpolation(trim(fields[1]));
    in.lo = parse_number<double>(fields[2], "lower bound");
    in.hi = parse_number<double>(fields[3], "upper bound");
    in.control_points = parse_number<std::size_t>(fields[4], "control-point count");
    a.inputs.push_back(std::move(in));
  }
  a.validate();
  return a;
}

std::string to_string(const Assumption& assumption) {
  std::string out;
  for (const auto& in : assumption.inputs) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}:{}:{}:{}:{}", in.name, to_string(in.kind), in.lo, in.hi,
                       in.control_points);
  }
  return out;
}

}  // namespace athena
