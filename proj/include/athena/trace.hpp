#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "athena/signals.hpp"

namespace athena {

/// Named channels sampled on a common TimeGrid. Channel order is insertion
/// order, which is also the column order used when a trace is written out.
class Trace {
 public:
  explicit Trace(TimeGrid grid) : grid_(grid) {}

  /// Appends a channel; throws InvalidArgument on a duplicate name, a length
  /// mismatch or non-finite values.
  void add(std::string name, std::vector<double> values);
  void add(std::string name, const Signal& signal);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t channel_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool has(std::string_view name) const;
  /// Throws MissingChannel when absent.
  std::span<const double> channel(std::string_view name) const;
  Signal signal(std::string_view name) const;

  bool operator==(const Trace& other) const {
    return grid_ == other.grid_ && names_ == other.names_ && data_ == other.data_;
  }

 private:
  TimeGrid grid_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace athena
