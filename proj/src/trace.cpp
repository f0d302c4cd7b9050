#include "athena/trace.hpp"

#include <algorithm>
#include <cmath>

#include "athena/errors.hpp"

namespace athena {

void Trace::add(std::string name, std::vector<double> values) {
  if (name.empty()) throw InvalidArgument("channel name must not be empty");
  if (index_.contains(name)) throw InvalidArgument("duplicate channel '" + name + "'");
  if (values.size() != grid_.size()) {
    throw InvalidArgument("channel '" + name + "' has " + std::to_string(values.size()) +
                          " samples, grid has " + std::to_string(grid_.size()));
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("channel '" + name + "' has non-finite values");
  }
  index_.emplace(name, names_.size());
  names_.push_back(std::move(name));
  data_.push_back(std::move(values));
}

void Trace::add(std::string name, const Signal& signal) {
  if (!(signal.grid() == grid_)) throw InvalidArgument("signal grid differs from trace grid");
  add(std::move(name), std::vector<double>(signal.values().begin(), signal.values().end()));
}

bool Trace::has(std::string_view name) const { return index_.contains(std::string(name)); }

std::span<const double> Trace::channel(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw MissingChannel(std::string(name));
  return data_[it->second];
}

Signal Trace::signal(std::string_view name) const {
  const auto values = channel(name);
  return Signal(grid_, std::vector<double>(values.begin(), values.end()));
}

}  // namespace athena
