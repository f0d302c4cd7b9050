#include "athena/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "athena/errors.hpp"

namespace athena::io {

void write_trace_csv(std::ostream& out, const Trace& trace) {
  std::string line = "time";
  for (const auto& name : trace.names()) line += "," + name;
  out << line << '\n';
  std::vector<std::span<const double>> cols;
  for (const auto& name : trace.names()) cols.push_back(trace.channel(name));
  const TimeGrid& grid = trace.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    line = fmt::format("{}", grid.time(i));
    for (const auto& col : cols) line += fmt::format(",{}", col[i]);
    out << line << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", path.string()));
  write_trace_csv(out, trace);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("bad number '{}' on line {}", s, line + 1), line);
  }
  return v;
}

}  // namespace

Trace read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.empty() || header[0] != "time") {
    throw ParseError("CSV header must start with 'time'", 0);
  }
  const std::size_t ncols = header.size();
  std::vector<double> times;
  std::vector<std::vector<double>> cols(ncols - 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != ncols) {
      throw ParseError(
          fmt::format("line {} has {} fields, header has {}", lineno + 1, fields.size(), ncols),
          lineno);
    }
    times.push_back(to_double(fields[0], lineno));
    for (std::size_t c = 1; c < ncols; ++c) cols[c - 1].push_back(to_double(fields[c], lineno));
  }
  if (times.size() < 2) throw InvalidArgument("CSV needs at least two rows");
  if (times.front() != 0.0) throw InvalidArgument("CSV time column must start at 0");
  const double end = times.back();
  const TimeGrid grid(end, end / static_cast<double>(times.size() - 1));
  if (grid.size() != times.size()) throw InvalidArgument("CSV rows do not form a uniform grid");
  const double tol = kTimeTolerance * std::max(1.0, end);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - grid.time(i)) > tol) {
      throw InvalidArgument(fmt::format("CSV time {} is off the uniform grid (row {})", times[i], i));
    }
  }
  Trace trace(grid);
  for (std::size_t c = 1; c < ncols; ++c) trace.add(header[c], std::move(cols[c - 1]));
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound(fmt::format("cannot open '{}'", path.string()));
  return read_trace_csv(in);
}

}  // namespace athena::io
