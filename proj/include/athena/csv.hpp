#pragma once

#include <filesystem>
#include <iosfwd>

#include "athena/trace.hpp"

namespace athena::io {

/// Header `time,<ch>,...`, one row per sample. Numbers use the shortest text
/// that reads back to the same double.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Inverse of write_trace_csv. The grid is rebuilt from the last time and the
/// row count; rows must sit on that uniform grid. Throws ParseError (offset is
/// the 0-based line number) or InvalidArgument.
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace athena::io
