#pragma once

// Byte-stable output helpers: fixed 12-significant-digit floats, sorted JSON
// keys, and atomic file replacement.

#include <json.hpp>

#include <string>

namespace vwak {

using Json = nlohmann::json;

/// printf("%.12g").
std::string format_double(double value);
/// value rounded to 12 significant digits (so JSON output is stable).
double round12(double value);

/// Writes `content` to a temporary sibling and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

/// JSON dump with two-space indentation and a trailing newline.
std::string dump_json(const Json& value);

/// CSV text or a JSON document; JSON floats must already be rounded.
void write_report(const std::string& data, const std::string& path);
void write_report(const Json& data, const std::string& path);

} // namespace vwak
