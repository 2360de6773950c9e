#pragma once

// Structured output shared by reports and the wire format. Documents are
// nlohmann::ordered_json values; emission is done here so that every float is
// written with 17 significant digits (the library's own dump picks the
// shortest round-trip form instead).

#include <string>

#include <json.hpp>

namespace qbc {

using Document = nlohmann::ordered_json;

/// Single-line JSON, floats as %.17g. Non-finite floats are written as null.
std::string to_json_line(const Document& doc);

/// Indented JSON with the same number formatting.
std::string to_json_pretty(const Document& doc);

/// Flat "dotted.key = value" lines, one per leaf.
std::string to_text(const Document& doc);

std::string format_double(double x);

}  // namespace qbc
