#pragma once

// Command-line front end. Kept as a library so tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qbc::cli {

inline constexpr std::uint64_t default_seed = 20240917;

enum Exit : int { ok = 0, check_failed = 1, usage = 2 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbc::cli
