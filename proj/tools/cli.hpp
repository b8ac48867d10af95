#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reebkit::cli {

/// Exit statuses.
enum Status : int { Ok = 0, AuditFailed = 1, Usage = 2, ParseError = 3, PrecisionError = 4 };

/// Runs one command line (without the program name). Main output goes to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace reebkit::cli
