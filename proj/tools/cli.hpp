#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specklepuf::cli {

inline constexpr int kExitOk = 0;      // success, or accept for `verify`
inline constexpr int kExitReject = 1;  // reject, or failed round trip for `demo`
inline constexpr int kExitError = 2;

/// Entry point shared by the executable and the tests. `args` excludes
/// the program name. Results go to `out` as JSON, errors to `err` as a
/// JSON object {"error": code, "message": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specklepuf::cli
