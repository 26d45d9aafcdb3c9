#pragma once

// Command-line front end. Exit codes: 0 all checks pass, 1 a bound is
// violated, 2 usage or configuration error.

#include <iosfwd>
#include <string>
#include <vector>

namespace sfrl::cli {

inline constexpr const char* kToolVersion = "0.1.0";

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfrl::cli
