#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace torsflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitParse = 3;

/// Full command line, argv[0] included. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torsflow::cli
