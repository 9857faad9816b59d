#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tarpath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `tarpath` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tarpath::cli
