#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace torsion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFailed = 1;
inline constexpr int kExitConstructionError = 2;
inline constexpr int kExitUsage = 64;

// Default for --out when the flag is absent.
inline constexpr const char* kOutputDirEnv = "TORSION_LANDSCAPE_OUT";
inline constexpr const char* kDefaultOutputDir = "torsion-landscape-out";

/// Runs `torsion-landscape <args...>` (program name excluded) and returns the
/// process exit code. Reports go to files or, with --json -, to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torsion::cli
