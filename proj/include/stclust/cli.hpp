#pragma once

#include <string>
#include <vector>

namespace stclust {

/// Entry point behind the stclust binary. Returns the process exit code:
/// 0 on success, 2 on usage/config errors, 1 on runtime failures.
int run_cli(int argc, const char* const* argv);

/// Convenience for in-process tests.
int run_cli(const std::vector<std::string>& args);

/// FNV-1a 64-bit digest of a file's bytes, as a hex string.
std::string file_digest(const std::string& path);

} // namespace stclust
