#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace freeprob::cli {

/// Seed used by `simulate` when neither --seed nor FREEPROB_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

enum ExitCode : int { ok = 0, failure = 1, invalid_input = 2, resource_limit = 3 };

/// Runs one subcommand.  `args` excludes the program name.  Reports go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freeprob::cli
