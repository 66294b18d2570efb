#pragma once

// Subcommands of the phdae_run front end.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace phdae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int run_command(const std::filesystem::path& scenario, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);
int converge_command(const std::filesystem::path& scenario, const std::vector<double>& taus,
                     const CommandOptions& opts, std::ostream& out, std::ostream& err);
int validate_command(const std::filesystem::path& scenario, const CommandOptions& opts,
                     std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the process exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phdae::cli
