#pragma once
// Subcommands behind the sjde executable. Each returns a process exit code:
// 0 success, 2 validation error, 3 cap-hit or convergence failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace sjde {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitFailure = 3;

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::string> out;
  std::string policy = "ao";
  std::optional<std::string> coeffs_path;
  std::optional<std::size_t> threads;
};

int cmd_design(const CommandOptions& options, std::ostream& out, std::ostream& log);
int cmd_evaluate(const CommandOptions& options, std::ostream& out, std::ostream& log);
int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream& log);
int cmd_policy_map(const CommandOptions& options, std::ostream& out, std::ostream& log);
int cmd_diagnostics(const CommandOptions& options, std::ostream& out, std::ostream& log);

// Dispatches by name and maps exceptions to exit codes, printing the message to `log`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& out,
                std::ostream& log);

}  // namespace sjde
