#pragma once

// Subcommands behind the nsgvd executable. Each returns a process exit code:
//   0 success, 1 validation/config error, 2 data error, 3 verification failure.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nsgvd {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitData = 2, kExitVerification = 3 };

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;  ///< section.key=value, applied after the file
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct CommandStreams {
  std::ostream& out;  ///< summary lines
  std::ostream& err;  ///< diagnostics
};

int cmd_synth_gen(const CommandOptions& opt, CommandStreams io);
int cmd_nsg_extract(const CommandOptions& opt, CommandStreams io);
int cmd_kernel_train(const CommandOptions& opt, CommandStreams io);
int cmd_detect(const CommandOptions& opt, CommandStreams io);
int cmd_theory_verify(const CommandOptions& opt, CommandStreams io);

/// Runs a command body and maps engine exceptions to exit codes.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace nsgvd
