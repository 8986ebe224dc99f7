#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "heatduct/config.hpp"

namespace heatduct {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitDivergence = 3,
  kExitCertificate = 4,
  kExitInternal = 5,
};

struct RunOptions {
  std::string subcommand;  // solve | certify | spectrum | mms
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Runs one subcommand and writes its artifacts (JSON, CSV, VTK) into the
/// output directory. Progress goes to `log`, problems to `err`.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

/// Same, with an already parsed configuration.
int run(const std::string& subcommand, const RunConfig& config, std::ostream& log,
        std::ostream& err);

}  // namespace heatduct
