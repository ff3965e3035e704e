#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fio/report_io.hpp"

namespace fio {

/// Bad config key or value; the message names the key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode { kExitPass = 0, kExitUsage = 1, kExitFail = 2 };

json default_config();

/// Defaults merged with `user` (user wins), then validated.
json resolve_config(const json& user);

/// Entry point of the command-line tool.  Output goes to out/err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fio
