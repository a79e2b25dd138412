#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dkit/errors.hpp"

namespace dkit::cli {

/// Process exit codes; one per error kind.
enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kIrregularPencil = 2,
  kInconsistentInitialCondition = 3,
  kUnresolvableSpectrum = 4,
  kInputHorizonTooShort = 5,
  kOracleDisagreement = 6,
  kChainConstructionFailure = 7,
};

int exit_code_for(ErrorKind kind);

/// Runs `dkit <subcommand> ...`; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dkit::cli
