#pragma once

#include <iosfwd>

namespace ttc::cli {

/// Process exit codes. Every error class has its own code.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,      // unknown flag, malformed or missing argument
  kValue = 3,      // argument out of its admissible range
  kDimension = 4,  // shapes of inputs disagree
  kFormat = 5,     // malformed input file
  kIo = 6,         // file could not be opened or written
};

/// Runs one subcommand (gen, sample, complete, tsvd, phase, metrics).
/// Regular output goes to `out`; failures print one line to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ttc::cli
