#pragma once

#include <stdexcept>
#include <string>

namespace segsolve {

// Failure taxonomy, mirrored by the CLI exit codes: bad problem definitions
// exit 2, numerical breakdowns exit 3, IO trouble exit 1. Contract misuse
// (out-of-range indices, boundary nodes passed to interior-only operators,
// shape mismatches) gets its own type so tests can tell programming errors
// apart from bad user input.

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Oracle instances beyond the enumeration cap are refused, never approximated.
struct SizeError : ProblemError {
  using ProblemError::ProblemError;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace segsolve
