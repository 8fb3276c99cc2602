#pragma once
#include <stdexcept>
#include <string>

namespace flop {

// exit code 2
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};
// mismatched variable specs, malformed inputs
struct SpecError : ContractError {
  using ContractError::ContractError;
};
// exit code 3: identities that should hold exactly did not
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// exit code 4: precision exhausted, singular sampling, bad path
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace flop
