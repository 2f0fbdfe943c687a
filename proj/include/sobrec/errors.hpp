#pragma once

#include <stdexcept>
#include <string>

namespace sobrec {

// Configuration that can never run (budget below the operator's feasibility
// bound, impossible constants). CLI maps this to exit code 3.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed flags or config files. CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sobrec
