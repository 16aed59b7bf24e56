#pragma once

#include <stdexcept>
#include <string>

namespace llp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Automaton text input.
struct FormatError : Error { using Error::Error; };
struct ReferenceError : Error { using Error::Error; };
struct NondeterminismError : Error { using Error::Error; };

struct AlphabetError : Error { using Error::Error; };
struct InactiveEventError : Error { using Error::Error; };
struct TraceNotInLanguage : Error { using Error::Error; };

// Spec is not L_m(G)-closed, or an operation needs a prefix-closed spec.
struct SpecError : Error { using Error::Error; };
struct PrecisionError : Error { using Error::Error; };

// A supervisor tried to disable an active uncontrollable event.
struct AdmissibilityError : Error { using Error::Error; };

struct BudgetExceeded : Error {
  BudgetExceeded(const std::string& what, std::size_t partial)
      : Error(what), partial_count(partial) {}
  std::size_t partial_count;
};

struct ConfigError : Error { using Error::Error; };
struct ModelDrift : Error { using Error::Error; };

}  // namespace llp
