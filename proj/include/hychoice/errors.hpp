#pragma once

#include <stdexcept>
#include <string>

namespace hychoice {

// Base for all library errors; message is always human-actionable.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed CSV / spec-file text.
struct ParseError : Error {
  using Error::Error;
};

// Declared column missing, wrong kind, bad choice code, duplicate id.
struct SchemaError : Error {
  using Error::Error;
};

// Join conflicts between tables that share an id.
struct FusionError : Error {
  using Error::Error;
};

// Category value outside a dummy-encoding rule's declared set.
struct EncodingError : Error {
  using Error::Error;
};

// Model-spec structural problems (unknown parameter, missing anchor, ...).
struct SpecError : Error {
  using Error::Error;
};

// Numeric preconditions (k > distinct values, sigma = 0, dims > 10, ...).
struct DomainError : Error {
  using Error::Error;
};

}  // namespace hychoice
