#pragma once

#include <stdexcept>
#include <string>

namespace anobench {

// Error classes map 1:1 onto the CLI exit codes (see tools/).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration.
struct ConfigError : Error {
    using Error::Error;
};

// A required upstream artifact is missing or unreadable.
struct MissingInputError : Error {
    using Error::Error;
};

// Malformed input data: column grammar, timestamps, CSV rows, duplicates.
struct DataError : Error {
    using Error::Error;
};

// Column-name grammar violations (separator in a field, bad token).
struct GrammarError : DataError {
    using DataError::DataError;
};

// Training aborted because the loss became non-finite.
struct TrainingDivergence : Error {
    using Error::Error;
};

// Failure while writing outputs.
struct IoError : Error {
    using Error::Error;
};

}  // namespace anobench
