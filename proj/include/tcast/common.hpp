#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tcast {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tensor / matrix primitives
struct ColumnMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// solvers
struct NegativeInput : Error { using Error::Error; };
struct NonFiniteEncountered : Error { using Error::Error; };

// lstm
struct StaleCache : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };

// pipeline
struct SeriesTooShort : Error { using Error::Error; };
struct HistoryMismatch : Error { using Error::Error; };
struct NoForecast : Error { using Error::Error; };

// ingest
struct EmptyAfterFilter : Error { using Error::Error; };
struct NegativeValue : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptySeries : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// file formats
struct IoError : Error { using Error::Error; };

/// Derives an independent RNG seed for a named substream of `root`.
/// Same (root, label) always yields the same value.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

}  // namespace tcast
