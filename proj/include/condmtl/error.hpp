#ifndef CONDMTL_ERROR_HPP
#define CONDMTL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace condmtl {

/// Base for all engine failures so callers can catch everything at once.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tensor/vector dimension mismatch.
struct ShapeError : EngineError {
    using EngineError::EngineError;
};

/// An operation that needs at least one (relevant) example got none.
struct EmptyBatchError : EngineError {
    using EngineError::EngineError;
};

/// Class weighting requested for a class with zero examples.
struct DegenerateClassError : EngineError {
    using EngineError::EngineError;
};

/// Invalid architecture or experiment configuration.
struct ConfigError : EngineError {
    using EngineError::EngineError;
};

/// Operation not defined for this model variant.
struct VariantError : EngineError {
    using EngineError::EngineError;
};

/// Malformed input file (parse, validation, or schema problems).
struct DataFormatError : EngineError {
    using EngineError::EngineError;
};

/// A row or value that could not be parsed.
struct ParseError : DataFormatError {
    using DataFormatError::DataFormatError;
};

/// Well-formed input violating a dataset invariant.
struct ValidationError : DataFormatError {
    using DataFormatError::DataFormatError;
};

/// File structure inconsistent with the declared schema.
struct SchemaError : DataFormatError {
    using DataFormatError::DataFormatError;
};

/// Model/config persistence failures (corrupt file, version mismatch).
struct PersistenceError : EngineError {
    using EngineError::EngineError;
};

}  // namespace condmtl

#endif  // CONDMTL_ERROR_HPP
