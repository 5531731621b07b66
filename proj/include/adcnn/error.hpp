#ifndef ADCNN_ERROR_HPP
#define ADCNN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace adcnn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor/image dimensions do not agree with the operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An option or hyperparameter violates its invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file is not in the expected on-disk format.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The data itself makes the requested operation impossible
/// (empty class, no valid placement, degenerate ROC input, divergence).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace adcnn

#endif // ADCNN_ERROR_HPP
