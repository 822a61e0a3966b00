#pragma once

#include <stdexcept>
#include <string>

namespace geodc {

/// Root of every error the simulator raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file is structurally wrong: missing column, bad JSON shape.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input parsed, but its contents violate an invariant.
class DataError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Query outside the covered time window of a series.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Caller broke the step/reset contract (action length, action value).
class ProtocolError : public Error {
public:
    using Error::Error;
};

}  // namespace geodc
