#pragma once

#include <stdexcept>
#include <string>

namespace treelab {

// All recoverable failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class BandEdgeError : public Error {
public:
    using Error::Error;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class IllConditionedError : public Error {
public:
    using Error::Error;
};

class DegenerateMapError : public Error {
public:
    using Error::Error;
};

class ZeroGammaError : public Error {
public:
    using Error::Error;
};

class AlphaRangeError : public Error {
public:
    using Error::Error;
};

class BandViolationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Configuration errors carry the JSON path of the offending field.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class RangeError : public SchemaError {
public:
    using SchemaError::SchemaError;
};

}  // namespace treelab
