#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tessera {

/// Base class for all tessera errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error(what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(what) {}
};

class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& what) : Error(what) {}
};

/// A geohash cell on the lat +-90 boundary has no neighbors in some compass
/// directions; the error reports which ones are missing.
class PartialNeighborhoodError : public Error {
public:
    PartialNeighborhoodError(const std::string& what, std::vector<std::string> missing)
        : Error(what), missing_directions(std::move(missing)) {}

    std::vector<std::string> missing_directions;
};

/// Raised when training diverges; carries the epoch and learning rate.
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, int epoch_, double lr_)
        : Error(what), epoch(epoch_), lr(lr_) {}

    int epoch;
    double lr;
};

}  // namespace tessera
