#pragma once

#include <stdexcept>
#include <string>

namespace rangelab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Children-count sequence whose Lukasiewicz path does not first hit -1 at its end.
class InvalidTree : public Error {
public:
    using Error::Error;
};

class MalformedPath : public Error {
public:
    using Error::Error;
};

class MalformedWalk : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// Some weight equals 1, so the walk never branches.
class DegenerateWeights : public InvalidParams {
public:
    using InvalidParams::InvalidParams;
};

class SizeCapExceeded : public Error {
public:
    using Error::Error;
};

class TrackNotMonotone : public Error {
public:
    using Error::Error;
};

class EmptyWord : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace rangelab
