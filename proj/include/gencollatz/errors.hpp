#pragma once

#include <stdexcept>
#include <string>

namespace gencollatz {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct ZeroInput : Error {
    using Error::Error;
};

struct DivisibleInput : Error {
    using Error::Error;
};

struct EmptyCycle : Error {
    using Error::Error;
};

struct NotClosed : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

// A stopping time was requested for a start that provably never reaches 1.
struct NonConvergent : Error {
    using Error::Error;
};

struct SpecMismatch : Error {
    using Error::Error;
};

struct SchemaMismatch : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace gencollatz
