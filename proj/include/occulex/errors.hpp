#pragma once

#include <stdexcept>
#include <string>

namespace occulex {

// Base of every error thrown by the library. The CLI maps each subclass to a
// distinct exit code.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_argument : public error {
public:
    using error::error;
};

// A configured resource budget (state count, signature entries, word space,
// sample count) would be exceeded.
class budget_exceeded : public error {
public:
    using error::error;
};

// An internal invariant failed; signals a construction bug rather than bad input.
class invariant_violation : public error {
public:
    using error::error;
};

// Asymptotic operations require at least two distinct pattern letters.
class unsupported_pattern : public error {
public:
    using error::error;
};

class cache_invalid : public error {
public:
    using error::error;
};

} // namespace occulex
