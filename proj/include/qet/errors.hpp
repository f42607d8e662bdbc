#pragma once

#include <stdexcept>
#include <string>

namespace qet {

// Base for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke a documented precondition (dimension mismatch, non-power-of-two
// grid, projector that does not commute where commutation is required, ...).
class contract_error : public error {
public:
    using error::error;
};

// Scenario input failed validation; the message names the offending field.
class validation_error : public error {
public:
    using error::error;
};

// An eigensolver failed or a quantity that must be real came out complex.
class numerical_error : public error {
public:
    using error::error;
};

// A dimension cap or memory guard was exceeded.
class resource_error : public error {
public:
    using error::error;
};

// The event probability is below the probability floor: conditional
// statistics are undefined.
class event_never_happens : public error {
public:
    using error::error;
};

// A file could not be read or written.
class io_error : public error {
public:
    using error::error;
};

} // namespace qet
