#pragma once

#include <stdexcept>
#include <string>

namespace tefkit {

// Malformed input: bad JSON, unknown ids, inconsistent instances. CLI exit 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver was handed an instance outside its preference class. CLI exit 2.
struct ClassError : std::runtime_error {
    explicit ClassError(const std::string& msg) : std::runtime_error(msg) {}
};

// Node budget or brute-force cap exceeded. CLI exit 3.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematically ill-defined request (e.g. p-mean of nonpositive utility). CLI exit 2.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A postcondition the theory guarantees failed; signals a construction bug.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace tefkit
