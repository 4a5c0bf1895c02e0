#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfasim {

using QueueId = std::size_t;
using RouteId = std::size_t;
using TypeId = std::size_t;
using FlowUid = std::uint64_t;

/// A flow class (j, x): every flow of this type follows route `route` and
/// carries `size` units of work. `rate` is the Poisson arrival rate.
struct FlowType {
    RouteId route = 0;
    double size = 1.0;
    double rate = 0.0;

    friend bool operator==(const FlowType&, const FlowType&) = default;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedTree : public Error {
public:
    using Error::Error;
};

class StabilityViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ResourceLimit : public Error {
public:
    using Error::Error;
};

class UnstableRegularizer : public Error {
public:
    using Error::Error;
};

// Raised when a simulator detects a state its own invariants rule out.
class InternalConsistency : public Error {
public:
    using Error::Error;
};

class EmulationInfeasible : public Error {
public:
    using Error::Error;
};

}  // namespace sfasim
