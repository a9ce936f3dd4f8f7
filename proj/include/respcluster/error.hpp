#pragma once

#include <stdexcept>
#include <string>

namespace respcluster {

// Thrown for invalid input data or configuration. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace respcluster

namespace respcluster {

// Affinity propagation ended without any exemplar. Grid runs report it per
// cell instead of aborting.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace respcluster
