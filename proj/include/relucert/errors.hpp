#pragma once

#include <stdexcept>
#include <string>

namespace relucert {

/// Malformed input files or configuration values.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested method cannot be applied to the given instance
/// (non-omnidirectional frame for PBE, enumeration cap exceeded, ...).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside an otherwise applicable method.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relucert
