// Error categories shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace hcp {

/// Caller supplied malformed or out-of-range input.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A configured computation budget (enumeration size, samples, time) ran out.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hcp
