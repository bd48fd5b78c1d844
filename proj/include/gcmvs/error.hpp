#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcmvs {

/// Singular or otherwise unusable camera matrices.
class GeometryError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that are well-formed but cannot be evaluated (zero reference
/// depth, empty supervision, unnormalized distributions, ...).
class ComputeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file content. `location` is a byte offset for binary formats
/// and a 1-based line number for text formats.
class ParseError : public std::runtime_error
{
public:
    enum class Unit { Byte, Line };

    ParseError(const std::string& what, std::size_t location, Unit unit)
        : std::runtime_error(what + (unit == Unit::Byte ? " (at byte " : " (at line ") +
                             std::to_string(location) + ")"),
          location_(location), unit_(unit)
    {}

    std::size_t location() const noexcept { return location_; }
    Unit unit() const noexcept { return unit_; }

private:
    std::size_t location_;
    Unit unit_;
};

} // namespace gcmvs
