#pragma once

#include <stdexcept>
#include <string>

namespace mc {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid geometry input (overlapping fins, degenerate rectangle, ...).
struct GeometryError : Error {
    using Error::Error;
};

/// Unsupported or malformed mesh file.
struct FormatError : Error {
    using Error::Error;
};

/// Boundary edge without a physical tag, or an unknown tag.
struct TaggingError : Error {
    using Error::Error;
};

/// A mesh deformation produced a cell with non-positive signed area.
struct InversionError : Error {
    int worst_cell = -1;
    InversionError(const std::string& msg, int cell) : Error(msg), worst_cell(cell) {}
};

/// The flow map left the admitted regime (det DPhi_t <= 0.1).
struct DeformationError : Error {
    using Error::Error;
};

/// Singular or structurally deficient linear system.
struct SolverError : Error {
    using Error::Error;
};

/// Bad run configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace mc
