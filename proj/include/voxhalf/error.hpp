#pragma once

#include <stdexcept>
#include <string>

namespace voxhalf {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parity disagreement between the two casting directions on some column.
struct NonWatertightMeshError : std::runtime_error {
    explicit NonWatertightMeshError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh has neither texture coordinates + texture nor vertex colors.
struct MissingColorSourceError : std::runtime_error {
    explicit MissingColorSourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Distance mask offset count exceeds the configured budget.
struct MaskTooLargeError : std::runtime_error {
    explicit MaskTooLargeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace voxhalf
