#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace s2oct {

// Error categories used across the library. All carry a plain message;
// callers that need to distinguish catch the concrete type.
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DesignError : std::runtime_error {
    explicit DesignError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EnvironmentError : std::runtime_error {
    explicit EnvironmentError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolutionIntegrityError : std::runtime_error {
    explicit SolutionIntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ClassLabel : std::uint8_t { A, B };

inline char class_char(ClassLabel c) { return c == ClassLabel::A ? 'A' : 'B'; }

}  // namespace s2oct
