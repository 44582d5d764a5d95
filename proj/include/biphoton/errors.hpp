#ifndef BIPHOTON_ERRORS_HPP
#define BIPHOTON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace biphoton {

// Bad or inconsistent user configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical contract was violated: grid too coarse/narrow, aperture
// truncation, degenerate state, unconverged fit fed downstream
// (CLI exit code 3).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// File format / filesystem failures (CLI exit code 4).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace biphoton

#endif
