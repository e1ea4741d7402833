#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument or parameter set violates its documented invariants.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A data file is malformed. `row()` is the 1-based data row when known, 0 otherwise.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t row = 0)
        : Error(row ? what + " (row " + std::to_string(row) + ")" : what), message_(what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

    /// Same error with `prefix` (typically a file name) prepended.
    FormatError prefixed(const std::string& prefix) const { return FormatError(prefix + message_, row_); }

private:
    std::string message_;
    std::size_t row_;
};

/// A scenario field failed validation. `path()` is a dotted field path such as `menu.pv_kw`.
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A pipeline stage was asked to run before the artifact it consumes exists.
class DependencyError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

inline bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace detail
}  // namespace hres
