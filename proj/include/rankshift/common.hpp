#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rankshift {

using NodeIndex = std::uint32_t;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input that makes a whole file or stream unusable.
class InputError : public Error {
public:
    using Error::Error;
};

/// Caller passed arguments outside an operation's domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Ordering used for external node ids everywhere a deterministic id order is
/// needed. Two all-digit ids compare numerically ("2" < "10"); anything else
/// compares bytewise.
bool id_less(std::string_view a, std::string_view b) noexcept;

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal diagnostics and returns the previous one.
/// The default handler writes "warning: <msg>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace rankshift
