#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace metaforge {

/// Base exception for every engine, gateway and service failure.
///
/// `code()` is one of the documented machine-readable codes (for example
/// `UNKNOWN_PATH` or `UPSTREAM_TIMEOUT`); `path()` is the node or value path
/// the failure refers to, empty when not applicable.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string path = {})
        : std::runtime_error(message), code_(std::move(code)), path_(std::move(path)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string code_;
    std::string path_;
};

}  // namespace metaforge
