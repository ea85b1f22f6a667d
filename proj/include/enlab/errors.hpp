#pragma once

#include <stdexcept>
#include <string>

namespace enlab {

// Typed failure: `kind` is a stable machine-readable tag ("NonRefiningPartition",
// "NotThin", ...), `what()` carries the human-readable detail.
struct Error : std::runtime_error {
    std::string kind;
    Error(std::string k, const std::string& msg)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

[[noreturn]] inline void fail(std::string kind, const std::string& msg) {
    throw Error(std::move(kind), msg);
}

} // namespace enlab
