// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace spdlog {
class logger;
}

namespace sonotrack {

/// Raised for every contract violation or I/O failure inside the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shared library logger. Writes to stderr only.
std::shared_ptr<spdlog::logger> logger();

} // namespace sonotrack
