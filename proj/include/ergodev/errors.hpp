#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergodev {

// Bad user input or unsupported parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite state or other failure during a run. Maps to CLI exit code 3.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, std::uint64_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    std::uint64_t step() const { return step_; }

private:
    std::uint64_t step_;
};

}  // namespace ergodev
