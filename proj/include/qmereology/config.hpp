#pragma once

#include "qmereology/mereology.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qm {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, int line, const std::string& message)
        : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct ExperimentConfig {
    OscillatorModel model;
    double scramble = 0.0;              // theta norm of a random rotation applied to H before sweeping; 0 = off
    std::uint64_t scramble_seed = 1;
    SweepConfig sweep;
    std::string output_directory = "qmereology_out";
    bool emit_plots = false;
};

// INI-style text: [section] headers, key = value lines, '#' or ';' comments.
// Unknown sections or keys and malformed values raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

// Every key with its resolved value, in a form parse_config accepts.
std::string resolved_config_text(const ExperimentConfig& config);

}  // namespace qm
