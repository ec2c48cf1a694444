#pragma once

#include <stdexcept>
#include <string>

namespace crux {

// Malformed input files, unknown formats, bad flag values. CLI exit code 1.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A structural guarantee the planner is supposed to uphold was observed
// broken (e.g. an empty meet set). CLI exit code 2.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace crux
