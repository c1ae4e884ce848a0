#ifndef NBAR_ERRORS_HPP
#define NBAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nbar {

// Exit codes used by the CLI: 2 input, 3 budget, 4 internal consistency.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& m) : std::runtime_error(m) {}
};

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& m) : std::runtime_error(m) {}
};

struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace nbar

#endif
