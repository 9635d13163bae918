#pragma once

#include <stdexcept>
#include <string>

namespace edgereg {

/// Malformed or inconsistent input data (files, shapes, ranges).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite loss or gradient encountered during optimization.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

} // namespace edgereg
