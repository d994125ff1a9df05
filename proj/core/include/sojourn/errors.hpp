#pragma once

#include <stdexcept>
#include <string>

namespace sojourn {

// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation could not be carried out (embedding failure, degenerate fit, ...).
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// The circulant embedding of a covariance has a spectrum that is too negative to clip.
class EmbeddingError : public NumericError {
public:
    EmbeddingError(const std::string& what, double most_negative_eigenvalue)
        : NumericError(what), most_negative_(most_negative_eigenvalue) {}

    [[nodiscard]] double most_negative_eigenvalue() const noexcept { return most_negative_; }

private:
    double most_negative_;
};

}  // namespace sojourn
