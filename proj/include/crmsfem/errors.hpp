#pragma once

#include <stdexcept>
#include <string>

namespace crmsfem {

struct PackingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NestingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InconsistentBC : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProvenanceMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace crmsfem
