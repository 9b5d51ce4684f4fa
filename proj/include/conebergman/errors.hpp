#pragma once

#include <stdexcept>
#include <string>

namespace conebergman {

/// Bad shapes, empty inputs, parameters outside an operator's definition range.
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point or weight lies outside the region where a function is defined.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Quadrature or iteration did not reach its target.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class continuation_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

class unsupported_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace conebergman
