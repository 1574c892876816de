#pragma once

#include <stdexcept>
#include <string>

namespace circlab {

/// Bad input: wrong shape, violated precondition, malformed config.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A decomposition or iteration that did not reach its stopping criterion.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation whose declared size or enumeration budget would be exceeded.
class BudgetExceeded : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidArgument(what);
}

} // namespace detail
} // namespace circlab
