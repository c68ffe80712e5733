#pragma once

#include <stdexcept>
#include <string>

namespace rfmix {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Contract or invariant violation in caller-supplied data.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw ValidationError(what);
    }
}

} // namespace rfmix
