#pragma once

#include <stdexcept>
#include <string>

namespace routeraudit {

// Base for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UrlError : public Error {
public:
    using Error::Error;
};

// Network-level failure: refused, timed out, reset. Never an HTTP status.
class TransportError : public Error {
public:
    using Error::Error;
};

class SpecError : public Error {
public:
    using Error::Error;
};

}  // namespace routeraudit
