#pragma once

#include <stdexcept>
#include <string>

namespace dmf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad parameters, malformed input files, unknown suite names
struct ConfigError : Error {
    using Error::Error;
};

// literal grammar violations
struct ParseError : Error {
    using Error::Error;
};

// zero-to-precision where a unit is required, exhausted tracked digits,
// non-decaying tails, independence-heuristic failures
struct PrecisionError : Error {
    using Error::Error;
};

// root extraction needs a larger working field; carries the required (e, m)
struct FieldUpgradeError : Error {
    FieldUpgradeError(const std::string& msg, long e_req, long m_req)
        : Error(msg), e_required(e_req), m_required(m_req) {}
    long e_required;
    long m_required;
};

}  // namespace dmf
