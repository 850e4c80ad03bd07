#pragma once

#include <stdexcept>
#include <string>

namespace cobro {

// Invalid user-supplied input: malformed config files, out-of-domain
// parameters, dimension mismatches.  The CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A numerical routine failed to meet its contract: non-convergence,
// non-finite intermediates, inversion residues above tolerance.
// The CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cobro
