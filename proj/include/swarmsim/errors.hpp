#ifndef SWARMSIM_ERRORS_HPP
#define SWARMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace swarmsim {

// Malformed input file (bad syntax, wrong value type).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input violating a documented invariant; message names the field.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Partition operation rejected; kind tells which precondition failed.
struct PartitionError : std::runtime_error {
    enum class Kind {
        UnknownCoalition,
        InvalidSubset,
        NoFreeTransceiver,
        LastMembership,
        NotMember,
        AlreadyMember,
    };

    PartitionError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

}  // namespace swarmsim

#endif  // SWARMSIM_ERRORS_HPP
