#pragma once

#include <stdexcept>
#include <string>

namespace enclosure {

// Every failure raised by the library derives from Error so callers can
// catch one type at the CLI boundary.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ENCLOSURE_ERROR(Name)                                   \
    class Name : public Error {                                 \
    public:                                                     \
        explicit Name(const std::string& what) : Error(what) {} \
    }

ENCLOSURE_ERROR(InvalidDomain);
ENCLOSURE_ERROR(InvalidRegion);
ENCLOSURE_ERROR(ContainmentError);
ENCLOSURE_ERROR(NotBandLimited);
ENCLOSURE_ERROR(BranchError);
ENCLOSURE_ERROR(CircleBranchError);
ENCLOSURE_ERROR(InternalConsistencyError);
ENCLOSURE_ERROR(QuadratureFailure);
ENCLOSURE_ERROR(SolverFailure);
ENCLOSURE_ERROR(CompatibilityError);
ENCLOSURE_ERROR(ContractViolation);
ENCLOSURE_ERROR(UndefinedRegime);
ENCLOSURE_ERROR(InsufficientCoverage);
ENCLOSURE_ERROR(InsufficientSamples);
ENCLOSURE_ERROR(SnapError);
ENCLOSURE_ERROR(ParseError);

#undef ENCLOSURE_ERROR

}  // namespace enclosure
