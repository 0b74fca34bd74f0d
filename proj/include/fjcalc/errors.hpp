#pragma once

#include <stdexcept>
#include <string>

namespace fjc {

// Base for every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FJC_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    };

FJC_DEFINE_ERROR(DimensionMismatch)
FJC_DEFINE_ERROR(NotComparable)
FJC_DEFINE_ERROR(NotTorsionFree)
FJC_DEFINE_ERROR(RankMismatch)
FJC_DEFINE_ERROR(UnknownStratum)
FJC_DEFINE_ERROR(ShapeMismatch)
FJC_DEFINE_ERROR(UnsupportedMorphism)
FJC_DEFINE_ERROR(UnsupportedCoefficient)
FJC_DEFINE_ERROR(DegreeOutOfRange)
FJC_DEFINE_ERROR(GluingMismatch)
FJC_DEFINE_ERROR(KanViolation)
FJC_DEFINE_ERROR(UnsupportedJetOrder)
FJC_DEFINE_ERROR(NotExact)
FJC_DEFINE_ERROR(NotComputable)
FJC_DEFINE_ERROR(HypothesisViolated)
FJC_DEFINE_ERROR(ParseError)
FJC_DEFINE_ERROR(CheckFailed)

#undef FJC_DEFINE_ERROR

}  // namespace fjc
