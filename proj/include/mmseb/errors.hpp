#pragma once

#include <stdexcept>
#include <string>

namespace mmseb {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MMSEB_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Error(std::string(#Name ": ") + what) {} \
  }

MMSEB_DEFINE_ERROR(InvalidArgument);
MMSEB_DEFINE_ERROR(RankDeficient);
MMSEB_DEFINE_ERROR(NotSymmetric);
MMSEB_DEFINE_ERROR(NotPSD);
MMSEB_DEFINE_ERROR(NonFiniteSample);
MMSEB_DEFINE_ERROR(ToleranceNotMet);
MMSEB_DEFINE_ERROR(DomainError);
MMSEB_DEFINE_ERROR(NumericalUnderflow);
MMSEB_DEFINE_ERROR(UnsupportedStrategy);
MMSEB_DEFINE_ERROR(DegenerateWeights);
MMSEB_DEFINE_ERROR(RankDeficiencyRate);
MMSEB_DEFINE_ERROR(EmptyGrid);
MMSEB_DEFINE_ERROR(RankDeficientEverywhere);
MMSEB_DEFINE_ERROR(WrongChannel);
MMSEB_DEFINE_ERROR(PriorHasNoDensity);
MMSEB_DEFINE_ERROR(SoundnessViolation);

#undef MMSEB_DEFINE_ERROR

}  // namespace mmseb
