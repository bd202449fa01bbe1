#pragma once

#include <stdexcept>

namespace bbm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BBM_DEFINE_ERROR(Name) \
  struct Name : Error {        \
    using Error::Error;        \
  }

BBM_DEFINE_ERROR(EmptyMeasure);
BBM_DEFINE_ERROR(NonIntegrable);
BBM_DEFINE_ERROR(Overflow);
BBM_DEFINE_ERROR(ParticleBudgetExceeded);
BBM_DEFINE_ERROR(CulledBiasTooLarge);
BBM_DEFINE_ERROR(DegenerateZ);
BBM_DEFINE_ERROR(GridTooNarrow);
BBM_DEFINE_ERROR(FrontLost);
BBM_DEFINE_ERROR(OutOfValidityWindow);
BBM_DEFINE_ERROR(SingularLog);
BBM_DEFINE_ERROR(Divergent);
BBM_DEFINE_ERROR(DescriptorMismatch);
BBM_DEFINE_ERROR(EmptyTail);
BBM_DEFINE_ERROR(InsufficientReplicates);
BBM_DEFINE_ERROR(ConfigError);

#undef BBM_DEFINE_ERROR

}  // namespace bbm
