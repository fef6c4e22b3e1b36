#pragma once

#include <stdexcept>
#include <string>

namespace hybridsim {

/// Base for every error raised by the simulator. Each subclass names one failure
/// mode so callers (and tests) can catch precisely.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HYBRIDSIM_ERROR(Name)             \
  class Name : public SimError {          \
   public:                                \
    using SimError::SimError;             \
  }

// engine
HYBRIDSIM_ERROR(SchedulingInPast);
// dataplane
HYBRIDSIM_ERROR(InvalidPath);
HYBRIDSIM_ERROR(NoRoute);
HYBRIDSIM_ERROR(RoutingLoop);
HYBRIDSIM_ERROR(DuplicateFlow);
HYBRIDSIM_ERROR(UnknownFlow);
// controlplane
HYBRIDSIM_ERROR(UnknownPort);
HYBRIDSIM_ERROR(UnknownSwitch);
HYBRIDSIM_ERROR(NotAdjacent);
HYBRIDSIM_ERROR(AlreadyEstablished);
HYBRIDSIM_ERROR(SessionNotEstablished);
// topology
HYBRIDSIM_ERROR(InvalidK);
HYBRIDSIM_ERROR(NoPath);
HYBRIDSIM_ERROR(InvalidTopology);
// te-apps
HYBRIDSIM_ERROR(TooFewHosts);
// experiment files
HYBRIDSIM_ERROR(ParseError);
HYBRIDSIM_ERROR(ValidationError);

#undef HYBRIDSIM_ERROR

}  // namespace hybridsim
