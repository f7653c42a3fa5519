#pragma once

#include <vector>

#include "mec/task_model.hpp"

namespace mec {

// Half-open interval [start_ns, end_ns) during which the server takes
// service_ns per task.
struct ServiceWindow {
  Nanos start_ns = 0;
  Nanos end_ns = 0;
  Nanos service_ns = 0;

  friend bool operator==(const ServiceWindow&, const ServiceWindow&) = default;
};

struct ServiceSchedule {
  std::vector<ServiceWindow> windows;  // sorted, non-overlapping
  Nanos default_service_ns = 0;

  Nanos at(Nanos t_ns) const;

  friend bool operator==(const ServiceSchedule&, const ServiceSchedule&) = default;
};

}  // namespace mec
