#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace contrain {

enum class ScheduleFamily { cosine, multistep, constant };

std::string schedule_family_name(ScheduleFamily f);
ScheduleFamily schedule_family_from_name(const std::string& s);

// Learning-rate schedule with a length multiplier: multiplier 0.25 means the
// minimum rate is reached in a quarter of the nominal horizon.
struct SchedulerSpec {
  ScheduleFamily family = ScheduleFamily::cosine;
  double lr_max = 1e-3;
  double lr_min = 1e-6;
  std::int64_t horizon = 1;  // iterations at multiplier 1.0
  double multiplier = 1.0;
  std::vector<std::int64_t> milestones;  // multistep, positions at multiplier 1.0
  double gamma = 0.1;                    // multistep decay per milestone

  std::int64_t effective_horizon() const;
  void validate() const;
};

double lr_at(const SchedulerSpec& sched, std::int64_t iteration);

}  // namespace contrain
