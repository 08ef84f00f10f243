#include "contrain/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace contrain {

std::string schedule_family_name(ScheduleFamily f) {
  switch (f) {
    case ScheduleFamily::cosine: return "cosine";
    case ScheduleFamily::multistep: return "multistep";
    case ScheduleFamily::constant: return "constant";
  }
  return "cosine";
}

ScheduleFamily schedule_family_from_name(const std::string& s) {
  if (s == "cosine") return ScheduleFamily::cosine;
  if (s == "multistep") return ScheduleFamily::multistep;
  if (s == "constant") return ScheduleFamily::constant;
  throw std::invalid_argument("unknown schedule family: " + s);
}

std::int64_t SchedulerSpec::effective_horizon() const {
  const double scaled = multiplier * static_cast<double>(horizon);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(scaled)));
}

void SchedulerSpec::validate() const {
  if (lr_min > lr_max) throw std::invalid_argument("SchedulerSpec: lr_min > lr_max");
  if (lr_max < 0.0) throw std::invalid_argument("SchedulerSpec: lr_max < 0");
  if (horizon < 1) throw std::invalid_argument("SchedulerSpec: horizon < 1");
  if (multiplier <= 0.0) throw std::invalid_argument("SchedulerSpec: multiplier <= 0");
  if (family == ScheduleFamily::multistep) {
    if (gamma <= 0.0 || gamma > 1.0) {
      throw std::invalid_argument("SchedulerSpec: gamma must be in (0, 1]");
    }
    if (!std::is_sorted(milestones.begin(), milestones.end())) {
      throw std::invalid_argument("SchedulerSpec: milestones must be sorted");
    }
  }
}

double lr_at(const SchedulerSpec& sched, std::int64_t iteration) {
  if (iteration < 0) throw std::invalid_argument("lr_at: iteration < 0");
  switch (sched.family) {
    case ScheduleFamily::constant:
      return sched.lr_max;
    case ScheduleFamily::cosine: {
      const std::int64_t horizon = sched.effective_horizon();
      const std::int64_t t = std::min(iteration, horizon);
      const double progress = static_cast<double>(t) / static_cast<double>(horizon);
      return sched.lr_min + 0.5 * (sched.lr_max - sched.lr_min) *
                                (1.0 + std::cos(std::numbers::pi * progress));
    }
    case ScheduleFamily::multistep: {
      double lr = sched.lr_max;
      for (std::int64_t m : sched.milestones) {
        const auto scaled = static_cast<std::int64_t>(
            std::ceil(sched.multiplier * static_cast<double>(m)));
        if (iteration >= scaled) lr *= sched.gamma;
      }
      return lr;
    }
  }
  return sched.lr_max;
}

}  // namespace contrain
