#include "rwogg/schedule.hpp"

#include "rwogg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwogg {

double GrowthLaw::real_value(std::uint64_t n) const {
  const double x = static_cast<double>(n);
  const double logn = std::log(x);
  return scale * std::pow(base, x) / (std::pow(x, poly_power) * std::pow(logn, log_power));
}

std::uint64_t GrowthLaw::value(std::uint64_t n) const {
  if (n == 0)
    throw std::out_of_range("growth law index starts at 1");
  if (n == 1)
    return first;
  const double v = real_value(n);
  if (!std::isfinite(v) || v < 0.0)
    throw std::overflow_error("growth law value not finite at n=" + std::to_string(n));
  double r;
  if (rounding == Rounding::ceil) {
    r = std::ceil(v);
  } else {
    // nearbyint honours the default round-to-nearest-even mode.
    r = std::nearbyint(v);
  }
  if (r >= 0x1p62)
    throw std::overflow_error("growth law value exceeds 2^62 at n=" + std::to_string(n));
  return static_cast<std::uint64_t>(r);
}

GrowthShape shape_of(const GrowthLaw &law) {
  using K = GrowthShape::Kind;
  if (law.scale <= 0.0)
    return {K::zero, 0};
  // Sign of the eventual trend of base^n / (n^a (ln n)^b).
  int trend;
  if (law.base > 1.0) {
    trend = 1;
  } else if (law.base < 1.0) {
    trend = -1;
  } else if (law.poly_power != 0.0) {
    trend = law.poly_power < 0.0 ? 1 : -1;
  } else if (law.log_power != 0.0) {
    trend = law.log_power < 0.0 ? 1 : -1;
  } else {
    trend = 0;
  }
  if (trend > 0)
    return {K::growing, 0};
  if (trend == 0) {
    const double c = law.rounding == Rounding::ceil ? std::ceil(law.scale) : std::nearbyint(law.scale);
    const auto ci = static_cast<std::uint64_t>(c);
    return ci == 0 ? GrowthShape{K::zero, 0} : GrowthShape{K::constant, ci};
  }
  // Tends to zero: nearest rounding reaches 0, ceil sticks at 1.
  return law.rounding == Rounding::ceil ? GrowthShape{K::constant, 1} : GrowthShape{K::zero, 0};
}

DurationSchedule DurationSchedule::explicit_list(std::vector<std::uint64_t> durations,
                                                 std::string name) {
  if (durations.empty())
    throw ConfigError("explicit schedule needs at least one duration");
  DurationSchedule s;
  s.values_ = std::move(durations);
  s.name_ = std::move(name);
  return s;
}

DurationSchedule DurationSchedule::symbolic(GrowthLaw law, std::string name) {
  if (!(law.base > 0.0))
    throw ConfigError("symbolic schedule needs base > 0");
  if (!(law.scale >= 0.0))
    throw ConfigError("symbolic schedule needs scale >= 0");
  DurationSchedule s;
  s.law_ = law;
  s.name_ = std::move(name);
  return s;
}

std::uint64_t DurationSchedule::duration(std::uint64_t n) const {
  if (n == 0)
    throw std::out_of_range("phase index starts at 1");
  if (law_)
    return law_->value(n);
  if (n > values_.size())
    throw std::out_of_range("phase " + std::to_string(n) + " beyond explicit schedule of length " +
                            std::to_string(values_.size()));
  return values_[n - 1];
}

std::optional<std::uint64_t> DurationSchedule::length() const {
  if (law_)
    return std::nullopt;
  return values_.size();
}

PhaseTimeline::PhaseTimeline(const DurationSchedule &schedule, std::uint64_t phases) {
  ends_.reserve(phases + 1);
  ends_.push_back(0);
  for (std::uint64_t n = 1; n <= phases; ++n) {
    const std::uint64_t d = schedule.duration(n);
    if (d > (UINT64_MAX >> 1) - ends_.back())
      throw std::overflow_error("phase timeline overflows at phase " + std::to_string(n));
    ends_.push_back(ends_.back() + d);
  }
}

PhaseTimeline PhaseTimeline::covering(const DurationSchedule &schedule, std::uint64_t time) {
  PhaseTimeline tl(schedule, 0);
  const auto limit = schedule.length();
  for (std::uint64_t n = 1; !limit || n <= *limit; ++n) {
    if (tl.ends_.back() > time)
      break;
    const std::uint64_t d = schedule.duration(n);
    if (d > (UINT64_MAX >> 1) - tl.ends_.back())
      throw std::overflow_error("phase timeline overflows at phase " + std::to_string(n));
    tl.ends_.push_back(tl.ends_.back() + d);
  }
  return tl;
}

std::uint64_t PhaseTimeline::end_of(std::uint64_t n) const {
  if (n >= ends_.size())
    throw std::out_of_range("phase " + std::to_string(n) + " not materialised");
  return ends_[n];
}

std::uint64_t PhaseTimeline::phase_of(std::uint64_t t) const {
  if (t >= ends_.back())
    throw std::out_of_range("time " + std::to_string(t) + " beyond computed horizon " +
                            std::to_string(ends_.back()));
  auto it = std::upper_bound(ends_.begin(), ends_.end(), t);
  return static_cast<std::uint64_t>(it - ends_.begin());
}

std::uint64_t PhaseTimeline::level_at(std::uint64_t t) const {
  if (t >= ends_.back())
    return phases();
  return phase_of(t);
}

bool prefix_dominates(const DurationSchedule &f, const DurationSchedule &g,
                      std::uint64_t horizon) {
  std::uint64_t sf = 0, sg = 0;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    sf += f.duration(n);
    sg += g.duration(n);
    if (sf > sg)
      return false;
  }
  return true;
}

bool prefix_dominates_within(const DurationSchedule &f, const DurationSchedule &g,
                             std::uint64_t time) {
  constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
  auto past_end = [](const DurationSchedule &s, std::uint64_t n) {
    return s.length() && n > *s.length();
  };
  std::uint64_t tf = 0, tg = 0;
  // Phases with d = 0 forever never reach the horizon; the prefix sums are
  // frozen by then, so a bounded scan is enough.
  for (std::uint64_t n = 1; n <= (std::uint64_t{1} << 20); ++n) {
    tf = past_end(f, n) ? inf : std::min(tf + f.duration(n), inf - 1);
    tg = past_end(g, n) ? inf : std::min(tg + g.duration(n), inf - 1);
    if (std::min(tf, time) > std::min(tg, time))
      return false;
    if (tf >= time)
      return true;
  }
  return true;
}

} // namespace rwogg
