#ifndef RWOGG_SCHEDULE_HPP
#define RWOGG_SCHEDULE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rwogg {

enum class Rounding { nearest, ceil };

/// Integer sequence of the form round(scale * base^n / (n^a * (ln n)^b)) for
/// n >= 2, with the n = 1 value stored explicitly. Used both for duration
/// schedules and for growth laws such as the star size M(n).
struct GrowthLaw {
  double scale = 1.0;
  double base = 1.0;
  double poly_power = 0.0; // a
  double log_power = 0.0;  // b
  std::uint64_t first = 1; // value at n = 1
  Rounding rounding = Rounding::nearest;

  /// Unrounded value at n >= 2.
  double real_value(std::uint64_t n) const;
  /// Rounded value; throws std::overflow_error past 2^62.
  std::uint64_t value(std::uint64_t n) const;
};

/// Eventual behaviour of a GrowthLaw's rounded values.
struct GrowthShape {
  enum class Kind { zero, constant, growing } kind;
  std::uint64_t constant = 0; // for Kind::constant
};

GrowthShape shape_of(const GrowthLaw &law);

/// The duration function: phase index n >= 1 -> nonnegative phase length.
class DurationSchedule {
public:
  static DurationSchedule explicit_list(std::vector<std::uint64_t> durations,
                                        std::string name = {});
  static DurationSchedule symbolic(GrowthLaw law, std::string name = {});

  /// d(n). Throws std::out_of_range past the end of an explicit list.
  std::uint64_t duration(std::uint64_t n) const;

  bool is_symbolic() const { return law_.has_value(); }
  const std::optional<GrowthLaw> &law() const { return law_; }
  /// Number of listed phases; nullopt for symbolic schedules.
  std::optional<std::uint64_t> length() const;
  const std::vector<std::uint64_t> &values() const { return values_; }
  const std::string &name() const { return name_; }

private:
  DurationSchedule() = default;
  std::vector<std::uint64_t> values_;
  std::optional<GrowthLaw> law_;
  std::string name_;
};

/// Cumulative phase ends T_0 = 0, T_n = d(1) + ... + d(n).
class PhaseTimeline {
public:
  /// Materialises T_1..T_phases.
  PhaseTimeline(const DurationSchedule &schedule, std::uint64_t phases);

  /// Materialises phases until T_n > time, or until an explicit list ends.
  static PhaseTimeline covering(const DurationSchedule &schedule,
                                std::uint64_t time);

  std::uint64_t phases() const { return ends_.size() - 1; }
  /// T_n for 0 <= n <= phases().
  std::uint64_t end_of(std::uint64_t n) const;
  std::uint64_t horizon() const { return ends_.back(); }

  /// Smallest n with t < T_n: the phase whose matrix drives the step t -> t+1.
  /// Throws std::out_of_range when t >= horizon().
  std::uint64_t phase_of(std::uint64_t t) const;

  /// Level occupied at time t when the last materialised phase is held
  /// forever (the static tail used for finite explicit schedules).
  std::uint64_t level_at(std::uint64_t t) const;

private:
  std::vector<std::uint64_t> ends_;
};

/// True iff f(1)+...+f(n) <= g(1)+...+g(n) for every n <= horizon.
bool prefix_dominates(const DurationSchedule &f, const DurationSchedule &g,
                      std::uint64_t horizon);

/// Horizon-aware variant: min(T^f_n, time) <= min(T^g_n, time) for every n,
/// with T_n taken as infinite past the end of an explicit list.
bool prefix_dominates_within(const DurationSchedule &f, const DurationSchedule &g,
                             std::uint64_t time);

} // namespace rwogg

#endif
