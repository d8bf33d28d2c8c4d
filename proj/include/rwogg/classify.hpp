#ifndef RWOGG_CLASSIFY_HPP
#define RWOGG_CLASSIFY_HPP

#include "rwogg/families.hpp"
#include "rwogg/schedule.hpp"

#include <string>
#include <vector>

namespace rwogg {

enum class Verdict { recurrent, transient, undecided };
enum class SeriesStatus { converges, diverges, not_applicable };

std::string to_string(Verdict v);
std::string to_string(SeriesStatus s);

struct RecurrenceVerdict {
  Verdict verdict = Verdict::undecided;
  /// Short name of the criterion that produced the verdict.
  std::string theorem;
  /// The series whose behaviour decides the verdict.
  std::string series_term;
  SeriesStatus convergence = SeriesStatus::not_applicable;
  std::vector<std::string> notes;
};

/// sum_n rho^n n^-alpha (ln n)^-beta: ratio test on rho, then the
/// Bertrand boundary on (alpha, beta).
SeriesStatus decide_series(double rho, double alpha, double beta);

/// sum_n (d(n) - shift) rho^n n^-alpha (ln n)^-beta for a rounded growth law.
SeriesStatus decide_weighted(const GrowthLaw &d, std::uint64_t shift, double rho, double alpha, double beta);

/// Recurrence of the origin (of leaf v_1 for stars). Returns Undecided
/// whenever the parameters fall outside every known criterion.
RecurrenceVerdict classify(const Family &family, const DurationSchedule &schedule);

} // namespace rwogg

#endif
