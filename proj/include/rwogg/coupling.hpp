#ifndef RWOGG_COUPLING_HPP
#define RWOGG_COUPLING_HPP

#include "rwogg/families.hpp"
#include "rwogg/schedule.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rwogg {

// Coupled one-step transitions driven by one shared uniform u in [0, 1).
// X runs on level nX >= nY (the faster-growing schedule), Y on level nY.
// Each chain moves by inverse transform on its own outcome order, so the
// marginals are exact. The antithetic variant feeds Y with 1 - u; it is the
// negative control and carries no dominance guarantee.

enum class CouplingVariant { monotone, antithetic };

struct ScalarStep {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::string label;
};

/// Tree heights. Requires hX >= hY, nX >= nY and lambda < k.
ScalarStep coupled_step_tree(std::int64_t hX, std::int64_t hY, std::uint64_t nX, std::uint64_t nY,
                             std::uint32_t k, const Rational &lambda, double u,
                             CouplingVariant variant = CouplingVariant::monotone);

/// Hamming weights with down-probabilities wX/nX and wY/nY.
ScalarStep coupled_step_cube(std::int64_t wX, std::int64_t wY, std::uint64_t nX, std::uint64_t nY, double u,
                             CouplingVariant variant = CouplingVariant::monotone);

/// Level-tree heights. Busy (gamma = 0): hX >= hY with equal parity. Lazy:
/// hX >= hY and 1/2 <= gamma < 1; gamma in (0, 1/2) is unsupported.
ScalarStep coupled_step_leveltree(std::int64_t hX, std::int64_t hY, std::uint64_t nX, std::uint64_t nY,
                                  const LevelProfile &profile, const Rational &gamma, double u,
                                  CouplingVariant variant = CouplingVariant::monotone);

/// Boxes: both chains pick the same coordinate floor(u d) and share the
/// fractional part for the direction. Updates X and Y in place and returns
/// the case label. Requires |X_i| >= |Y_i| for every i.
std::string coupled_step_box(std::vector<std::int64_t> &X, std::vector<std::int64_t> &Y,
                             std::span<const std::uint64_t> boundX, std::span<const std::uint64_t> boundY,
                             double u, CouplingVariant variant = CouplingVariant::monotone);

struct TraceRow {
  std::uint64_t t = 0;
  std::string hX;
  std::string hY;
  std::string label;
  double uniform = 0.0;
};

struct CouplingReport {
  std::uint64_t trials = 0;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  /// Trajectories with at least one dominance failure.
  std::uint64_t violations = 0;
  /// Every trajectory had X_t = Y_t throughout.
  bool identical = true;
  /// First failing trajectory, up to and including the failing step.
  std::vector<TraceRow> failure;

  bool pass() const { return violations == 0; }
};

/// Runs coupled trajectories of (f, G, P) against (g, G, P). Needs
/// prefix_dominates_within(f, g, horizon); throws PreconditionError otherwise.
CouplingReport verify_coupling_sim(const Family &family, const DurationSchedule &f, const DurationSchedule &g,
                                   std::uint64_t horizon, std::uint64_t trials, std::uint64_t seed,
                                   CouplingVariant variant = CouplingVariant::monotone);

struct DominanceReport {
  std::uint64_t horizon = 0;
  /// max_t R_f(t) - R_g(t).
  double max_violation = 0.0;
  std::uint64_t worst_time = 0;
  double tolerance = 1e-12;
  bool exact_rational = false;

  bool pass() const { return max_violation <= tolerance; }
};

struct DominanceOptions {
  double tolerance = 1e-12;
  /// Run the projected chain when one exists.
  bool lumped = true;
  /// Evolve in exact rationals instead of doubles.
  bool rational = false;
  std::uint64_t state_cap = kDefaultStateCap;
};

/// Exact return-series comparison. Throws PreconditionError when f does not
/// prefix-dominate g within the horizon.
DominanceReport verify_lhagg_exact(const Family &family, const DurationSchedule &f, const DurationSchedule &g,
                                   std::uint64_t horizon, const DominanceOptions &options = {});

} // namespace rwogg

#endif
