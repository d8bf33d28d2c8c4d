#ifndef RWOGG_ANALYSIS_HPP
#define RWOGG_ANALYSIS_HPP

#include "rwogg/engine.hpp"
#include "rwogg/families.hpp"
#include "rwogg/rational.hpp"
#include "rwogg/schedule.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rwogg {

/// Detailed-balance weights phi per state, in the level's index order.
/// Throws PreconditionError for families without known weights.
template <class S> std::vector<S> reversibility_weights(const Family &family, std::uint64_t n);

/// Tree weights: phi(r) = k/(lambda+k), lambda^-h inside, lambda/(lambda+k) lambda^-n at leaves.
std::vector<Rational> weights_karytree(std::uint32_t k, const Rational &lambda, std::uint64_t n);

/// max |phi(u) P(u,v) - phi(v) P(v,u)| over all edges.
template <class S> S detailed_balance_residual(const SparseMatrix<S> &P, std::span<const S> phi);

/// p(n) for the biased k-ary tree, evaluated from the parity-split sums.
template <class S> S p_karytree(std::uint32_t k, const Rational &lambda, std::uint64_t n);

/// p(n) for a box with the given half-widths: 1 / sum of phi over the even class.
template <class S> S p_box(std::span<const std::uint64_t> half_widths);

/// Closed-form p(n) = pi(origin) for every family that has one.
template <class S> S p_closed(const Family &family, std::uint64_t n);

struct EvenStationary {
  /// Indexed like the level; zero off the origin's parity class.
  std::vector<double> pi;
  double p = 0.0;
  /// max_v |(pi P^2)(v) - pi(v)| on the class.
  double residual = 0.0;
  std::string method;
};

/// phi normalised over the origin's parity class.
EvenStationary even_stationary_closed(const Family &family, std::uint64_t n);

struct StationaryOptions {
  double tolerance = 1e-12;
  std::uint64_t max_iterations = 1'000'000;
  bool direct_solve = true;
};

/// Fixed point of P^2 on the origin's parity class (whole space for lazy
/// chains). Sparse LU solve, then power iteration if the residual is still
/// above tolerance. Throws ConvergenceError otherwise.
EvenStationary even_stationary_numeric(const Level<double> &level, const StationaryOptions &options = {});

struct PBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Tree (lambda < k): ((k-lambda)/k)(lambda/k)^(n+1) and (lambda/k)^(n-1).
/// Box: 1/(2n+1)^d and 2/(2n-1)^d. PreconditionError otherwise.
PBounds p_bounds(const Family &family, std::uint64_t n);

struct MixingEstimate {
  double epsilon = 0.0;
  /// Smallest even 2t' >= 2 with worst-case TV <= epsilon.
  std::uint64_t time = 0;
  std::uint32_t worst_start = 0;
};

/// Per-start TV to pi is nonincreasing in t', so the answer is 2 max_u t'_u.
/// `starts` restricts the maximum to the given level states (all of the
/// origin's class when empty); states outside the class are ignored.
MixingEstimate measure_even_mixing(const Level<double> &level, std::span<const double> pi, double epsilon,
                                   unsigned threads = 1, std::uint64_t max_steps = 10'000'000,
                                   std::span<const std::uint32_t> starts = {});

/// One start per orbit of the automorphisms fixing pi: sorted nonnegative
/// coordinates for a Box, the origin for a Hypercube (vertex-transitive).
/// Empty (meaning every start) for other families.
std::vector<std::uint32_t> mixing_start_representatives(const Family &family, std::uint64_t n);

/// Big-O constants of the mixing bounds. path comes with constant 1; box and
/// cube are calibrated values, not closed-form constants.
struct MixingConstants {
  double path = 1.0;
  double box = 0.62;
  double cube = 0.26;
  bool box_calibrated = true;
  bool cube_calibrated = true;
};

/// path: C n^2 ln(1/eps); box: C n^2 d ln(d/eps); cube: C n ln(n/eps).
/// PreconditionError for families without a stated bound.
double analytic_mixing_bound(const Family &family, std::uint64_t n, double epsilon,
                             const MixingConstants &constants = {});

/// Geometric mean of measured / bound(C = 1) over the given grid. This is how
/// the box and hypercube defaults were obtained (box d = 1..4 with n = 1..3,
/// hypercube n = 2..8, eps in {0.1, 0.01}).
double calibrate_mixing_constant(const Family &family, std::span<const std::uint64_t> ns,
                                 std::span<const double> epsilons);

/// Box d = 1..4 with n = 1..3 and hypercube n = 2..8, eps in {0.1, 0.01}.
MixingConstants calibrate_mixing_constants();

struct DiagnosticRow {
  std::uint64_t phase = 0;
  std::uint64_t d_n = 0;
  double p_n = 0.0;
  /// R(T_{n-1}+1) + ... + R(T_n).
  double increment = 0.0;
  /// (d(n) - 1) p(n) / 2.
  double lower = 0.0;
  /// 2 d(n) p(n-1), or d(1) for the first phase.
  double upper = 0.0;
};

/// One row per phase that ends within the series horizon.
std::vector<DiagnosticRow> series_diagnostic(const ReturnSeries &series, const DurationSchedule &schedule,
                                             const std::function<double(std::uint64_t)> &p);

} // namespace rwogg

#endif
