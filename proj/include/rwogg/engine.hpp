#ifndef RWOGG_ENGINE_HPP
#define RWOGG_ENGINE_HPP

#include "rwogg/families.hpp"
#include "rwogg/schedule.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rwogg {

/// Lazily built, cached levels of one family (optionally its lumped chain).
/// Not thread-safe while building; call prepare() before sharing.
template <class S> class LevelSource {
public:
  LevelSource(Family family, bool lumped, std::uint64_t cap = kDefaultStateCap);

  const Level<S> &level(std::uint64_t n);
  /// Map from level n into level n+1.
  const std::vector<std::uint32_t> &embedding_from(std::uint64_t n);
  /// Builds levels 1..n and the embeddings between them.
  void prepare(std::uint64_t n);

  const Family &family() const { return family_; }
  bool lumped() const { return lumped_; }
  std::uint64_t cap() const { return cap_; }

private:
  Family family_;
  bool lumped_;
  std::uint64_t cap_;
  std::map<std::uint64_t, Level<S>> levels_;
  std::map<std::uint64_t, std::vector<std::uint32_t>> embeddings_;
};

/// Probability vector over the states of one level.
template <class S> struct Distribution {
  std::vector<S> mass;
  std::uint64_t level = 1;
  std::uint64_t time = 0;

  S total() const;
};

template <class S> Distribution<S> point_mass(std::size_t size, std::uint32_t state, std::uint64_t level);

/// x P: one transition of the chain. Throws PreconditionError on dimension
/// mismatch.
template <class S> Distribution<S> evolve_step(const Distribution<S> &x, const SparseMatrix<S> &P);

/// Re-indexes x into the next level through the embedding; new states get 0.
template <class S>
Distribution<S> lift_level(const Distribution<S> &x, std::span<const std::uint32_t> embedding,
                           std::size_t target_size);

/// R(t) for t = 0..T with partial sums S(t) = R(1) + ... + R(t).
template <class S> struct BasicReturnSeries {
  std::vector<S> R;
  std::vector<S> partial;
  /// Level whose matrix drives the step t -> t+1 (the level held at t = T).
  std::vector<std::uint64_t> phase;
  /// Phase ends T_n reached within the horizon, as (n, T_n).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> boundaries;

  std::uint64_t horizon() const { return R.empty() ? 0 : R.size() - 1; }
};

using ReturnSeries = BasicReturnSeries<double>;

struct RunOptions {
  bool lumped = false;
  std::uint64_t state_cap = kDefaultStateCap;
  /// Start state at level 1 (0 = root / origin / centre).
  std::uint32_t origin = 0;
};

/// Exact return series by phase-wise evolution. Explicit schedules hold their
/// last level once the list is exhausted.
template <class S>
BasicReturnSeries<S> run_exact(const Family &family, const DurationSchedule &schedule,
                               std::uint64_t horizon, const RunOptions &options = {});

/// Same, reusing a caller-owned level cache.
template <class S>
BasicReturnSeries<S> run_exact(LevelSource<S> &source, const DurationSchedule &schedule,
                               std::uint64_t horizon, std::uint32_t origin = 0);

struct MonteCarloOptions {
  bool lumped = false;
  std::uint64_t state_cap = kDefaultStateCap;
  std::uint32_t origin = 0;
  unsigned threads = 1;
};

/// Empirical return frequencies of independent walkers.
ReturnSeries run_monte_carlo(const Family &family, const DurationSchedule &schedule,
                             std::uint64_t horizon, std::uint64_t walkers, std::uint64_t seed,
                             const MonteCarloOptions &options = {});

struct HittingResult {
  /// First time X_t equals the target, nullopt when censored at the horizon.
  std::vector<std::optional<std::uint64_t>> first_hit;
  std::uint64_t horizon = 0;

  double hit_fraction() const;
};

/// First-hitting times of `target` (a state index that exists from level
/// `target_level` on) for walkers started at the origin.
HittingResult hitting_experiment(const Family &family, const DurationSchedule &schedule,
                                 std::uint32_t target, std::uint64_t target_level,
                                 std::uint64_t horizon, std::uint64_t trials, std::uint64_t seed,
                                 std::uint64_t state_cap = kDefaultStateCap);

/// Exact Pr[target hit by time horizon] via absorbing-state evolution.
double hitting_probability_exact(const Family &family, const DurationSchedule &schedule,
                                 std::uint32_t target, std::uint64_t target_level,
                                 std::uint64_t horizon, std::uint64_t state_cap = kDefaultStateCap);

} // namespace rwogg

#endif
