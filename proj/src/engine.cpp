#include "rwogg/engine.hpp"

#include "rwogg/error.hpp"
#include "rwogg/rng.hpp"

#include <algorithm>
#include <thread>

namespace rwogg {

template <class S>
LevelSource<S>::LevelSource(Family family, bool lumped, std::uint64_t cap)
    : family_(lumped ? lump_by_height(family) : std::move(family)), lumped_(lumped), cap_(cap) {
  validate(family_);
}

template <class S> const Level<S> &LevelSource<S>::level(std::uint64_t n) {
  auto it = levels_.find(n);
  if (it == levels_.end())
    it = levels_.emplace(n, build_level<S>(family_, n, cap_)).first;
  return it->second;
}

template <class S> const std::vector<std::uint32_t> &LevelSource<S>::embedding_from(std::uint64_t n) {
  auto it = embeddings_.find(n);
  if (it == embeddings_.end())
    it = embeddings_.emplace(n, embedding(family_, n)).first;
  return it->second;
}

template <class S> void LevelSource<S>::prepare(std::uint64_t n) {
  for (std::uint64_t m = 1; m <= n; ++m) {
    level(m);
    if (m < n)
      embedding_from(m);
  }
}

template <class S> S Distribution<S>::total() const {
  S sum(0);
  for (const auto &m : mass)
    sum += m;
  return sum;
}

template <class S> Distribution<S> point_mass(std::size_t size, std::uint32_t state, std::uint64_t level) {
  if (state >= size)
    throw PreconditionError("start state outside the level");
  Distribution<S> x;
  x.mass.assign(size, S(0));
  x.mass[state] = S(1);
  x.level = level;
  return x;
}

template <class S> Distribution<S> evolve_step(const Distribution<S> &x, const SparseMatrix<S> &P) {
  Distribution<S> y;
  y.mass = P.left_multiply(x.mass);
  y.level = x.level;
  y.time = x.time + 1;
  return y;
}

template <class S>
Distribution<S> lift_level(const Distribution<S> &x, std::span<const std::uint32_t> embedding,
                           std::size_t target_size) {
  if (embedding.size() != x.mass.size())
    throw PreconditionError("embedding does not match the distribution's level");
  Distribution<S> y;
  y.mass.assign(target_size, S(0));
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    if (embedding[i] >= target_size)
      throw PreconditionError("embedding points outside the target level");
    y.mass[embedding[i]] = x.mass[i];
  }
  y.level = x.level + 1;
  y.time = x.time;
  return y;
}

template <class S>
BasicReturnSeries<S> run_exact(LevelSource<S> &source, const DurationSchedule &schedule,
                               std::uint64_t horizon, std::uint32_t origin) {
  const PhaseTimeline tl = PhaseTimeline::covering(schedule, horizon);
  BasicReturnSeries<S> rs;
  rs.R.reserve(horizon + 1);
  rs.partial.reserve(horizon + 1);
  rs.phase.reserve(horizon + 1);
  for (std::uint64_t n = 1; n <= tl.phases(); ++n)
    if (tl.end_of(n) <= horizon)
      rs.boundaries.emplace_back(n, tl.end_of(n));

  Distribution<S> x = point_mass<S>(source.level(1).size(), origin, 1);
  std::uint32_t origin_index = origin;
  S running(0);
  for (std::uint64_t t = 0;; ++t) {
    const std::uint64_t target = std::max<std::uint64_t>(1, tl.level_at(t));
    while (x.level < target) {
      const auto &emb = source.embedding_from(x.level);
      origin_index = emb[origin_index];
      x = lift_level(x, emb, source.level(x.level + 1).size());
    }
    rs.R.push_back(x.mass[origin_index]);
    if (t > 0)
      running += x.mass[origin_index];
    rs.partial.push_back(running);
    rs.phase.push_back(target);
    if (t == horizon)
      break;
    x = evolve_step(x, source.level(x.level).matrix);
  }
  return rs;
}

template <class S>
BasicReturnSeries<S> run_exact(const Family &family, const DurationSchedule &schedule,
                               std::uint64_t horizon, const RunOptions &options) {
  LevelSource<S> source(family, options.lumped, options.state_cap);
  return run_exact(source, schedule, horizon, options.origin);
}

namespace {

std::uint32_t sample_row(const SparseMatrix<double> &P, std::uint32_t state, double u) {
  const auto row = P.row(state);
  double acc = 0.0;
  for (const auto &e : row) {
    acc += e.value;
    if (u < acc)
      return e.col;
  }
  return row.back().col;
}

// Levels and origin indices needed up to `horizon`, built before threads start.
struct WalkPlan {
  PhaseTimeline timeline;
  std::vector<std::uint64_t> level_at;       // per t in [0, horizon]
  std::vector<std::uint32_t> origin_index;   // per level
  std::uint64_t max_level;
};

WalkPlan plan_walk(LevelSource<double> &source, const DurationSchedule &schedule, std::uint64_t horizon,
                   std::uint32_t origin) {
  WalkPlan plan{PhaseTimeline::covering(schedule, horizon), {}, {}, 1};
  plan.level_at.resize(horizon + 1);
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    plan.level_at[t] = std::max<std::uint64_t>(1, plan.timeline.level_at(t));
    plan.max_level = std::max(plan.max_level, plan.level_at[t]);
  }
  source.prepare(plan.max_level);
  plan.origin_index.assign(plan.max_level + 1, 0);
  plan.origin_index[1] = origin;
  if (origin >= source.level(1).size())
    throw PreconditionError("start state outside the level");
  for (std::uint64_t n = 1; n < plan.max_level; ++n)
    plan.origin_index[n + 1] = source.embedding_from(n)[plan.origin_index[n]];
  return plan;
}

template <class Fn> void parallel_chunks(std::uint64_t count, unsigned threads, Fn &&fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([&fn, w, lo, hi] { fn(w, lo, hi); });
  }
  for (auto &th : pool)
    th.join();
}

} // namespace

ReturnSeries run_monte_carlo(const Family &family, const DurationSchedule &schedule, std::uint64_t horizon,
                             std::uint64_t walkers, std::uint64_t seed, const MonteCarloOptions &options) {
  if (walkers == 0)
    throw PreconditionError("monte carlo needs at least one walker");
  LevelSource<double> source(family, options.lumped, options.state_cap);
  const WalkPlan plan = plan_walk(source, schedule, horizon, options.origin);
  std::vector<const Level<double> *> levels(plan.max_level + 1, nullptr);
  std::vector<const std::vector<std::uint32_t> *> embeds(plan.max_level + 1, nullptr);
  for (std::uint64_t n = 1; n <= plan.max_level; ++n) {
    levels[n] = &source.level(n);
    if (n < plan.max_level)
      embeds[n] = &source.embedding_from(n);
  }

  const unsigned threads = std::max(1u, options.threads);
  std::vector<std::vector<std::uint64_t>> hits(threads, std::vector<std::uint64_t>(horizon + 1, 0));
  parallel_chunks(walkers, threads, [&](unsigned worker, std::uint64_t lo, std::uint64_t hi) {
    auto &local = hits[worker];
    for (std::uint64_t w = lo; w < hi; ++w) {
      StreamRng rng(seed, w);
      std::uint32_t state = options.origin;
      std::uint64_t level = 1;
      for (std::uint64_t t = 0;; ++t) {
        while (level < plan.level_at[t]) {
          state = (*embeds[level])[state];
          ++level;
        }
        if (state == plan.origin_index[level])
          ++local[t];
        if (t == horizon)
          break;
        state = sample_row(levels[level]->matrix, state, rng.uniform());
      }
    }
  });

  ReturnSeries rs;
  double running = 0.0;
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    std::uint64_t count = 0;
    for (const auto &h : hits)
      count += h[t];
    const double r = static_cast<double>(count) / static_cast<double>(walkers);
    rs.R.push_back(r);
    if (t > 0)
      running += r;
    rs.partial.push_back(running);
    rs.phase.push_back(plan.level_at[t]);
  }
  for (std::uint64_t n = 1; n <= plan.timeline.phases(); ++n)
    if (plan.timeline.end_of(n) <= horizon)
      rs.boundaries.emplace_back(n, plan.timeline.end_of(n));
  return rs;
}

double HittingResult::hit_fraction() const {
  if (first_hit.empty())
    return 0.0;
  const auto hit = std::count_if(first_hit.begin(), first_hit.end(), [](const auto &h) { return h.has_value(); });
  return static_cast<double>(hit) / static_cast<double>(first_hit.size());
}

HittingResult hitting_experiment(const Family &family, const DurationSchedule &schedule, std::uint32_t target,
                                 std::uint64_t target_level, std::uint64_t horizon, std::uint64_t trials,
                                 std::uint64_t seed, std::uint64_t state_cap) {
  if (target_level == 0)
    throw PreconditionError("target level starts at 1");
  LevelSource<double> source(family, false, state_cap);
  const WalkPlan plan = plan_walk(source, schedule, horizon, 0);
  if (target_level <= plan.max_level && target >= source.level(target_level).size())
    throw PreconditionError("target state does not exist at its level");
  // Index of the target at each level from target_level on.
  std::vector<std::int64_t> target_at(plan.max_level + 1, -1);
  if (target_level <= plan.max_level) {
    target_at[target_level] = target;
    for (std::uint64_t n = target_level; n < plan.max_level; ++n)
      target_at[n + 1] = source.embedding_from(n)[static_cast<std::size_t>(target_at[n])];
  }
  HittingResult result;
  result.horizon = horizon;
  result.first_hit.resize(trials);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    StreamRng rng(seed, trial);
    std::uint32_t state = 0;
    std::uint64_t level = 1;
    for (std::uint64_t t = 0; t <= horizon; ++t) {
      while (level < plan.level_at[t]) {
        state = source.embedding_from(level)[state];
        ++level;
      }
      if (target_at[level] >= 0 && state == static_cast<std::uint32_t>(target_at[level])) {
        result.first_hit[trial] = t;
        break;
      }
      if (t == horizon)
        break;
      state = sample_row(source.level(level).matrix, state, rng.uniform());
    }
  }
  return result;
}

double hitting_probability_exact(const Family &family, const DurationSchedule &schedule, std::uint32_t target,
                                 std::uint64_t target_level, std::uint64_t horizon, std::uint64_t state_cap) {
  LevelSource<double> source(family, false, state_cap);
  const PhaseTimeline tl = PhaseTimeline::covering(schedule, horizon);
  Distribution<double> x = point_mass<double>(source.level(1).size(), 0, 1);
  std::int64_t target_index = target_level == 1 ? static_cast<std::int64_t>(target) : -1;
  double absorbed = 0.0;
  for (std::uint64_t t = 0;; ++t) {
    const std::uint64_t want = std::max<std::uint64_t>(1, tl.level_at(t));
    while (x.level < want) {
      const auto &emb = source.embedding_from(x.level);
      if (target_index >= 0)
        target_index = emb[static_cast<std::size_t>(target_index)];
      x = lift_level(x, emb, source.level(x.level + 1).size());
      if (x.level == target_level)
        target_index = target;
    }
    if (target_index >= 0) {
      absorbed += x.mass[static_cast<std::size_t>(target_index)];
      x.mass[static_cast<std::size_t>(target_index)] = 0.0;
    }
    if (t == horizon)
      break;
    x = evolve_step(x, source.level(x.level).matrix);
  }
  return absorbed;
}

template class LevelSource<double>;
template class LevelSource<Rational>;
template struct Distribution<double>;
template struct Distribution<Rational>;
template Distribution<double> point_mass<double>(std::size_t, std::uint32_t, std::uint64_t);
template Distribution<Rational> point_mass<Rational>(std::size_t, std::uint32_t, std::uint64_t);
template Distribution<double> evolve_step<double>(const Distribution<double> &, const SparseMatrix<double> &);
template Distribution<Rational> evolve_step<Rational>(const Distribution<Rational> &,
                                                      const SparseMatrix<Rational> &);
template Distribution<double> lift_level<double>(const Distribution<double> &, std::span<const std::uint32_t>,
                                                 std::size_t);
template Distribution<Rational> lift_level<Rational>(const Distribution<Rational> &,
                                                     std::span<const std::uint32_t>, std::size_t);
template BasicReturnSeries<double> run_exact<double>(LevelSource<double> &, const DurationSchedule &,
                                                     std::uint64_t, std::uint32_t);
template BasicReturnSeries<Rational> run_exact<Rational>(LevelSource<Rational> &, const DurationSchedule &,
                                                         std::uint64_t, std::uint32_t);
template BasicReturnSeries<double> run_exact<double>(const Family &, const DurationSchedule &, std::uint64_t,
                                                     const RunOptions &);
template BasicReturnSeries<Rational> run_exact<Rational>(const Family &, const DurationSchedule &,
                                                         std::uint64_t, const RunOptions &);

} // namespace rwogg
