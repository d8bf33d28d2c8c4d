#include "rwogg/coupling.hpp"

#include "rwogg/engine.hpp"
#include "rwogg/error.hpp"
#include "rwogg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rwogg {

namespace {

double partner(double u, CouplingVariant v) { return v == CouplingVariant::antithetic ? 1.0 - u : u; }

/// -1 with probability down, 0 with probability stay, +1 otherwise.
std::int64_t move(double u, double down, double stay) {
  if (u < down)
    return -1;
  if (u < down + stay)
    return 0;
  return 1;
}

double tree_down(std::int64_t h, std::uint64_t n, double q) {
  if (h == 0)
    return 0.0;
  if (static_cast<std::uint64_t>(h) == n)
    return 1.0;
  return q;
}

std::string tree_label(std::int64_t hX, std::int64_t hY, std::uint64_t nX, std::uint64_t nY) {
  if (hX != hY)
    return hX == hY + 1 ? "adjacent" : "apart";
  const auto h = static_cast<std::uint64_t>(hX);
  if (h == 0)
    return "i-root";
  if (h == nY && h == nX)
    return "iii-leaves";
  if (h == nY)
    return "iv-x-internal-y-leaf";
  return "ii-internal";
}

void check_levels(std::uint64_t nX, std::uint64_t nY) {
  if (nX < nY)
    throw PreconditionError("coupling needs level nX >= nY");
}

} // namespace

ScalarStep coupled_step_tree(std::int64_t hX, std::int64_t hY, std::uint64_t nX, std::uint64_t nY,
                             std::uint32_t k, const Rational &lambda, double u, CouplingVariant variant) {
  check_levels(nX, nY);
  if (lambda >= k)
    throw PreconditionError("tree coupling needs lambda < k");
  if (variant == CouplingVariant::monotone && hX < hY)
    throw PreconditionError("tree coupling needs hX >= hY");
  const double q = Rational(lambda / (lambda + k)).get_d();
  ScalarStep s;
  s.label = tree_label(hX, hY, nX, nY);
  s.x = hX + move(u, tree_down(hX, nX, q), 0.0);
  s.y = hY + move(partner(u, variant), tree_down(hY, nY, q), 0.0);
  return s;
}

ScalarStep coupled_step_cube(std::int64_t wX, std::int64_t wY, std::uint64_t nX, std::uint64_t nY, double u,
                             CouplingVariant variant) {
  check_levels(nX, nY);
  if (variant == CouplingVariant::monotone && wX < wY)
    throw PreconditionError("cube coupling needs wX >= wY");
  ScalarStep s;
  s.label = wX != wY ? (wX == wY + 1 ? "adjacent" : "apart") : (wX == 0 ? "origin" : "equal-weight");
  s.x = wX + move(u, static_cast<double>(wX) / static_cast<double>(nX), 0.0);
  s.y = wY + move(partner(u, variant), static_cast<double>(wY) / static_cast<double>(nY), 0.0);
  return s;
}

ScalarStep coupled_step_leveltree(std::int64_t hX, std::int64_t hY, std::uint64_t nX, std::uint64_t nY,
                                  const LevelProfile &profile, const Rational &gamma, double u,
                                  CouplingVariant variant) {
  check_levels(nX, nY);
  const bool busy = gamma == 0;
  if (!busy && gamma < Rational(1, 2))
    throw PreconditionError("lazy level-tree coupling is unsupported for 0 < gamma < 1/2");
  if (variant == CouplingVariant::monotone) {
    if (hX < hY)
      throw PreconditionError("level-tree coupling needs hX >= hY");
    if (busy && (hX - hY) % 2 != 0)
      throw PreconditionError("busy level-tree coupling needs equal parity");
  }
  const double g = gamma.get_d();
  auto down = [&](std::int64_t h, std::uint64_t n) {
    if (h == 0)
      return 0.0;
    if (static_cast<std::uint64_t>(h) == n)
      return 1.0 - g;
    const auto c = profile.children(n)[static_cast<std::size_t>(h)];
    return (1.0 - g) / static_cast<double>(c + 1);
  };
  ScalarStep s;
  s.label = tree_label(hX, hY, nX, nY);
  s.x = hX + move(u, down(hX, nX), g);
  s.y = hY + move(partner(u, variant), down(hY, nY), g);
  return s;
}

std::string coupled_step_box(std::vector<std::int64_t> &X, std::vector<std::int64_t> &Y,
                             std::span<const std::uint64_t> boundX, std::span<const std::uint64_t> boundY,
                             double u, CouplingVariant variant) {
  const auto d = X.size();
  if (Y.size() != d || boundX.size() != d || boundY.size() != d)
    throw PreconditionError("box coupling dimension mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    if (boundX[i] < boundY[i])
      throw PreconditionError("box coupling needs bX >= bY per axis");
    if (variant == CouplingVariant::monotone && std::llabs(X[i]) < std::llabs(Y[i]))
      throw PreconditionError("box coupling needs |X_i| >= |Y_i|");
  }
  auto step = [d](std::vector<std::int64_t> &Z, std::span<const std::uint64_t> b, double v) {
    const auto scaled = v * static_cast<double>(d);
    const auto i = std::min<std::size_t>(d - 1, static_cast<std::size_t>(scaled));
    const double frac = scaled - static_cast<double>(i);
    auto &z = Z[i];
    if (z == 0) {
      z = frac < 0.5 ? -1 : 1;
    } else {
      const bool face = static_cast<std::uint64_t>(std::llabs(z)) == b[i];
      const bool inward = face || frac < 0.5;
      const std::int64_t sign = z > 0 ? 1 : -1;
      z += inward ? -sign : sign;
    }
    return i;
  };
  // Label from the coordinate the shared draw selects, before the move.
  const auto i = std::min<std::size_t>(d - 1, static_cast<std::size_t>(u * static_cast<double>(d)));
  const auto ax = static_cast<std::uint64_t>(std::llabs(X[i]));
  const auto ay = static_cast<std::uint64_t>(std::llabs(Y[i]));
  std::string label;
  if (ax != ay)
    label = "apart";
  else if (ay == 0)
    label = "i-zero";
  else if (ay == boundY[i] && ax == boundX[i])
    label = "iv-faces";
  else if (ay == boundY[i])
    label = "iii-y-face";
  else
    label = "ii-interior";
  step(X, boundX, u);
  step(Y, boundY, partner(u, variant));
  return label;
}

namespace {

enum class Kind { tree, cube, leveltree, box };

struct Setup {
  Kind kind;
  std::uint32_t k = 2;
  Rational lambda;
  LevelProfile profile;
  Rational gamma;
  std::size_t dims = 1;
};

Setup setup_for(const Family &family) {
  Setup s;
  if (auto *t = std::get_if<KaryTree>(&family)) {
    s = {Kind::tree, t->k, t->lambda, {}, 0, 1};
  } else if (auto *t = std::get_if<HeightPath>(&family)) {
    s = {Kind::tree, t->k, t->lambda, {}, 0, 1};
  } else if (std::holds_alternative<Hypercube>(family) || std::holds_alternative<HammingChain>(family)) {
    s.kind = Kind::cube;
  } else if (auto *t = std::get_if<LevelTree>(&family)) {
    s = {Kind::leveltree, 0, 0, t->profile, t->gamma, 1};
  } else if (auto *t = std::get_if<HeightChain>(&family)) {
    s = {Kind::leveltree, 0, 0, t->profile, t->gamma, 1};
  } else if (auto *b = std::get_if<Box>(&family)) {
    s.kind = Kind::box;
    s.dims = b->d;
  } else if (auto *g = std::get_if<GenBox>(&family)) {
    s.kind = Kind::box;
    s.dims = g->bounds.size();
  } else {
    throw PreconditionError("no coupling construction for this family");
  }
  if (s.kind == Kind::tree && s.lambda >= s.k)
    throw PreconditionError("tree coupling needs lambda < k");
  if (s.kind == Kind::leveltree && s.gamma != 0 && s.gamma < Rational(1, 2))
    throw PreconditionError("lazy level-tree coupling is unsupported for 0 < gamma < 1/2");
  return s;
}

std::string render(const std::vector<std::int64_t> &z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i)
    s += (i ? ";" : "") + std::to_string(z[i]);
  return s;
}

bool dominates(const std::vector<std::int64_t> &x, const std::vector<std::int64_t> &y, Kind kind) {
  if (kind != Kind::box)
    return x[0] >= y[0];
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::llabs(x[i]) < std::llabs(y[i]))
      return false;
  return true;
}

} // namespace

CouplingReport verify_coupling_sim(const Family &family, const DurationSchedule &f, const DurationSchedule &g,
                                   std::uint64_t horizon, std::uint64_t trials, std::uint64_t seed,
                                   CouplingVariant variant) {
  if (!prefix_dominates_within(f, g, horizon))
    throw PreconditionError("schedule f does not grow at least as fast as g");
  const auto setup = setup_for(family);
  const auto tf = PhaseTimeline::covering(f, horizon);
  const auto tg = PhaseTimeline::covering(g, horizon);

  std::map<std::uint64_t, std::vector<std::uint64_t>> bounds;
  auto bound_at = [&](std::uint64_t n) -> const std::vector<std::uint64_t> & {
    auto it = bounds.find(n);
    if (it == bounds.end())
      it = bounds.emplace(n, box_half_widths(family, n)).first;
    return it->second;
  };
  std::vector<std::uint64_t> nf(horizon), ng(horizon);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    nf[t] = tf.level_at(t);
    ng[t] = tg.level_at(t);
  }

  CouplingReport report;
  report.trials = trials;
  report.horizon = horizon;
  report.seed = seed;
  std::vector<TraceRow> trace;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    StreamRng rng(seed, trial);
    std::vector<std::int64_t> x(setup.dims, 0), y(setup.dims, 0);
    const bool keep = report.failure.empty();
    trace.clear();
    for (std::uint64_t t = 0; t < horizon; ++t) {
      const double u = rng.uniform();
      const auto nX = nf[t], nY = ng[t];
      std::string label;
      switch (setup.kind) {
      case Kind::tree: {
        auto s = coupled_step_tree(x[0], y[0], nX, nY, setup.k, setup.lambda, u, variant);
        x[0] = s.x, y[0] = s.y, label = std::move(s.label);
        break;
      }
      case Kind::cube: {
        auto s = coupled_step_cube(x[0], y[0], nX, nY, u, variant);
        x[0] = s.x, y[0] = s.y, label = std::move(s.label);
        break;
      }
      case Kind::leveltree: {
        auto s = coupled_step_leveltree(x[0], y[0], nX, nY, setup.profile, setup.gamma, u, variant);
        x[0] = s.x, y[0] = s.y, label = std::move(s.label);
        break;
      }
      case Kind::box:
        label = coupled_step_box(x, y, bound_at(nX), bound_at(nY), u, variant);
        break;
      }
      if (keep)
        trace.push_back({t + 1, render(x), render(y), label, u});
      if (x != y)
        report.identical = false;
      if (!dominates(x, y, setup.kind)) {
        ++report.violations;
        if (keep)
          report.failure = trace;
        break;
      }
    }
  }
  return report;
}

namespace {

template <class S>
DominanceReport dominance(const Family &family, const DurationSchedule &f, const DurationSchedule &g,
                          std::uint64_t horizon, const DominanceOptions &options) {
  RunOptions run;
  run.lumped = options.lumped && is_lumpable(family);
  run.state_cap = options.state_cap;
  auto rf = run_exact<S>(family, f, horizon, run);
  auto rg = run_exact<S>(family, g, horizon, run);
  DominanceReport rep;
  rep.horizon = horizon;
  rep.tolerance = options.tolerance;
  rep.exact_rational = std::is_same_v<S, Rational>;
  S worst = rf.R[0] - rg.R[0];
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    S diff = rf.R[t] - rg.R[t];
    if (diff > worst) {
      worst = diff;
      rep.worst_time = t;
    }
  }
  rep.max_violation = to_double(worst);
  return rep;
}

} // namespace

DominanceReport verify_lhagg_exact(const Family &family, const DurationSchedule &f, const DurationSchedule &g,
                                   std::uint64_t horizon, const DominanceOptions &options) {
  if (!prefix_dominates_within(f, g, horizon))
    throw PreconditionError("schedule f does not grow at least as fast as g; dominance is not expected");
  return options.rational ? dominance<Rational>(family, f, g, horizon, options)
                          : dominance<double>(family, f, g, horizon, options);
}

} // namespace rwogg
