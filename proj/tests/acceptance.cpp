// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "rwogg/analysis.hpp"
#include "rwogg/classify.hpp"
#include "rwogg/coupling.hpp"
#include "rwogg/descriptor.hpp"
#include "rwogg/engine.hpp"
#include "rwogg/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rwogg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char *title, const std::function<Outcome()> &body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception &e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass)
    ++failures;
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), sec);
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

DurationSchedule static_level(std::uint64_t n) {
  std::vector<std::uint64_t> d(n, 0);
  d.back() = 1;
  return DurationSchedule::explicit_list(d);
}

/// g random; f reaches every phase no later: T^f_n = max(T^f_{n-1}, T^g_n - r).
std::pair<DurationSchedule, DurationSchedule> random_pair(std::mt19937_64 &gen, std::size_t phases,
                                                          std::uint64_t max_duration) {
  std::uniform_int_distribution<std::uint64_t> dur(0, max_duration);
  std::vector<std::uint64_t> g(phases), f(phases);
  std::uint64_t tg = 0, tf = 0;
  for (std::size_t i = 0; i < phases; ++i) {
    g[i] = dur(gen);
    tg += g[i];
    std::uniform_int_distribution<std::uint64_t> slack(0, tg - tf);
    const auto next = std::max(tf, tg - slack(gen));
    f[i] = next - tf;
    tf = next;
  }
  return {DurationSchedule::explicit_list(f), DurationSchedule::explicit_list(g)};
}

// 1. Closed-form stationary distributions against the numeric fixed point.
Outcome closed_forms() {
  std::vector<std::pair<std::string, std::uint64_t>> cases;
  for (int k : {2, 3})
    for (const char *lam : {"0.5", "1", "2"})
      for (std::uint64_t n = 1; n <= 8; ++n)
        cases.emplace_back("karytree:k=" + std::to_string(k) + ",lambda=" + lam, n);
  for (int d = 1; d <= 4; ++d)
    for (std::uint64_t n = 1; n <= 3; ++n)
      cases.emplace_back("box:d=" + std::to_string(d), n);
  for (std::uint64_t n = 1; n <= 12; ++n)
    cases.emplace_back("hypercube", n);

  double worst = 0.0;
  std::string where;
  for (const auto &[desc, n] : cases) {
    const auto fam = parse_family(desc);
    const auto num = even_stationary_numeric(build_level<double>(fam, n));
    const auto closed = even_stationary_closed(fam, n);
    double err = std::abs(num.p - p_closed<double>(fam, n));
    for (std::size_t i = 0; i < num.pi.size(); ++i)
      err = std::max(err, std::abs(num.pi[i] - closed.pi[i]));
    if (err > worst) {
      worst = err;
      where = desc + " n=" + std::to_string(n);
    }
  }
  return {worst <= 1e-10, std::to_string(cases.size()) + " instances, max |closed - numeric| = " + fmt(worst) +
                              " at " + where};
}

// 2. Sandwich bounds on p(n).
Outcome sandwich() {
  std::size_t checked = 0, violations = 0;
  for (const char *desc : {"karytree:k=2,lambda=0.5", "karytree:k=2,lambda=1", "karytree:k=2,lambda=1.5",
                           "karytree:k=3,lambda=0.5", "karytree:k=3,lambda=1", "karytree:k=3,lambda=2"}) {
    const auto fam = parse_family(desc);
    LevelSource<double> lumped(fam, true);
    for (std::uint64_t n = 1; n <= 12; ++n) {
      const auto b = p_bounds(fam, n);
      for (double p : {even_stationary_numeric(lumped.level(n)).p, p_closed<double>(fam, n)}) {
        ++checked;
        if (p < b.lower || p > b.upper)
          ++violations;
      }
    }
  }
  for (std::uint32_t d = 1; d <= 4; ++d)
    for (std::uint64_t n = 1; n <= 4; ++n) {
      const Family fam = Box{d};
      const auto b = p_bounds(fam, n);
      for (double p : {even_stationary_numeric(build_level<double>(fam, n)).p, p_closed<double>(fam, n)}) {
        ++checked;
        if (p < b.lower || p > b.upper)
          ++violations;
      }
    }
  return {violations == 0, std::to_string(checked) + " checks, " + std::to_string(violations) + " violations"};
}

// 3. Projection identity in exact arithmetic.
Outcome projection() {
  std::mt19937_64 gen(3);
  std::vector<DurationSchedule> schedules{
      DurationSchedule::explicit_list({1, 1, 1, 1, 1, 1}), DurationSchedule::explicit_list({10, 20, 30, 40, 50, 60}),
      DurationSchedule::explicit_list({0, 3, 0, 7, 2, 5}), DurationSchedule::explicit_list({0, 0, 0, 0, 0, 1})};
  for (int i = 0; i < 4; ++i) {
    std::uniform_int_distribution<std::uint64_t> dur(0, 60);
    std::vector<std::uint64_t> d(6);
    for (auto &x : d)
      x = dur(gen);
    schedules.push_back(DurationSchedule::explicit_list(d));
  }
  std::size_t compared = 0, mismatches = 0;
  Rational worst = 0;
  for (const char *desc : {"karytree:k=2,lambda=1", "hypercube"}) {
    const auto fam = parse_family(desc);
    for (const auto &s : schedules) {
      RunOptions full, lumped;
      lumped.lumped = true;
      const auto a = run_exact<Rational>(fam, s, 200, full);
      const auto b = run_exact<Rational>(fam, s, 200, lumped);
      for (std::size_t t = 0; t < a.R.size(); ++t) {
        ++compared;
        Rational diff = abs(a.R[t] - b.R[t]);
        if (diff > worst)
          worst = diff;
        if (diff != 0)
          ++mismatches;
      }
    }
  }
  return {worst.get_d() <= 1e-12, std::to_string(compared) + " exact comparisons (levels <= 6, t <= 200), " +
                                      std::to_string(mismatches) + " nonzero differences"};
}

// 4. Monotone return probabilities of static reversible period-2 chains.
Outcome static_monotone() {
  std::vector<std::pair<std::string, std::uint64_t>> cases;
  for (int k : {2, 3})
    for (const char *lam : {"0.5", "1", "2"})
      for (std::uint64_t n = 1; n <= 6; ++n)
        cases.emplace_back("karytree:k=" + std::to_string(k) + ",lambda=" + lam, n);
  for (int d = 1; d <= 3; ++d)
    for (std::uint64_t n = 1; n <= 6; ++n)
      cases.emplace_back("box:d=" + std::to_string(d), n);
  for (std::uint64_t n = 1; n <= 6; ++n) {
    cases.emplace_back("hypercube", n);
    cases.emplace_back("genbox:b=1/n", n);
    cases.emplace_back("leveltree:profile=const:2,gamma=0", n);
    cases.emplace_back("star:M=linear,gamma=0", n);
  }
  std::size_t violations = 0;
  for (const auto &[desc, n] : cases) {
    const auto fam = parse_family(desc);
    const auto s = run_exact<double>(fam, static_level(n), 402);
    if (s.phase.front() != n || s.phase.back() != n)
      ++violations;
    const double p = p_closed<double>(fam, n);
    for (std::uint64_t t = 0; t <= 200; ++t) {
      if (s.R[2 * t + 2] > s.R[2 * t] + 1e-12)
        ++violations;
      if (s.R[2 * t] < p - 1e-12)
        ++violations;
    }
  }
  return {violations == 0, std::to_string(cases.size()) + " static instances, t <= 200, " +
                               std::to_string(violations) + " violations"};
}

// 5. Faster growth never raises the return probability.
Outcome lhagg() {
  const std::vector<const char *> families{"karytree:k=2,lambda=1", "karytree:k=3,lambda=0.5", "box:d=2",
                                           "hypercube", "leveltree:profile=const:2,gamma=0",
                                           "leveltree:profile=const:3,gamma=0.5", "leveltree:profile=const:2,gamma=0.75"};
  std::mt19937_64 gen(5);
  double worst = -1.0;
  std::uint64_t trajectories = 0, violations = 0;
  for (const char *desc : families) {
    const auto fam = parse_family(desc);
    for (int pair = 0; pair < 20; ++pair) {
      auto [f, g] = random_pair(gen, 10, 30);
      DominanceOptions opts;
      opts.lumped = is_lumpable(fam);
      auto rep = verify_lhagg_exact(fam, f, g, 200, opts);
      worst = std::max(worst, rep.max_violation);
      auto sim = verify_coupling_sim(fam, f, g, 500, 500, 1000 + pair);
      trajectories += sim.trials;
      violations += sim.violations;
    }
  }
  // Same rule evaluated in rationals on one box pair.
  auto [f, g] = random_pair(gen, 6, 10);
  DominanceOptions exact;
  exact.rational = true;
  exact.lumped = false;
  const auto r = verify_lhagg_exact(parse_family("box:d=2"), f, g, 60, exact);

  std::uint64_t control = 0;
  for (const char *desc : {"karytree:k=3,lambda=1", "box:d=2", "hypercube"}) {
    auto [cf, cg] = random_pair(gen, 8, 20);
    control += verify_coupling_sim(parse_family(desc), cf, cg, 500, 500, 77, CouplingVariant::antithetic).violations;
  }
  const bool pass = worst <= 1e-12 && r.max_violation <= 0.0 && violations == 0 && control > 0;
  return {pass, std::to_string(families.size()) + " families x 20 pairs: max_t(R_f - R_g) = " + fmt(worst) +
                    " (rational box check " + fmt(r.max_violation) + "); " + std::to_string(trajectories) +
                    " coupled trajectories x 500 steps, " + std::to_string(violations) +
                    " violations; antithetic control flagged " + std::to_string(control) + " trajectories"};
}

double slope(const std::vector<double> &x, const std::vector<double> &y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// 6. Mixing times.
Outcome mixing() {
  std::size_t path_checked = 0, path_bad = 0;
  for (const char *desc : {"heightpath:k=2,lambda=0.5", "heightpath:k=2,lambda=1", "heightpath:k=2,lambda=2",
                           "heightpath:k=3,lambda=0.5", "heightpath:k=3,lambda=1", "heightpath:k=3,lambda=2"}) {
    const auto fam = parse_family(desc);
    for (std::uint64_t n = 1; n <= 30; ++n) {
      const auto level = build_level<double>(fam, n);
      const auto pi = even_stationary_numeric(level).pi;
      for (double eps : {0.1, 0.01}) {
        ++path_checked;
        if (static_cast<double>(measure_even_mixing(level, pi, eps).time) > analytic_mixing_bound(fam, n, eps))
          ++path_bad;
      }
    }
  }

  const MixingConstants stored;
  const auto recal = calibrate_mixing_constants();
  bool ok = path_bad == 0 && std::abs(recal.box - stored.box) <= 0.01 && std::abs(recal.cube - stored.cube) <= 0.01;
  std::string detail = "path: " + std::to_string(path_checked) + " points, " + std::to_string(path_bad) +
                       " above n^2 ln(1/eps); calibrated C_box=" + fmt(recal.box) + " C_cube=" + fmt(recal.cube);

  struct Series {
    std::string desc;
    std::vector<std::uint64_t> ns;
    double constant;
  };
  const std::vector<Series> series{{"box:d=1", {4, 6, 8, 12, 16, 24, 32}, stored.box},
                                   {"box:d=2", {4, 6, 8, 10, 12}, stored.box},
                                   {"box:d=3", {4, 5, 6, 7}, stored.box},
                                   {"box:d=4", {4, 5}, stored.box},
                                   {"hypercube", {9, 10, 11, 12, 13, 14}, stored.cube}};
  MixingConstants unit;
  unit.box = unit.cube = 1.0;
  double worst_ratio = 0.0, worst_slope = 0.0;
  for (const auto &s : series) {
    const auto fam = parse_family(s.desc);
    for (double eps : {0.1, 0.01}) {
      std::vector<double> lx, ly;
      double log_ratio = 0.0;
      for (auto n : s.ns) {
        const auto level = build_level<double>(fam, n);
        const auto pi = even_stationary_closed(fam, n).pi;
        const auto m = measure_even_mixing(level, pi, eps, 1, 10'000'000, mixing_start_representatives(fam, n));
        const double form = analytic_mixing_bound(fam, n, eps, unit);
        const double measured = static_cast<double>(m.time);
        worst_ratio = std::max(worst_ratio, measured / (s.constant * form));
        lx.push_back(std::log(form));
        ly.push_back(std::log(measured));
        log_ratio += std::log(measured / form);
      }
      const double fitted = std::exp(log_ratio / static_cast<double>(s.ns.size()));
      const double sl = s.ns.size() > 1 ? slope(lx, ly) : 1.0;
      worst_slope = std::max(worst_slope, sl);
      if (fitted > 2 * s.constant || fitted < s.constant / 2 || sl > 1.15)
        ok = false;
    }
  }
  ok = ok && worst_ratio <= 2.0;
  detail += "; larger n: max measured/(C form) = " + fmt(worst_ratio) + ", max log-log slope vs form = " +
            fmt(worst_slope);
  return {ok, detail};
}

// 7. Golden classification table.
Outcome golden() {
  struct Row {
    const char *family, *schedule;
    Verdict want;
  };
  const auto R = Verdict::recurrent, T = Verdict::transient, U = Verdict::undecided;
  const std::vector<Row> rows{
      // biased trees, two-sided
      {"karytree:k=2,lambda=1", "symbolic:base=2,a=1,b=1,d1=4", R},
      {"karytree:k=2,lambda=1", "symbolic:base=2,a=1,b=1.5,d1=4", T},
      {"karytree:k=2,lambda=1", "symbolic:base=2,a=1,b=0,d1=4", R},
      {"karytree:k=2,lambda=1", "symbolic:base=2,a=2,b=0,d1=4", T},
      {"karytree:k=3,lambda=1", "symbolic:base=3,a=1,b=1,d1=2", R},
      {"karytree:k=3,lambda=1", "symbolic:base=3,a=1,b=2,d1=2", T},
      {"karytree:k=3,lambda=1", "symbolic:base=2,a=0,b=0,d1=2", T},
      {"karytree:k=2,lambda=0.5", "symbolic:base=4,a=1,b=1,d1=2", R},
      {"karytree:k=2,lambda=0.5", "symbolic:base=4,a=1.1,b=0,d1=2", T},
      {"karytree:k=2,lambda=2", "symbolic:base=1,a=0,b=0,d1=1", R},
      {"karytree:k=2,lambda=3", "symbolic:base=0.5,a=3,b=0,d1=1", R},
      // boxes, d >= 4
      {"box:d=4", "symbolic:base=1,a=-3,b=0,d1=1", R},
      {"box:d=4", "symbolic:base=1,a=-2.5,b=0,d1=1", T},
      {"box:d=5", "symbolic:base=1,a=-4,b=0,d1=1", R},
      {"box:d=5", "symbolic:base=1,a=-3.9,b=0,d1=1", T},
      {"box:d=4", "symbolic:base=1,a=-3,b=-1,d1=1", R},
      {"box:d=4", "symbolic:base=1,a=-3,b=2,d1=1", T},
      {"box:d=3", "symbolic:base=1,a=-2,b=0,d1=1", U},
      // hypercube
      {"hypercube", "symbolic:base=2,a=1,b=0,d1=2", R},
      {"hypercube", "symbolic:base=2,a=1.5,b=0,d1=2", T},
      {"hypercube", "symbolic:base=2,a=1,b=1,d1=2", R},
      {"hypercube", "symbolic:base=2,a=1,b=1.5,d1=2", T},
      {"hypercube", "explicit:1,2,3", U},
      // stars
      {"star:M=linear,gamma=0", "symbolic:base=1,a=0,b=0,d1=1", R},
      {"star:M=nlogn,gamma=0", "symbolic:base=1,a=0,b=0,d1=1", R},
      {"star:M=pow:2,gamma=0", "symbolic:base=1,a=0,b=0,d1=1", T},
      {"star:M=exp:2,gamma=0.5", "symbolic:base=1,a=0,b=0,d1=1", T},
      {"star:M=const:3,gamma=0.5", "symbolic:base=1,a=0,b=0,d1=1", R},
      // one-sided: generalised boxes and level trees
      {"genbox:b=n/n/n", "symbolic:base=1,a=-2,b=0,d1=1", R},
      {"genbox:b=n/n/n", "symbolic:base=1,a=-1,b=0,d1=1", U},
      {"genbox:b=n/n/n/n/n", "symbolic:base=1,a=-3,b=0,d1=1", T},
      {"leveltree:profile=const:2,gamma=0", "symbolic:base=2,a=1,b=0,d1=2", R},
      {"leveltree:profile=const:2,gamma=0", "symbolic:base=2,a=2,b=0,d1=2", U},
      {"leveltree:profile=const:3,gamma=0.5", "symbolic:base=3,a=1,b=1,d1=2", R},
      {"leveltree:profile=const:3,gamma=0.5", "symbolic:base=3,a=1,b=2,d1=2", U},
      {"leveltree:profile=const:2,gamma=0.25", "symbolic:base=2,a=0,b=0,d1=2", U},
  };
  std::size_t wrong = 0;
  std::string first;
  for (const auto &row : rows) {
    const auto got = classify(parse_family(row.family), parse_schedule(row.schedule)).verdict;
    if (got != row.want) {
      if (wrong++ == 0)
        first = std::string(" first: ") + row.family + " " + row.schedule + " -> " + to_string(got);
    }
  }
  return {wrong == 0, std::to_string(rows.size()) + " rows, " + std::to_string(wrong) + " mismatches" + first};
}

// 8. Finite-horizon contrast on the binary tree.
Outcome phase_contrast() {
  const Family tree = KaryTree{2, 1};
  auto p = [](std::uint64_t n) { return p_karytree<double>(2, 1, n); };
  std::string detail;
  bool ok = true;
  for (const char *desc : {"symbolic:base=2,a=1,b=1,d1=2,round=ceil", "symbolic:base=2,a=1,b=2,d1=2,round=ceil"}) {
    const bool recurrent_side = std::string(desc).find("b=1,") != std::string::npos;
    const auto sched = parse_schedule(desc);
    const PhaseTimeline timeline(sched, 14);
    RunOptions opts;
    opts.lumped = true;
    const auto series = run_exact<double>(tree, sched, timeline.end_of(14), opts);
    const auto rows = series_diagnostic(series, sched, p);
    std::size_t bad = 0;
    double last = 0.0;
    for (const auto &r : rows) {
      if (recurrent_side ? r.increment < r.lower - 1e-12 : r.increment > r.upper + 1e-12)
        ++bad;
      last = r.increment;
    }
    ok = ok && bad == 0 && rows.size() == 14;
    detail += std::string(recurrent_side ? "rec side " : "; trans side ") + std::to_string(rows.size()) +
              " phases, " + std::to_string(bad) + " bound violations, S(T_14)=" +
              fmt(series.partial.back()) + ", last increment " + fmt(last);
  }
  return {ok, detail};
}

// 9. Monte Carlo against exact, and reproducibility.
Outcome monte_carlo() {
  const Family cube = Hypercube{};
  const auto sched = parse_schedule("symbolic:base=1,a=0,b=0,d1=4,c=4");
  const std::uint64_t N = 100000;
  const auto exact = run_exact<double>(cube, sched, 40);
  const auto a = run_monte_carlo(cube, sched, 40, N, 2024);
  MonteCarloOptions two;
  two.threads = 2;
  const auto b = run_monte_carlo(cube, sched, 40, N, 2024, two);
  std::size_t outside = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t <= 40; ++t) {
    const double r = exact.R[t];
    const double se = std::sqrt(r * (1 - r) / static_cast<double>(N));
    const double dev = std::abs(a.R[t] - r);
    if (se == 0.0 ? dev > 1e-15 : dev > 4 * se)
      ++outside;
    if (se > 0)
      worst = std::max(worst, dev / se);
  }
  std::ostringstream ca, cb;
  write_series_csv(ca, a);
  write_series_csv(cb, b);
  const bool same = ca.str() == cb.str();
  return {outside == 0 && same, "1e5 walkers, t <= 40: " + std::to_string(outside) +
                                    " points beyond 4 SE (max " + fmt(worst) + " SE); reruns byte-identical: " +
                                    (same ? "yes" : "no")};
}

// 10. Hitting a fixed vertex of V_2.
Outcome hitting() {
  const Family cube = Hypercube{};
  const auto sched = parse_schedule("symbolic:base=2,a=-1,b=0,d1=4,c=2");
  const PhaseTimeline timeline(sched, 6);
  const auto horizon = timeline.end_of(6);
  const std::uint32_t target = 0b11; // (1,1)
  const auto mc = hitting_experiment(cube, sched, target, 2, horizon, 200, 11);
  const double exact = hitting_probability_exact(cube, sched, target, 2, horizon);
  const double frac = mc.hit_fraction();
  const double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / 200.0);
  const bool ok = frac >= 0.95 && std::abs(frac - exact) <= 4 * se + 1.0 / 200;
  return {ok, "d(n) = n 2^(n+1), hits by T_6 = " + std::to_string(horizon) + ": " + fmt(100 * frac) +
                  "% of 200 trials; exact absorbing-chain miss probability " + fmt(1 - exact)};
}

} // namespace

int main() {
  run(1, "closed-form stationary distributions", closed_forms);
  run(2, "sandwich bounds", sandwich);
  run(3, "projection identity", projection);
  run(4, "static monotonicity", static_monotone);
  run(5, "dominance under faster growth", lhagg);
  run(6, "mixing bounds", mixing);
  run(7, "classifier golden table", golden);
  run(8, "finite-horizon phase contrast", phase_contrast);
  run(9, "Monte Carlo consistency", monte_carlo);
  run(10, "hitting experiment", hitting);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
