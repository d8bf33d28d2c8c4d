#include "rwogg/analysis.hpp"
#include "rwogg/classify.hpp"
#include "rwogg/coupling.hpp"
#include "rwogg/descriptor.hpp"
#include "rwogg/engine.hpp"
#include "rwogg/error.hpp"
#include "rwogg/report.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace rwogg;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kCap = 3 };

std::ofstream open_out(const fs::path &path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write " + path.string());
  return out;
}

/// Writes to `path`, or to stdout when it is empty or "-".
template <class F> void emit(const std::string &path, F &&write) {
  if (path.empty() || path == "-") {
    write(std::cout);
  } else {
    auto out = open_out(path);
    write(out);
  }
}

ReturnSeries to_double(const BasicReturnSeries<Rational> &r) {
  ReturnSeries s;
  s.phase = r.phase;
  s.boundaries = r.boundaries;
  for (const auto &x : r.R)
    s.R.push_back(x.get_d());
  for (const auto &x : r.partial)
    s.partial.push_back(x.get_d());
  return s;
}

struct SimulateArgs {
  std::string family, schedule, mode = "exact", arithmetic = "double", out = ".";
  std::uint64_t horizon = 100, walkers = 0, seed = 0, cap = kDefaultStateCap;
  unsigned threads = 1;
  bool lumped_mc = false, diagnostic = false, seed_given = false;
};

int cmd_simulate(const SimulateArgs &a) {
  const auto family = parse_family(a.family);
  const auto schedule = parse_schedule(a.schedule);
  ReturnSeries series;
  if (a.mode == "exact" || a.mode == "exact-lumped") {
    RunOptions opts;
    opts.lumped = a.mode == "exact-lumped";
    opts.state_cap = a.cap;
    if (opts.lumped && !is_lumpable(family))
      throw ConfigError("family " + a.family + " has no lumped chain");
    if (a.arithmetic == "rational")
      series = to_double(run_exact<Rational>(family, schedule, a.horizon, opts));
    else
      series = run_exact<double>(family, schedule, a.horizon, opts);
  } else {
    if (a.walkers < 1 || !a.seed_given)
      throw ConfigError("monte-carlo mode needs --walkers >= 1 and --seed");
    MonteCarloOptions opts;
    opts.lumped = a.lumped_mc;
    opts.state_cap = a.cap;
    opts.threads = a.threads;
    series = run_monte_carlo(family, schedule, a.horizon, a.walkers, a.seed, opts);
  }

  const fs::path dir = a.out;
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "series.csv");
    write_series_csv(out, series);
  }
  RunMeta meta{format_family(family), format_schedule(schedule), a.horizon, a.mode, a.walkers, a.seed, a.cap,
                a.threads};
  auto json = meta_json(meta, utc_timestamp());
  if (a.mode != "monte-carlo")
    json["arithmetic"] = a.arithmetic;
  {
    auto out = open_out(dir / "meta.json");
    out << json.dump(2) << '\n';
  }
  if (a.diagnostic) {
    auto rows = series_diagnostic(series, schedule, [&](std::uint64_t n) { return p_closed<double>(family, n); });
    auto out = open_out(dir / "diagnostic.csv");
    write_diagnostic_csv(out, rows);
  }
  return kOk;
}

template <class F> std::optional<double> maybe(F &&f) {
  try {
    return f();
  } catch (const PreconditionError &) {
    return std::nullopt;
  }
}

struct StationaryArgs {
  std::string family, out, dump_matrix;
  std::uint64_t n_min = 1, n_max = 8, cap = kDefaultStateCap;
  bool lumped = false, no_numeric = false;
};

int cmd_stationary(const StationaryArgs &a) {
  const auto family = parse_family(a.family);
  if (a.n_min < 1 || a.n_max < a.n_min)
    throw ConfigError("need 1 <= --n-min <= --n-max");
  if (a.lumped && !is_lumpable(family))
    throw ConfigError("family " + a.family + " has no lumped chain");
  LevelSource<double> source(family, a.lumped, a.cap);
  std::vector<StationaryRow> rows;
  for (std::uint64_t n = a.n_min; n <= a.n_max; ++n) {
    StationaryRow row;
    row.n = n;
    row.p_closed = maybe([&] { return p_closed<double>(family, n); });
    if (!a.no_numeric)
      row.p_numeric = even_stationary_numeric(source.level(n)).p;
    if (auto b = maybe([&] { return p_bounds(family, n).lower; })) {
      row.lower = b;
      row.upper = p_bounds(family, n).upper;
    }
    rows.push_back(row);
  }
  emit(a.out, [&](std::ostream &o) { write_stationary_csv(o, rows); });
  if (!a.dump_matrix.empty()) {
    auto P = build_level<Rational>(a.lumped ? lump_by_height(family) : family, a.n_max, a.cap).matrix;
    emit(a.dump_matrix, [&](std::ostream &o) { write_matrix_coo(o, P); });
  }
  return kOk;
}

struct MixingArgs {
  std::string family, out;
  std::vector<std::uint64_t> n{2, 4, 8};
  std::vector<double> epsilon{0.1, 0.01};
  std::uint64_t cap = kDefaultStateCap;
  bool lumped = false;
  unsigned threads = 1;
  double box_constant = MixingConstants{}.box, cube_constant = MixingConstants{}.cube;
};

int cmd_mixing(const MixingArgs &a) {
  const auto family = parse_family(a.family);
  if (a.lumped && !is_lumpable(family))
    throw ConfigError("family " + a.family + " has no lumped chain");
  for (double e : a.epsilon)
    if (!(e > 0 && e < 1))
      throw ConfigError("--epsilon values must lie in (0, 1)");
  MixingConstants constants;
  constants.box = a.box_constant;
  constants.cube = a.cube_constant;
  LevelSource<double> source(family, a.lumped, a.cap);
  std::ostringstream buf;
  buf << "n,epsilon,measured,bound,calibrated_constant\n";
  for (auto n : a.n) {
    const auto &level = source.level(n);
    std::vector<double> pi;
    if (!a.lumped) {
      if (auto closed = maybe([&] { return even_stationary_closed(family, n).p; }))
        pi = even_stationary_closed(family, n).pi;
    }
    if (pi.empty())
      pi = even_stationary_numeric(level).pi;
    const auto reps = a.lumped ? std::vector<std::uint32_t>{} : mixing_start_representatives(family, n);
    for (double eps : a.epsilon) {
      auto m = measure_even_mixing(level, pi, eps, a.threads, 10'000'000, reps);
      auto bound = maybe([&] { return analytic_mixing_bound(family, n, eps, constants); });
      const bool calibrated = !std::holds_alternative<KaryTree>(family) && !std::holds_alternative<HeightPath>(family);
      buf << n << ',' << format_number(eps) << ',' << m.time << ',' << (bound ? format_number(*bound) : "") << ','
          << (bound ? (calibrated ? "true" : "false") : "") << '\n';
    }
  }
  emit(a.out, [&](std::ostream &o) { o << buf.str(); });
  return kOk;
}

struct ClassifyArgs {
  std::string family, schedule, out;
};

int cmd_classify(const ClassifyArgs &a) {
  const auto family = parse_family(a.family);
  const auto schedule = parse_schedule(a.schedule);
  auto v = classify(family, schedule);
  auto json = verdict_json(format_family(family), format_schedule(schedule), v);
  emit(a.out, [&](std::ostream &o) { o << json.dump(2) << '\n'; });
  return kOk;
}

struct LhaggArgs {
  std::string family, f, g, mode = "exact", out = "lhagg.json", trace;
  std::uint64_t horizon = 200, trials = 1000, seed = 1, cap = kDefaultStateCap;
  double tolerance = 1e-12;
  bool rational = false, full = false, negative_control = false;
};

int cmd_lhagg(const LhaggArgs &a) {
  const auto family = parse_family(a.family);
  const auto f = parse_schedule(a.f);
  const auto g = parse_schedule(a.g);
  const auto fam = format_family(family), fs_ = format_schedule(f), gs = format_schedule(g);
  if (!prefix_dominates_within(f, g, a.horizon))
    throw ConfigError("f must reach every phase no later than g within the horizon");
  bool pass = false;
  nlohmann::ordered_json json;
  if (a.mode == "exact") {
    if (a.negative_control)
      throw ConfigError("--negative-control applies to --mode coupling");
    DominanceOptions opts;
    opts.tolerance = a.tolerance;
    opts.rational = a.rational;
    opts.lumped = !a.full && is_lumpable(family);
    opts.state_cap = a.cap;
    auto rep = verify_lhagg_exact(family, f, g, a.horizon, opts);
    json = dominance_json(fam, fs_, gs, rep);
    pass = rep.pass();
  } else {
    const auto variant = a.negative_control ? CouplingVariant::antithetic : CouplingVariant::monotone;
    auto rep = verify_coupling_sim(family, f, g, a.horizon, a.trials, a.seed, variant);
    json = coupling_json(fam, fs_, gs, rep, variant);
    pass = rep.pass();
    if (!a.trace.empty() && !rep.failure.empty())
      emit(a.trace, [&](std::ostream &o) { write_trace_csv(o, rep.failure); });
  }
  emit(a.out, [&](std::ostream &o) { o << json.dump(2) << '\n'; });
  std::cerr << (pass ? "dominance holds" : "dominance violated") << '\n';
  return pass ? kOk : kVerifyFailed;
}

struct SweepArgs {
  std::vector<std::string> families;
  std::vector<double> bases, as, bs;
  std::uint64_t d1 = 1, horizon = 2000, cap = kDefaultStateCap;
  double c = 1.0;
  std::string round = "nearest", out;
  unsigned jobs = 1;
};

struct SweepRow {
  std::string family, schedule, verdict, s_last, phases, error;
};

SweepRow run_cell(const std::string &family_text, const std::string &schedule_text, const SweepArgs &a) {
  SweepRow row{family_text, schedule_text, "", "", "", ""};
  try {
    const auto family = parse_family(family_text);
    const auto schedule = parse_schedule(schedule_text);
    row.family = format_family(family);
    row.schedule = format_schedule(schedule);
    row.verdict = to_string(classify(family, schedule).verdict);
    RunOptions opts;
    opts.lumped = is_lumpable(family);
    opts.state_cap = a.cap;
    auto series = run_exact<double>(family, schedule, a.horizon, opts);
    row.phases = std::to_string(series.boundaries.size());
    row.s_last = series.boundaries.empty() ? "0" : format_number(series.partial[series.boundaries.back().second]);
  } catch (const StateCapExceeded &e) {
    row.error = std::string("state cap exceeded: ") + e.what();
  } catch (const std::exception &e) {
    row.error = e.what();
  }
  return row;
}

int cmd_sweep(const SweepArgs &a) {
  if (a.round != "nearest" && a.round != "ceil")
    throw ConfigError("--round must be nearest or ceil");
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto &fam : a.families)
    for (double base : a.bases)
      for (double av : a.as)
        for (double bv : a.bs) {
          std::string s = "symbolic:base=" + format_number(base) + ",a=" + format_number(av) +
                          ",b=" + format_number(bv) + ",d1=" + std::to_string(a.d1);
          if (a.c != 1.0)
            s += ",c=" + format_number(a.c);
          if (a.round == "ceil")
            s += ",round=ceil";
          cells.emplace_back(fam, s);
        }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();)
      rows[i] = run_cell(cells[i].first, cells[i].second, a);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  emit(a.out, [&](std::ostream &o) {
    o << "family_params,schedule_params,verdict,S_at_last_phase,phases_computed,error\n";
    for (const auto &r : rows)
      o << csv_field(r.family) << ',' << csv_field(r.schedule) << ',' << r.verdict << ',' << r.s_last << ','
        << r.phases << ',' << csv_field(r.error) << '\n';
  });
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Random walks on growing graphs: exact return series, stationary and mixing analysis, "
               "recurrence classification, dominance checks"};
  app.set_config("--config", "", "INI file; [section] names match subcommands, keys match flag names");
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  SimulateArgs sim;
  auto *simulate = app.add_subcommand("simulate", "return series R(t), S(t) -> series.csv, meta.json");
  simulate->add_option("--family", sim.family, "family descriptor")->required();
  simulate->add_option("--schedule", sim.schedule, "schedule descriptor")->required();
  simulate->add_option("--horizon", sim.horizon, "last time step")->capture_default_str();
  simulate->add_option("--mode", sim.mode)->check(CLI::IsMember({"exact", "exact-lumped", "monte-carlo"}))
      ->capture_default_str();
  simulate->add_option("--arithmetic", sim.arithmetic, "exact modes: double or rational")
      ->check(CLI::IsMember({"double", "rational"}))
      ->capture_default_str();
  simulate->add_option("--walkers", sim.walkers, "monte-carlo walkers");
  auto *seed_opt = simulate->add_option("--seed", sim.seed, "monte-carlo seed");
  simulate->add_option("--threads", sim.threads, "monte-carlo worker threads")->capture_default_str();
  simulate->add_flag("--lumped", sim.lumped_mc, "monte-carlo on the lumped chain");
  simulate->add_option("--cap", sim.cap, "state-count cap")->capture_default_str();
  simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
  simulate->add_flag("--diagnostic", sim.diagnostic, "also write diagnostic.csv (families with closed p(n))");

  StationaryArgs st;
  auto *stationary = app.add_subcommand("stationary", "p(n): closed form, numeric fixed point, bounds");
  stationary->add_option("--family", st.family)->required();
  stationary->add_option("--n-min", st.n_min)->capture_default_str();
  stationary->add_option("--n-max", st.n_max)->capture_default_str();
  stationary->add_flag("--lumped", st.lumped, "numeric solve on the lumped chain");
  stationary->add_flag("--no-numeric", st.no_numeric, "skip the numeric column");
  stationary->add_option("--cap", st.cap)->capture_default_str();
  stationary->add_option("--out", st.out, "CSV path (default stdout)");
  stationary->add_option("--dump-matrix", st.dump_matrix, "write P(n-max) as row,col,num,den");

  MixingArgs mx;
  auto *mixing = app.add_subcommand("mixing", "measured even mixing time vs analytic bound");
  mixing->add_option("--family", mx.family)->required();
  mixing->add_option("--n", mx.n)->capture_default_str();
  mixing->add_option("--epsilon", mx.epsilon)->capture_default_str();
  mixing->add_flag("--lumped", mx.lumped);
  mixing->add_option("--threads", mx.threads)->capture_default_str();
  mixing->add_option("--box-constant", mx.box_constant, "calibrated box constant")->capture_default_str();
  mixing->add_option("--cube-constant", mx.cube_constant, "calibrated hypercube constant")->capture_default_str();
  mixing->add_option("--cap", mx.cap)->capture_default_str();
  mixing->add_option("--out", mx.out, "CSV path (default stdout)");

  ClassifyArgs cl;
  auto *classify_cmd = app.add_subcommand("classify", "recurrence verdict as JSON");
  classify_cmd->add_option("--family", cl.family)->required();
  classify_cmd->add_option("--schedule", cl.schedule)->required();
  classify_cmd->add_option("--out", cl.out, "JSON path (default stdout)");

  LhaggArgs lh;
  auto *lhagg = app.add_subcommand("lhagg", "check R_f(t) <= R_g(t); exit 1 on violation");
  lhagg->add_option("--family", lh.family)->required();
  lhagg->add_option("--f", lh.f, "faster-growing schedule")->required();
  lhagg->add_option("--g", lh.g, "slower-growing schedule")->required();
  lhagg->add_option("--horizon", lh.horizon)->capture_default_str();
  lhagg->add_option("--mode", lh.mode)->check(CLI::IsMember({"exact", "coupling"}))->capture_default_str();
  lhagg->add_option("--trials", lh.trials)->capture_default_str();
  lhagg->add_option("--seed", lh.seed)->capture_default_str();
  lhagg->add_option("--tolerance", lh.tolerance)->capture_default_str();
  lhagg->add_flag("--rational", lh.rational, "exact mode in rationals");
  lhagg->add_flag("--full", lh.full, "exact mode on the full chain even when a lumped one exists");
  lhagg->add_flag("--negative-control", lh.negative_control, "coupling mode with the antithetic coupling");
  lhagg->add_option("--cap", lh.cap)->capture_default_str();
  lhagg->add_option("--out", lh.out, "report JSON path")->capture_default_str();
  lhagg->add_option("--trace", lh.trace, "CSV path for the first failing trajectory");

  SweepArgs sw;
  auto *sweep = app.add_subcommand("sweep", "classify and simulate every cell of a schedule grid");
  sweep->add_option("--family", sw.families, "family descriptors");
  sweep->add_option("--base", sw.bases);
  sweep->add_option("--a", sw.as);
  sweep->add_option("--b", sw.bs);
  sweep->add_option("--d1", sw.d1)->capture_default_str();
  sweep->add_option("--c", sw.c, "schedule scale")->capture_default_str();
  sweep->add_option("--round", sw.round)->capture_default_str();
  sweep->add_option("--horizon", sw.horizon, "time steps per cell")->capture_default_str();
  sweep->add_option("--jobs", sw.jobs)->capture_default_str();
  sweep->add_option("--cap", sw.cap)->capture_default_str();
  sweep->add_option("--out", sw.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kConfig;
  }
  sim.seed_given = seed_opt->count() > 0;

  try {
    if (*simulate)
      return cmd_simulate(sim);
    if (*stationary)
      return cmd_stationary(st);
    if (*mixing)
      return cmd_mixing(mx);
    if (*classify_cmd)
      return cmd_classify(cl);
    if (*lhagg)
      return cmd_lhagg(lh);
    if (*sweep)
      return cmd_sweep(sw);
  } catch (const StateCapExceeded &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCap;
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const PreconditionError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kConfig;
}
