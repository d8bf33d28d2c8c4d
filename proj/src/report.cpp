#include "rwogg/report.hpp"

#include "rwogg/descriptor.hpp"
#include "rwogg/rng.hpp"

#include <chrono>
#include <ctime>

namespace rwogg {

namespace {

std::string opt(const std::optional<double> &x) { return x ? format_number(*x) : std::string(); }

} // namespace

void write_series_csv(std::ostream &out, const ReturnSeries &series) {
  out << "t,R,S,phase\n";
  for (std::size_t t = 0; t < series.R.size(); ++t)
    out << t << ',' << format_number(series.R[t]) << ',' << format_number(series.partial[t]) << ','
        << series.phase[t] << '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json meta_json(const RunMeta &meta, const std::string &timestamp) {
  nlohmann::ordered_json config{{"family", meta.family},   {"schedule", meta.schedule},
                                {"horizon", meta.horizon}, {"mode", meta.mode},
                                {"state_cap", meta.state_cap}};
  if (meta.mode == "monte-carlo") {
    config["walkers"] = meta.walkers;
    config["seed"] = meta.seed;
    config["threads"] = meta.threads;
  }
  return {{"version", kArtifactVersion},
          {"config", config},
          {"family", meta.family},
          {"schedule", meta.schedule},
          {"mode", meta.mode},
          {"seed", meta.seed},
          {"cap", meta.state_cap},
          {"rng_algorithm", std::string(kRngAlgorithm)},
          {"timestamp", timestamp}};
}

nlohmann::ordered_json verdict_json(const std::string &family, const std::string &schedule,
                                    const RecurrenceVerdict &verdict) {
  return {{"family", family},
          {"schedule", schedule},
          {"verdict", to_string(verdict.verdict)},
          {"theorem", verdict.theorem},
          {"series_term", verdict.series_term},
          {"convergence", to_string(verdict.convergence)},
          {"notes", verdict.notes}};
}

nlohmann::ordered_json dominance_json(const std::string &family, const std::string &f, const std::string &g,
                                      const DominanceReport &report) {
  return {{"version", kArtifactVersion},
          {"check", "exact"},
          {"family", family},
          {"f", f},
          {"g", g},
          {"horizon", report.horizon},
          {"max_violation", report.max_violation},
          {"worst_time", report.worst_time},
          {"tolerance", report.tolerance},
          {"arithmetic", report.exact_rational ? "rational" : "double"},
          {"pass", report.pass()}};
}

nlohmann::ordered_json coupling_json(const std::string &family, const std::string &f, const std::string &g,
                                     const CouplingReport &report, CouplingVariant variant) {
  return {{"version", kArtifactVersion},
          {"check", "coupling"},
          {"variant", variant == CouplingVariant::monotone ? "monotone" : "antithetic"},
          {"family", family},
          {"f", f},
          {"g", g},
          {"horizon", report.horizon},
          {"trials", report.trials},
          {"seed", report.seed},
          {"rng_algorithm", std::string(kRngAlgorithm)},
          {"violations", report.violations},
          {"identical", report.identical},
          {"pass", report.pass()}};
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"')
      q += '"';
    q += c;
  }
  return q + '"';
}

void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &rows) {
  out << "t,hX,hY,case_label,uniform_draw\n";
  for (const auto &r : rows)
    out << r.t << ',' << csv_field(r.hX) << ',' << csv_field(r.hY) << ',' << csv_field(r.label) << ','
        << format_number(r.uniform) << '\n';
}

void write_diagnostic_csv(std::ostream &out, const std::vector<DiagnosticRow> &rows) {
  out << "phase,d_n,p_n,increment,lower_bound,upper_bound\n";
  for (const auto &r : rows)
    out << r.phase << ',' << r.d_n << ',' << format_number(r.p_n) << ',' << format_number(r.increment) << ','
        << format_number(r.lower) << ',' << format_number(r.upper) << '\n';
}

void write_stationary_csv(std::ostream &out, const std::vector<StationaryRow> &rows) {
  out << "n,p_closed,p_numeric,lower,upper\n";
  for (const auto &r : rows)
    out << r.n << ',' << opt(r.p_closed) << ',' << opt(r.p_numeric) << ',' << opt(r.lower) << ',' << opt(r.upper)
        << '\n';
}

void write_matrix_coo(std::ostream &out, const SparseMatrix<Rational> &P) {
  out << "row,col,numerator,denominator\n";
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const auto &e : P.row(i))
      out << i << ',' << e.col << ',' << e.value.get_num().get_str() << ',' << e.value.get_den().get_str() << '\n';
}

} // namespace rwogg
