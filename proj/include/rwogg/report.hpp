#ifndef RWOGG_REPORT_HPP
#define RWOGG_REPORT_HPP

#include "rwogg/analysis.hpp"
#include "rwogg/classify.hpp"
#include "rwogg/coupling.hpp"
#include "rwogg/engine.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rwogg {

inline constexpr const char *kArtifactVersion = "1.0.0";

/// `t,R,S,phase`, one row per time step.
void write_series_csv(std::ostream &out, const ReturnSeries &series);

struct RunMeta {
  std::string family;
  std::string schedule;
  std::uint64_t horizon = 0;
  std::string mode;
  std::uint64_t walkers = 0;
  std::uint64_t seed = 0;
  std::uint64_t state_cap = 0;
  unsigned threads = 1;
};

/// Run metadata: artifact version, config echo, RNG identifier, timestamp.
/// The timestamp is the only field that differs between identical runs.
nlohmann::ordered_json meta_json(const RunMeta &meta, const std::string &timestamp);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

nlohmann::ordered_json verdict_json(const std::string &family, const std::string &schedule,
                                    const RecurrenceVerdict &verdict);

nlohmann::ordered_json dominance_json(const std::string &family, const std::string &f, const std::string &g,
                                      const DominanceReport &report);

nlohmann::ordered_json coupling_json(const std::string &family, const std::string &f, const std::string &g,
                                     const CouplingReport &report, CouplingVariant variant);

/// `t,hX,hY,case_label,uniform_draw`.
void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &rows);

/// `phase,d_n,p_n,increment,lower_bound,upper_bound`.
void write_diagnostic_csv(std::ostream &out, const std::vector<DiagnosticRow> &rows);

struct StationaryRow {
  std::uint64_t n = 0;
  std::optional<double> p_closed;
  std::optional<double> p_numeric;
  std::optional<double> lower;
  std::optional<double> upper;
};

/// `n,p_closed,p_numeric,lower,upper`; missing values are left empty.
void write_stationary_csv(std::ostream &out, const std::vector<StationaryRow> &rows);

/// Coordinate list `row,col,numerator,denominator`.
void write_matrix_coo(std::ostream &out, const SparseMatrix<Rational> &P);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string &s);

} // namespace rwogg

#endif
