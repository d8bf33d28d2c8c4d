#include "rwogg/classify.hpp"

#include <cmath>

namespace rwogg {

namespace {

constexpr double kTol = 1e-12;

Verdict from_divergence(SeriesStatus s) {
  return s == SeriesStatus::diverges ? Verdict::recurrent : Verdict::transient;
}

RecurrenceVerdict two_sided(std::string theorem, std::string term, SeriesStatus s) {
  RecurrenceVerdict v;
  v.verdict = from_divergence(s);
  v.theorem = std::move(theorem);
  v.series_term = std::move(term);
  v.convergence = s;
  return v;
}

RecurrenceVerdict undecided(std::string theorem, std::string note) {
  RecurrenceVerdict v;
  v.theorem = std::move(theorem);
  v.notes.push_back(std::move(note));
  return v;
}

RecurrenceVerdict classify_tree(std::uint32_t k, const Rational &lambda, const GrowthLaw &d) {
  if (lambda >= k) {
    RecurrenceVerdict v;
    v.verdict = Verdict::recurrent;
    v.theorem = "tree-drift";
    v.series_term = "lambda >= k";
    v.notes.push_back("the biased walk drifts to the root; recurrent for every schedule");
    return v;
  }
  const double rho = lambda.get_d() / k;
  return two_sided("tree-series", "sum d(n) (lambda/k)^n", decide_weighted(d, 0, rho, 0, 0));
}

RecurrenceVerdict classify_level_tree(const LevelProfile &profile, const Rational &gamma, const GrowthLaw &d) {
  if (!profile.is_uniform())
    return undecided("level-tree", "table profiles have no symbolic tail for |E_n|");
  // |E_n| = |V_n| - 1 grows like k^n.
  const double rho = 1.0 / profile.uniform;
  RecurrenceVerdict v;
  if (gamma == 0) {
    v.theorem = "level-tree-busy";
    v.series_term = "sum (d(n)-1) / |E_n|";
    v.convergence = decide_weighted(d, 1, rho, 0, 0);
  } else if (gamma >= Rational(1, 2)) {
    v.theorem = "level-tree-lazy";
    v.series_term = "sum d(n) / |E_n|";
    v.convergence = decide_weighted(d, 0, rho, 0, 0);
  } else {
    return undecided("level-tree-lazy", "only 1/2 <= gamma < 1 is covered for lazy walks");
  }
  if (v.convergence == SeriesStatus::diverges) {
    v.verdict = Verdict::recurrent;
  } else {
    v.notes.push_back("one-sided criterion: a convergent series does not imply transience");
  }
  return v;
}

RecurrenceVerdict classify_genbox(const GenBox &box, const GrowthLaw &d) {
  double m = 0;
  for (const auto &b : box.bounds)
    if (b.slope > 0)
      m += 1;
  // |V_n| = prod (2 b_i(n) + 1) grows like n^m.
  RecurrenceVerdict v;
  v.theorem = "genbox";
  const auto rec = decide_weighted(d, 1, 1, m, 0);
  if (rec == SeriesStatus::diverges) {
    v.verdict = Verdict::recurrent;
    v.series_term = "sum (d(n)-1) / |V_n|";
    v.convergence = rec;
    return v;
  }
  // sum max(d(n), sum_i b_i(n)^2 log|V_n|) / |V_n| converges iff both parts do.
  const auto width = m == 0 ? SeriesStatus::diverges : decide_series(1, m - 2, -1);
  const auto dur = decide_weighted(d, 0, 1, m, 0);
  v.series_term = "sum max(d(n), sum_i b_i(n)^2 log|V_n|) / |V_n|";
  if (width == SeriesStatus::converges && dur == SeriesStatus::converges) {
    v.verdict = Verdict::transient;
    v.convergence = SeriesStatus::converges;
    return v;
  }
  v.convergence = SeriesStatus::diverges;
  v.notes.push_back("between the recurrence and transience conditions; neither applies");
  return v;
}

RecurrenceVerdict classify_star(const Star &star, const DurationSchedule &schedule) {
  const auto &d = *schedule.law();
  bool unit = d.first == 1;
  for (std::uint64_t n = 2; unit && n <= 64; ++n)
    unit = d.value(n) == 1;
  const auto shape = shape_of(d);
  if (!unit || shape.kind != GrowthShape::Kind::constant || shape.constant != 1)
    return undecided("star-series", "star criterion requires d(n) = 1 for every n");
  const auto &M = star.size;
  const auto m = shape_of(M);
  SeriesStatus s;
  if (m.kind == GrowthShape::Kind::growing)
    s = decide_series(1.0 / M.base, -M.poly_power, -M.log_power);
  else
    s = SeriesStatus::diverges;
  auto v = two_sided("star-series", "sum 1 / M(n)", s);
  v.notes.push_back("verdict for leaf v_1; the centre is always recurrent");
  return v;
}

} // namespace

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::recurrent:
    return "Recurrent";
  case Verdict::transient:
    return "Transient";
  default:
    return "Undecided";
  }
}

std::string to_string(SeriesStatus s) {
  switch (s) {
  case SeriesStatus::converges:
    return "converges";
  case SeriesStatus::diverges:
    return "diverges";
  default:
    return "n/a";
  }
}

SeriesStatus decide_series(double rho, double alpha, double beta) {
  if (std::abs(rho - 1.0) > kTol)
    return rho > 1.0 ? SeriesStatus::diverges : SeriesStatus::converges;
  if (alpha > 1.0 + kTol)
    return SeriesStatus::converges;
  if (alpha < 1.0 - kTol)
    return SeriesStatus::diverges;
  return beta > 1.0 + kTol ? SeriesStatus::converges : SeriesStatus::diverges;
}

SeriesStatus decide_weighted(const GrowthLaw &d, std::uint64_t shift, double rho, double alpha, double beta) {
  const auto shape = shape_of(d);
  switch (shape.kind) {
  case GrowthShape::Kind::zero:
    return SeriesStatus::converges;
  case GrowthShape::Kind::constant:
    if (shape.constant <= shift)
      return SeriesStatus::converges;
    return decide_series(rho, alpha, beta);
  default:
    return decide_series(d.base * rho, d.poly_power + alpha, d.log_power + beta);
  }
}

RecurrenceVerdict classify(const Family &family, const DurationSchedule &schedule) {
  if (!schedule.is_symbolic())
    return undecided("none", "explicit schedule: the series needs a symbolic tail");
  const auto &d = *schedule.law();

  if (auto *t = std::get_if<KaryTree>(&family))
    return classify_tree(t->k, t->lambda, d);
  if (auto *t = std::get_if<HeightPath>(&family))
    return classify_tree(t->k, t->lambda, d);
  if (auto *b = std::get_if<Box>(&family)) {
    if (b->d < 4)
      return undecided("box-series", "box criterion needs d >= 4");
    return two_sided("box-series", "sum d(n) / n^d", decide_weighted(d, 0, 1, b->d, 0));
  }
  if (auto *g = std::get_if<GenBox>(&family))
    return classify_genbox(*g, d);
  if (std::holds_alternative<Hypercube>(family) || std::holds_alternative<HammingChain>(family))
    return two_sided("cube-series", "sum d(n) / 2^n", decide_weighted(d, 0, 0.5, 0, 0));
  if (auto *t = std::get_if<LevelTree>(&family))
    return classify_level_tree(t->profile, t->gamma, d);
  if (auto *t = std::get_if<HeightChain>(&family))
    return classify_level_tree(t->profile, t->gamma, d);
  if (auto *s = std::get_if<Star>(&family))
    return classify_star(*s, schedule);
  return undecided("none", "no criterion for this family");
}

} // namespace rwogg
