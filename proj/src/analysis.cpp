#include "rwogg/analysis.hpp"

#include "rwogg/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace rwogg {

namespace {

Rational rpow(const Rational &x, std::uint64_t e) {
  Rational r = 1, b = x;
  while (e) {
    if (e & 1)
      r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational binomial(std::uint64_t n, std::uint64_t k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return Rational(c);
}

/// Node count per height and busy degree per height for a level tree.
struct TreeProfile {
  std::vector<Rational> count;
  std::vector<Rational> degree;
};

TreeProfile tree_profile(const std::vector<std::uint32_t> &children, std::uint64_t n) {
  TreeProfile t;
  Rational nodes = 1;
  for (std::uint64_t h = 0; h <= n; ++h) {
    t.count.push_back(nodes);
    if (h == 0)
      t.degree.emplace_back(children[0]);
    else if (h == n)
      t.degree.emplace_back(1);
    else
      t.degree.emplace_back(children[h] + 1);
    if (h < n)
      nodes *= children[h];
  }
  return t;
}

const LevelProfile *level_profile(const Family &family, Rational *gamma) {
  if (auto *t = std::get_if<LevelTree>(&family)) {
    *gamma = t->gamma;
    return &t->profile;
  }
  if (auto *h = std::get_if<HeightChain>(&family)) {
    *gamma = h->gamma;
    return &h->profile;
  }
  return nullptr;
}

Rational tree_weight(std::uint32_t k, const Rational &lambda, std::uint64_t n, std::uint64_t h) {
  if (h == 0)
    return Rational(k) / (lambda + k);
  if (h == n)
    return lambda / (lambda + k) / rpow(lambda, n);
  return 1 / rpow(lambda, h);
}

/// Rows and columns of P^2 restricted to the origin's class.
struct ClassChain {
  std::vector<std::uint32_t> states;
  SparseMatrix<double> Q;
};

ClassChain class_chain(const Level<double> &level) {
  ClassChain c;
  std::vector<std::int64_t> pos(level.size(), -1);
  for (std::uint32_t i = 0; i < level.size(); ++i)
    if (!level.period_two || level.parity[i] == 0) {
      pos[i] = static_cast<std::int64_t>(c.states.size());
      c.states.push_back(i);
    }
  auto P2 = level.matrix.multiply(level.matrix);
  std::vector<std::vector<SparseMatrix<double>::Entry>> rows(c.states.size());
  for (std::size_t r = 0; r < c.states.size(); ++r)
    for (const auto &e : P2.row(c.states[r])) {
      if (pos[e.col] < 0)
        throw PreconditionError("P^2 leaves the origin's parity class");
      rows[r].push_back({static_cast<std::uint32_t>(pos[e.col]), e.value});
    }
  c.Q = SparseMatrix<double>(std::move(rows));
  return c;
}

double fixed_point_residual(const SparseMatrix<double> &Q, const std::vector<double> &x) {
  auto y = Q.left_multiply(x);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    r = std::max(r, std::abs(y[i] - x[i]));
  return r;
}

void normalise(std::vector<double> &x) {
  double s = 0.0;
  for (double v : x)
    s += v;
  for (double &v : x)
    v /= s;
}

} // namespace

std::vector<Rational> weights_karytree(std::uint32_t k, const Rational &lambda, std::uint64_t n) {
  return reversibility_weights<Rational>(KaryTree{k, lambda}, n);
}

template <class S> std::vector<S> reversibility_weights(const Family &family, std::uint64_t n) {
  const auto size = state_count(family, n);
  std::vector<S> phi;
  phi.reserve(size);
  auto push = [&](const Rational &w) { phi.push_back(from_rational<S>(w)); };

  if (auto *t = std::get_if<KaryTree>(&family)) {
    for (std::uint32_t i = 0; i < size; ++i)
      push(tree_weight(t->k, t->lambda, n, lumped_state(family, n, i)));
  } else if (auto *p = std::get_if<HeightPath>(&family)) {
    for (std::uint64_t h = 0; h <= n; ++h)
      push(rpow(Rational(p->k), h) * tree_weight(p->k, p->lambda, n, h));
  } else if (std::holds_alternative<Box>(family) || std::holds_alternative<GenBox>(family)) {
    auto b = box_half_widths(family, n);
    for (std::uint32_t i = 0; i < size; ++i) {
      auto x = box_coords(b, i);
      Rational w = 1;
      for (std::size_t a = 0; a < b.size(); ++a)
        if (static_cast<std::uint64_t>(std::llabs(x[a])) == b[a])
          w /= 2;
      push(w);
    }
  } else if (std::holds_alternative<Hypercube>(family)) {
    phi.assign(size, S(1));
  } else if (std::holds_alternative<HammingChain>(family)) {
    for (std::uint64_t h = 0; h <= n; ++h)
      push(binomial(n, h));
  } else if (auto *t = std::get_if<LevelTree>(&family)) {
    auto prof = tree_profile(t->profile.children(n), n);
    for (std::uint32_t i = 0; i < size; ++i)
      push(prof.degree[lumped_state(family, n, i)]);
  } else if (auto *h = std::get_if<HeightChain>(&family)) {
    auto prof = tree_profile(h->profile.children(n), n);
    for (std::uint64_t j = 0; j <= n; ++j)
      push(prof.count[j] * prof.degree[j]);
  } else if (auto *s = std::get_if<Star>(&family)) {
    push(Rational(s->size.value(n)));
    for (std::uint64_t i = 1; i < size; ++i)
      push(Rational(1));
  } else {
    throw PreconditionError("no reversibility weights for this family");
  }
  return phi;
}

template <class S> S detailed_balance_residual(const SparseMatrix<S> &P, std::span<const S> phi) {
  S worst(0);
  for (std::size_t u = 0; u < P.size(); ++u)
    for (const auto &e : P.row(u)) {
      S diff = phi[u] * e.value - phi[e.col] * P.at(e.col, u);
      if (diff < 0)
        diff = -diff;
      if (diff > worst)
        worst = diff;
    }
  return worst;
}

template <class S> S p_karytree(std::uint32_t k, const Rational &lambda, std::uint64_t n) {
  const Rational root = Rational(k) / (lambda + k);
  const Rational ratio2 = rpow(Rational(k) / lambda, 2);
  Rational denom = root;
  if (n % 2 == 1) {
    Rational term = 1;
    for (std::uint64_t i = 1; i <= n / 2; ++i) {
      term *= ratio2;
      denom += term;
    }
  } else {
    Rational term = 1;
    for (std::uint64_t i = 1; i + 1 <= n / 2; ++i) {
      term *= ratio2;
      denom += term;
    }
    denom += lambda / (lambda + k) * rpow(Rational(k) / lambda, n);
  }
  return from_rational<S>(root / denom);
}

template <class S> S p_box(std::span<const std::uint64_t> half_widths) {
  // Per axis: phi-mass of even and odd |x|; a boundary value carries 1/2 on
  // each of its two points.
  Rational sum_all = 1, diff_all = 1;
  for (auto b : half_widths) {
    Rational even = 1, odd = 0;
    for (std::uint64_t j = 1; j <= b; ++j) {
      Rational w = j == b ? Rational(1) : Rational(2);
      (j % 2 == 0 ? even : odd) += w;
    }
    sum_all *= even + odd;
    diff_all *= even - odd;
  }
  return from_rational<S>(Rational(2) / (sum_all + diff_all));
}

template <class S> S p_closed(const Family &family, std::uint64_t n) {
  if (auto *t = std::get_if<KaryTree>(&family))
    return p_karytree<S>(t->k, t->lambda, n);
  if (auto *t = std::get_if<HeightPath>(&family))
    return p_karytree<S>(t->k, t->lambda, n);
  if (std::holds_alternative<Box>(family) || std::holds_alternative<GenBox>(family)) {
    auto b = box_half_widths(family, n);
    return p_box<S>(b);
  }
  if (std::holds_alternative<Hypercube>(family) || std::holds_alternative<HammingChain>(family))
    return from_rational<S>(1 / rpow(Rational(2), n - 1));
  Rational gamma;
  if (auto *profile = level_profile(family, &gamma)) {
    auto prof = tree_profile(profile->children(n), n);
    Rational total = 0;
    for (std::uint64_t h = 0; h <= n; ++h)
      if (gamma != 0 || h % 2 == 0)
        total += prof.count[h] * prof.degree[h];
    return from_rational<S>(prof.degree[0] / total);
  }
  if (auto *s = std::get_if<Star>(&family))
    return s->gamma == 0 ? S(1) : from_rational<S>(Rational(1, 2));
  throw PreconditionError("no closed-form stationary distribution for this family");
}

EvenStationary even_stationary_closed(const Family &family, std::uint64_t n) {
  auto level = build_level<double>(family, n);
  auto phi = reversibility_weights<double>(family, n);
  EvenStationary st;
  st.pi.assign(level.size(), 0.0);
  for (std::size_t i = 0; i < level.size(); ++i)
    if (!level.period_two || level.parity[i] == 0)
      st.pi[i] = phi[i];
  normalise(st.pi);
  st.p = st.pi[0];
  auto sq = level.matrix.left_multiply(level.matrix.left_multiply(st.pi));
  for (std::size_t i = 0; i < sq.size(); ++i)
    st.residual = std::max(st.residual, std::abs(sq[i] - st.pi[i]));
  st.method = "closed-form";
  return st;
}

EvenStationary even_stationary_numeric(const Level<double> &level, const StationaryOptions &options) {
  auto chain = class_chain(level);
  const auto m = chain.states.size();
  std::vector<double> x(m, 1.0 / static_cast<double>(m));
  std::string method = "power-iteration";

  if (options.direct_solve && m > 1) {
    // (Q^T - I) x = 0 with the last equation replaced by sum(x) = 1.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(chain.Q.nonzeros() + 2 * m);
    const auto last = static_cast<std::uint32_t>(m - 1);
    for (std::uint32_t i = 0; i < m; ++i) {
      for (const auto &e : chain.Q.row(i))
        if (e.col != last)
          trip.emplace_back(e.col, i, e.value);
      if (i != last)
        trip.emplace_back(i, i, -1.0);
      trip.emplace_back(last, i, 1.0);
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      rhs(last) = 1.0;
      Eigen::VectorXd sol = lu.solve(rhs);
      if (lu.info() == Eigen::Success && sol.allFinite()) {
        for (std::size_t i = 0; i < m; ++i)
          x[i] = std::max(sol(static_cast<Eigen::Index>(i)), 0.0);
        normalise(x);
        method = "sparse-lu";
      }
    }
  }

  double res = fixed_point_residual(chain.Q, x);
  for (std::uint64_t it = 0; res > options.tolerance; ++it) {
    if (it >= options.max_iterations)
      throw ConvergenceError("stationary iteration did not reach residual " +
                             std::to_string(options.tolerance));
    x = chain.Q.left_multiply(x);
    normalise(x);
    res = fixed_point_residual(chain.Q, x);
    if (it == 0 && method == "sparse-lu")
      method = "sparse-lu+power";
  }

  EvenStationary st;
  st.pi.assign(level.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    st.pi[chain.states[i]] = x[i];
  st.p = st.pi[0];
  st.residual = res;
  st.method = method;
  return st;
}

PBounds p_bounds(const Family &family, std::uint64_t n) {
  auto tree = [&](std::uint32_t k, const Rational &lambda) {
    if (lambda >= k)
      throw PreconditionError("tree bounds need lambda < k");
    const Rational r = lambda / k;
    const Rational lower = (k - lambda) / Rational(k) * rpow(r, n + 1);
    return PBounds{lower.get_d(), rpow(r, n - 1).get_d()};
  };
  if (auto *t = std::get_if<KaryTree>(&family))
    return tree(t->k, t->lambda);
  if (auto *t = std::get_if<HeightPath>(&family))
    return tree(t->k, t->lambda);
  if (auto *b = std::get_if<Box>(&family)) {
    const double d = b->d, m = static_cast<double>(n);
    return {1.0 / std::pow(2 * m + 1, d), 2.0 / std::pow(2 * m - 1, d)};
  }
  throw PreconditionError("no p(n) bounds for this family");
}

MixingEstimate measure_even_mixing(const Level<double> &level, std::span<const double> pi, double epsilon,
                                   unsigned threads, std::uint64_t max_steps,
                                   std::span<const std::uint32_t> starts) {
  if (!(epsilon > 0.0))
    throw PreconditionError("mixing needs epsilon > 0");
  auto chain = class_chain(level);
  const auto m = chain.states.size();
  std::vector<double> target(m);
  for (std::size_t i = 0; i < m; ++i)
    target[i] = pi[chain.states[i]];

  std::vector<std::size_t> from;
  if (starts.empty()) {
    from.resize(m);
    std::iota(from.begin(), from.end(), std::size_t{0});
  } else {
    for (auto v : starts) {
      auto it = std::lower_bound(chain.states.begin(), chain.states.end(), v);
      if (it != chain.states.end() && *it == v)
        from.push_back(static_cast<std::size_t>(it - chain.states.begin()));
    }
    if (from.empty())
      throw PreconditionError("no mixing start lies in the origin's class");
  }

  std::vector<std::uint64_t> steps(from.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    std::vector<double> x(m);
    for (std::size_t k; (k = next.fetch_add(1)) < from.size() && !failed;) {
      std::fill(x.begin(), x.end(), 0.0);
      x[from[k]] = 1.0;
      for (std::uint64_t t = 1;; ++t) {
        if (t > max_steps) {
          failed = true;
          break;
        }
        x = chain.Q.left_multiply(x);
        double tv = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          tv += std::abs(x[i] - target[i]);
        if (0.5 * tv <= epsilon) {
          steps[k] = t;
          break;
        }
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i)
      pool.emplace_back(worker);
    for (auto &th : pool)
      th.join();
  }
  if (failed)
    throw ConvergenceError("mixing not reached within " + std::to_string(max_steps) + " double steps");
  auto worst = std::max_element(steps.begin(), steps.end());
  MixingEstimate est;
  est.epsilon = epsilon;
  est.time = 2 * *worst;
  est.worst_start = chain.states[from[static_cast<std::size_t>(worst - steps.begin())]];
  return est;
}

double calibrate_mixing_constant(const Family &family, std::span<const std::uint64_t> ns,
                                 std::span<const double> epsilons) {
  MixingConstants unit;
  unit.path = unit.box = unit.cube = 1.0;
  double log_sum = 0.0;
  std::size_t count = 0;
  for (auto n : ns) {
    auto level = build_level<double>(family, n);
    auto pi = even_stationary_closed(family, n).pi;
    auto reps = mixing_start_representatives(family, n);
    for (double eps : epsilons) {
      auto m = measure_even_mixing(level, pi, eps, 1, 10'000'000, reps);
      log_sum += std::log(static_cast<double>(m.time) / analytic_mixing_bound(family, n, eps, unit));
      ++count;
    }
  }
  if (count == 0)
    throw PreconditionError("calibration needs at least one point");
  return std::exp(log_sum / static_cast<double>(count));
}

MixingConstants calibrate_mixing_constants() {
  const std::vector<std::uint64_t> box_n{1, 2, 3}, cube_n{2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> eps{0.1, 0.01};
  double log_sum = 0.0;
  for (std::uint32_t d = 1; d <= 4; ++d)
    log_sum += std::log(calibrate_mixing_constant(Box{d}, box_n, eps));
  MixingConstants c;
  c.box = std::exp(log_sum / 4.0);
  c.cube = calibrate_mixing_constant(Hypercube{}, cube_n, eps);
  return c;
}

std::vector<std::uint32_t> mixing_start_representatives(const Family &family, std::uint64_t n) {
  if (std::holds_alternative<Hypercube>(family))
    return {0};
  const auto *box = std::get_if<Box>(&family);
  if (!box)
    return {};
  const auto hw = box_half_widths(family, n);
  std::vector<std::uint32_t> reps;
  std::vector<std::int64_t> c(box->d, 0);
  // Odometer over 0 <= c_0 <= c_1 <= ... <= c_{d-1} <= n.
  while (true) {
    reps.push_back(box_index(hw, c));
    std::size_t i = box->d;
    while (i > 0 && c[i - 1] == static_cast<std::int64_t>(n))
      --i;
    if (i == 0)
      break;
    ++c[i - 1];
    for (std::size_t j = i; j < box->d; ++j)
      c[j] = c[i - 1];
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

double analytic_mixing_bound(const Family &family, std::uint64_t n, double epsilon,
                             const MixingConstants &constants) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw PreconditionError("mixing bound needs 0 < epsilon < 1");
  const double m = static_cast<double>(n);
  if (std::holds_alternative<HeightPath>(family) || std::holds_alternative<KaryTree>(family))
    return constants.path * m * m * std::log(1.0 / epsilon);
  if (auto *b = std::get_if<Box>(&family)) {
    const double d = b->d;
    return constants.box * m * m * d * std::log(d / epsilon);
  }
  if (std::holds_alternative<Hypercube>(family) || std::holds_alternative<HammingChain>(family))
    return constants.cube * m * std::log(m / epsilon);
  throw PreconditionError("no mixing bound for this family");
}

std::vector<DiagnosticRow> series_diagnostic(const ReturnSeries &series, const DurationSchedule &schedule,
                                             const std::function<double(std::uint64_t)> &p) {
  std::vector<DiagnosticRow> rows;
  if (series.R.empty())
    return rows;
  const auto horizon = series.horizon();
  std::uint64_t start = 0;
  double p_prev = 0.0;
  for (std::uint64_t n = 1;; ++n) {
    if (schedule.length() && n > *schedule.length())
      break;
    const auto d = schedule.duration(n);
    const auto end = start + d;
    if (end > horizon)
      break;
    DiagnosticRow r;
    r.phase = n;
    r.d_n = d;
    r.p_n = p(n);
    r.increment = series.partial[end] - series.partial[start];
    r.lower = (static_cast<double>(d) - 1.0) * r.p_n / 2.0;
    r.upper = n == 1 ? static_cast<double>(d) : 2.0 * static_cast<double>(d) * p_prev;
    rows.push_back(r);
    p_prev = r.p_n;
    start = end;
  }
  return rows;
}

template std::vector<double> reversibility_weights<double>(const Family &, std::uint64_t);
template std::vector<Rational> reversibility_weights<Rational>(const Family &, std::uint64_t);
template double detailed_balance_residual<double>(const SparseMatrix<double> &, std::span<const double>);
template Rational detailed_balance_residual<Rational>(const SparseMatrix<Rational> &, std::span<const Rational>);
template double p_karytree<double>(std::uint32_t, const Rational &, std::uint64_t);
template Rational p_karytree<Rational>(std::uint32_t, const Rational &, std::uint64_t);
template double p_box<double>(std::span<const std::uint64_t>);
template Rational p_box<Rational>(std::span<const std::uint64_t>);
template double p_closed<double>(const Family &, std::uint64_t);
template Rational p_closed<Rational>(const Family &, std::uint64_t);

} // namespace rwogg
