#ifndef RWOGG_TESTS_SUPPORT_HPP
#define RWOGG_TESTS_SUPPORT_HPP

#include "rwogg/families.hpp"
#include "rwogg/rational.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace rwogg::testing {

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

template <class S> S row_sum(const SparseMatrix<S> &P, std::size_t i) {
  S s(0);
  for (const auto &e : P.row(i))
    s += e.value;
  return s;
}

/// Dense matrix power entry by repeated vector multiplication.
inline std::vector<double> power_row(const SparseMatrix<double> &P, std::uint32_t start, std::uint64_t t) {
  std::vector<double> x(P.size(), 0.0);
  x[start] = 1.0;
  for (std::uint64_t i = 0; i < t; ++i)
    x = P.left_multiply(x);
  return x;
}

inline std::vector<std::uint64_t> random_durations(std::mt19937_64 &gen, std::size_t len, std::uint64_t lo,
                                                   std::uint64_t hi) {
  std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
  std::vector<std::uint64_t> v(len);
  for (auto &x : v)
    x = dist(gen);
  return v;
}

} // namespace rwogg::testing

#endif
