#ifndef RWOGG_RATIONAL_HPP
#define RWOGG_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <type_traits>

namespace rwogg {

using Rational = mpq_class;

/// Parses "3", "-2", "0.25", "1e-3" or "2/3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Shortest decimal-or-fraction rendering ("1", "0.5", "2/3").
std::string format_rational(const Rational &q);

template <class S> S from_rational(const Rational &q) {
  if constexpr (std::is_same_v<S, Rational>) {
    return q;
  } else {
    return static_cast<S>(q.get_d());
  }
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational &q) { return q.get_d(); }

} // namespace rwogg

#endif
