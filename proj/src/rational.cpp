#include "rwogg/rational.hpp"

#include "rwogg/error.hpp"

#include <cctype>
#include <cstdlib>

namespace rwogg {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

mpz_class pow10(long e) {
  mpz_class r = 1;
  for (long i = 0; i < e; ++i)
    r *= 10;
  return r;
}

} // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  if (s.empty())
    throw ConfigError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0)
      throw ConfigError("zero denominator in '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string exp_text(s.substr(e + 1));
    char *end = nullptr;
    exponent = std::strtol(exp_text.c_str(), &end, 10);
    if (exp_text.empty() || *end != '\0')
      throw ConfigError("bad exponent in '" + std::string(text) + "'");
    s = s.substr(0, e);
  }
  std::string_view int_part = s, frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) ||
      (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part)))
    throw ConfigError("not a number: '" + std::string(text) + "'");
  std::string digits(int_part);
  digits += frac_part;
  mpz_class mantissa(digits.empty() ? "0" : digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  Rational q;
  if (exponent >= 0) {
    q = Rational(mantissa * pow10(exponent));
  } else {
    q = Rational(mantissa, pow10(-exponent));
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string format_rational(const Rational &q) {
  if (q.get_den() == 1)
    return q.get_num().get_str();
  // Terminating decimals (denominator 2^a 5^b) print as decimals.
  mpz_class den = q.get_den();
  long twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1)
    return q.get_str();
  long places = std::max(twos, fives);
  mpz_class scaled = q.get_num() * pow10(places) / q.get_den();
  bool negative = scaled < 0;
  std::string body = mpz_class(abs(scaled)).get_str();
  if (static_cast<long>(body.size()) <= places)
    body.insert(0, static_cast<std::size_t>(places + 1 - static_cast<long>(body.size())), '0');
  body.insert(body.size() - static_cast<std::size_t>(places), ".");
  return (negative ? "-" : "") + body;
}

} // namespace rwogg
