#include "rwogg/descriptor.hpp"

#include "rwogg/error.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace rwogg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

std::uint64_t to_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

double to_real(std::string_view s, std::string_view what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("bad number for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

Rational to_rational(std::string_view s, std::string_view what) {
  try {
    return parse_rational(s);
  } catch (const std::exception &) {
    throw ConfigError("bad rational for " + std::string(what) + ": '" + std::string(s) + "'");
  }
}

/// key=value list; values may contain ':' but not ','.
std::map<std::string, std::string, std::less<>> keyvals(std::string_view body, std::string_view kind) {
  std::map<std::string, std::string, std::less<>> kv;
  if (trim(body).empty())
    return kv;
  for (auto item : split(body, ',')) {
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(kind) + ": expected key=value, got '" + std::string(item) + "'");
    auto key = std::string(trim(item.substr(0, eq)));
    if (!kv.emplace(key, std::string(trim(item.substr(eq + 1)))).second)
      throw ConfigError(std::string(kind) + ": duplicate key '" + key + "'");
  }
  return kv;
}

class Params {
public:
  Params(std::string_view body, std::string_view kind) : kv_(keyvals(body, kind)), kind_(kind) {}

  std::optional<std::string> take(std::string_view key) {
    auto it = kv_.find(key);
    if (it == kv_.end())
      return std::nullopt;
    auto v = it->second;
    kv_.erase(it);
    return v;
  }
  std::string need(std::string_view key) {
    auto v = take(key);
    if (!v)
      throw ConfigError(std::string(kind_) + ": missing '" + std::string(key) + "'");
    return *v;
  }
  void done() const {
    if (!kv_.empty())
      throw ConfigError(std::string(kind_) + ": unknown key '" + kv_.begin()->first + "'");
  }

private:
  std::map<std::string, std::string, std::less<>> kv_;
  std::string_view kind_;
};

AxisBound parse_axis(std::string_view s) {
  // c | n | sn | c+sn
  AxisBound b{0, 0};
  for (auto term : split(s, '+')) {
    if (term.empty())
      throw ConfigError("genbox: empty bound term in '" + std::string(s) + "'");
    if (term.back() == 'n') {
      auto coef = term.substr(0, term.size() - 1);
      b.slope += coef.empty() ? 1 : to_uint(coef, "genbox slope");
    } else {
      b.constant += to_uint(term, "genbox constant");
    }
  }
  return b;
}

std::string format_axis(const AxisBound &b) {
  std::string s;
  if (b.constant || !b.slope)
    s += std::to_string(b.constant);
  if (b.slope) {
    if (!s.empty())
      s += '+';
    if (b.slope != 1)
      s += std::to_string(b.slope);
    s += 'n';
  }
  return s;
}

LevelProfile parse_profile(std::string_view s) {
  LevelProfile p;
  if (s.starts_with("const:")) {
    p.uniform = static_cast<std::uint32_t>(to_uint(s.substr(6), "profile"));
    return p;
  }
  if (s.starts_with("table:")) {
    for (auto level : split(s.substr(6), ';')) {
      std::vector<std::uint32_t> row;
      for (auto c : split(level, '/'))
        row.push_back(static_cast<std::uint32_t>(to_uint(c, "profile")));
      p.table.push_back(std::move(row));
    }
    return p;
  }
  throw ConfigError("profile must be const:k or table:...");
}

std::string format_profile(const LevelProfile &p) {
  if (p.is_uniform())
    return "const:" + std::to_string(p.uniform);
  std::string s = "table:";
  for (std::size_t n = 0; n < p.table.size(); ++n) {
    if (n)
      s += ';';
    for (std::size_t h = 0; h < p.table[n].size(); ++h) {
      if (h)
        s += '/';
      s += std::to_string(p.table[n][h]);
    }
  }
  return s;
}

Rational parse_gamma(Params &p) {
  auto g = p.take("gamma");
  return g ? to_rational(*g, "gamma") : Rational(0);
}

} // namespace

std::string format_number(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

GrowthLaw parse_star_size(std::string_view s) {
  GrowthLaw law;
  if (s == "linear") {
    law.poly_power = -1;
  } else if (s == "nlogn") {
    law.poly_power = -1;
    law.log_power = -1;
  } else if (s.starts_with("const:")) {
    auto c = to_uint(s.substr(6), "M");
    law.scale = static_cast<double>(c);
    law.first = c;
  } else if (s.starts_with("pow:")) {
    law.poly_power = -to_real(s.substr(4), "M");
  } else if (s.starts_with("exp:")) {
    law.base = to_real(s.substr(4), "M");
    law.first = static_cast<std::uint64_t>(std::max(1.0, std::nearbyint(law.base)));
  } else {
    throw ConfigError("star size must be linear, nlogn, const:c, pow:a or exp:B");
  }
  return law;
}

std::string format_star_size(const GrowthLaw &law) {
  if (law.base == 1 && law.scale == 1 && law.first == 1 && law.log_power == 0) {
    if (law.poly_power == -1)
      return "linear";
    return "pow:" + format_number(-law.poly_power);
  }
  if (law.base == 1 && law.scale == 1 && law.first == 1 && law.poly_power == -1 && law.log_power == -1)
    return "nlogn";
  if (law.base == 1 && law.poly_power == 0 && law.log_power == 0 && law.scale == static_cast<double>(law.first))
    return "const:" + std::to_string(law.first);
  if (law.scale == 1 && law.poly_power == 0 && law.log_power == 0)
    return "exp:" + format_number(law.base);
  throw ConfigError("star size has no descriptor form");
}

Family parse_family(std::string_view text) {
  text = trim(text);
  auto colon = text.find(':');
  auto kind = std::string(text.substr(0, colon));
  auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  Params p(body, kind);
  Family f;
  if (kind == "karytree" || kind == "heightpath") {
    auto k = static_cast<std::uint32_t>(to_uint(p.need("k"), "k"));
    auto lambda = to_rational(p.need("lambda"), "lambda");
    f = kind == "karytree" ? Family{KaryTree{k, lambda}} : Family{HeightPath{k, lambda}};
  } else if (kind == "box") {
    f = Box{static_cast<std::uint32_t>(to_uint(p.need("d"), "d"))};
  } else if (kind == "genbox") {
    GenBox g;
    for (auto axis : split(p.need("b"), '/'))
      g.bounds.push_back(parse_axis(axis));
    f = g;
  } else if (kind == "hypercube") {
    f = Hypercube{};
  } else if (kind == "hamming") {
    f = HammingChain{};
  } else if (kind == "leveltree" || kind == "heightchain") {
    auto profile = parse_profile(p.need("profile"));
    auto gamma = parse_gamma(p);
    f = kind == "leveltree" ? Family{LevelTree{profile, gamma}} : Family{HeightChain{profile, gamma}};
  } else if (kind == "star") {
    auto M = parse_star_size(p.need("M"));
    f = Star{M, parse_gamma(p)};
  } else {
    throw ConfigError("unknown family '" + kind + "'");
  }
  p.done();
  validate(f);
  return f;
}

std::string format_family(const Family &family) {
  return std::visit(
      [](const auto &f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, KaryTree>)
          return "karytree:k=" + std::to_string(f.k) + ",lambda=" + format_rational(f.lambda);
        else if constexpr (std::is_same_v<T, HeightPath>)
          return "heightpath:k=" + std::to_string(f.k) + ",lambda=" + format_rational(f.lambda);
        else if constexpr (std::is_same_v<T, Box>)
          return "box:d=" + std::to_string(f.d);
        else if constexpr (std::is_same_v<T, GenBox>) {
          std::string s = "genbox:b=";
          for (std::size_t i = 0; i < f.bounds.size(); ++i)
            s += (i ? "/" : "") + format_axis(f.bounds[i]);
          return s;
        } else if constexpr (std::is_same_v<T, Hypercube>)
          return "hypercube";
        else if constexpr (std::is_same_v<T, HammingChain>)
          return "hamming";
        else if constexpr (std::is_same_v<T, LevelTree>)
          return "leveltree:profile=" + format_profile(f.profile) + ",gamma=" + format_rational(f.gamma);
        else if constexpr (std::is_same_v<T, HeightChain>)
          return "heightchain:profile=" + format_profile(f.profile) + ",gamma=" + format_rational(f.gamma);
        else
          return "star:M=" + format_star_size(f.size) + ",gamma=" + format_rational(f.gamma);
      },
      family);
}

DurationSchedule parse_schedule(std::string_view text) {
  text = trim(text);
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("schedule must be explicit:... or symbolic:...");
  auto kind = text.substr(0, colon);
  auto body = text.substr(colon + 1);
  if (kind == "explicit") {
    std::vector<std::uint64_t> d;
    for (auto v : split(body, ','))
      d.push_back(to_uint(v, "duration"));
    return DurationSchedule::explicit_list(std::move(d), std::string(text));
  }
  if (kind == "symbolic") {
    Params p(body, "symbolic");
    GrowthLaw law;
    law.base = to_real(p.need("base"), "base");
    if (auto a = p.take("a"))
      law.poly_power = to_real(*a, "a");
    if (auto b = p.take("b"))
      law.log_power = to_real(*b, "b");
    if (auto c = p.take("c"))
      law.scale = to_real(*c, "c");
    if (auto d1 = p.take("d1"))
      law.first = to_uint(*d1, "d1");
    if (auto r = p.take("round")) {
      if (*r == "ceil")
        law.rounding = Rounding::ceil;
      else if (*r != "nearest")
        throw ConfigError("round must be nearest or ceil");
    }
    p.done();
    if (!(law.scale >= 0))
      throw ConfigError("symbolic: c must be nonnegative");
    auto s = DurationSchedule::symbolic(law);
    return DurationSchedule::symbolic(law, format_schedule(s));
  }
  throw ConfigError("unknown schedule kind '" + std::string(kind) + "'");
}

std::string format_schedule(const DurationSchedule &schedule) {
  if (!schedule.is_symbolic()) {
    std::string s = "explicit:";
    const auto &v = schedule.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  }
  const auto &law = *schedule.law();
  std::string s = "symbolic:base=" + format_number(law.base) + ",a=" + format_number(law.poly_power) +
                  ",b=" + format_number(law.log_power) + ",d1=" + std::to_string(law.first);
  if (law.scale != 1.0)
    s += ",c=" + format_number(law.scale);
  if (law.rounding == Rounding::ceil)
    s += ",round=ceil";
  return s;
}

} // namespace rwogg
