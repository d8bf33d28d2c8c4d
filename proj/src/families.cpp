#include "rwogg/families.hpp"

#include "rwogg/error.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

namespace rwogg {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a)
    return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > kSaturated - a ? kSaturated : a + b;
}

// Complete-level-tree geometry: widths and BFS offsets per height.
struct TreeShape {
  std::vector<std::uint32_t> children; // heights 0..n-1
  std::vector<std::uint64_t> width;    // heights 0..n
  std::vector<std::uint64_t> offset;   // heights 0..n+1

  explicit TreeShape(std::vector<std::uint32_t> c) : children(std::move(c)) {
    const std::size_t n = children.size();
    width.assign(n + 1, 1);
    for (std::size_t h = 1; h <= n; ++h)
      width[h] = sat_mul(width[h - 1], children[h - 1]);
    offset.assign(n + 2, 0);
    for (std::size_t h = 0; h <= n; ++h)
      offset[h + 1] = sat_add(offset[h], width[h]);
  }

  std::uint64_t height() const { return children.size(); }
  std::uint64_t total() const { return offset.back(); }

  std::uint32_t height_of(std::uint64_t index) const {
    auto it = std::upper_bound(offset.begin(), offset.end(), index);
    return static_cast<std::uint32_t>(it - offset.begin() - 1);
  }

  // Child ranks from the root, most significant first.
  std::vector<std::uint32_t> path_of(std::uint64_t index) const {
    const std::uint32_t h = height_of(index);
    std::uint64_t pos = index - offset[h];
    std::vector<std::uint32_t> path(h);
    for (std::uint32_t j = h; j > 0; --j) {
      path[j - 1] = static_cast<std::uint32_t>(pos % children[j - 1]);
      pos /= children[j - 1];
    }
    return path;
  }

  std::uint64_t index_of(std::span<const std::uint32_t> path) const {
    std::uint64_t pos = 0;
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (path[j] >= children[j])
        throw PreconditionError("tree path rank out of range");
      pos = pos * children[j] + path[j];
    }
    return offset[path.size()] + pos;
  }
};

std::vector<std::uint32_t> uniform_children(std::uint32_t k, std::uint64_t n) {
  return std::vector<std::uint32_t>(n, k);
}

void require_level(std::uint64_t n) {
  if (n == 0)
    throw PreconditionError("levels start at 1");
}

void require_cap(const Family &family, std::uint64_t n, std::uint64_t cap) {
  const std::uint64_t count = state_count(family, n);
  if (count > cap)
    throw StateCapExceeded("level " + std::to_string(n) + " has " +
                           (count == kSaturated ? std::string("too many") : std::to_string(count)) +
                           " states, above the cap of " + std::to_string(cap));
  if (count > std::numeric_limits<std::uint32_t>::max())
    throw StateCapExceeded("level " + std::to_string(n) + " exceeds 32-bit state indexing");
}

template <class S> using Rows = std::vector<std::vector<typename SparseMatrix<S>::Entry>>;

template <class S> Level<S> finish(std::uint64_t n, Rows<S> rows, std::vector<std::uint8_t> parity, bool busy) {
  Level<S> level;
  level.n = n;
  level.matrix = SparseMatrix<S>(std::move(rows));
  level.parity = std::move(parity);
  level.period_two = busy;
  return level;
}

// Walk on a complete level tree. Root moves to each child with prob
// down_from_root; other nodes follow the given per-node rule.
template <class S>
Level<S> tree_level(const TreeShape &shape, std::uint64_t n, const Rational &to_parent_internal,
                    const Rational &to_child_internal, const Rational &to_child_root,
                    const Rational &to_parent_leaf, const Rational &self_loop, bool level_tree) {
  const std::uint64_t total = shape.total();
  Rows<S> rows(total);
  std::vector<std::uint8_t> parity(total);
  for (std::uint64_t h = 0; h <= n; ++h) {
    for (std::uint64_t p = 0; p < shape.width[h]; ++p) {
      const std::uint64_t idx = shape.offset[h] + p;
      auto &row = rows[idx];
      parity[idx] = static_cast<std::uint8_t>(h % 2);
      if (self_loop != 0)
        row.push_back({static_cast<std::uint32_t>(idx), from_rational<S>(self_loop)});
      if (h < n) {
        const std::uint32_t c = shape.children[h];
        Rational per_child;
        if (level_tree) {
          const Rational deg = h == 0 ? Rational(c) : Rational(c + 1);
          per_child = (1 - self_loop) / deg;
        } else {
          per_child = h == 0 ? to_child_root : to_child_internal;
        }
        const S child_value = from_rational<S>(per_child);
        for (std::uint32_t r = 0; r < c; ++r)
          row.push_back({static_cast<std::uint32_t>(shape.offset[h + 1] + p * c + r), child_value});
      }
      if (h > 0) {
        const std::uint32_t parent_c = shape.children[h - 1];
        const std::uint64_t parent = shape.offset[h - 1] + p / parent_c;
        Rational to_parent;
        if (level_tree) {
          const Rational deg = h == n ? Rational(1) : Rational(shape.children[h] + 1);
          to_parent = (1 - self_loop) / deg;
        } else {
          to_parent = h == n ? to_parent_leaf : to_parent_internal;
        }
        row.push_back({static_cast<std::uint32_t>(parent), from_rational<S>(to_parent)});
      }
    }
  }
  return finish<S>(n, std::move(rows), std::move(parity), self_loop == 0);
}

template <class S>
Level<S> birth_death(std::uint64_t n, const std::vector<Rational> &up, const std::vector<Rational> &down,
                     const Rational &stay) {
  Rows<S> rows(n + 1);
  std::vector<std::uint8_t> parity(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i) {
    parity[i] = static_cast<std::uint8_t>(i % 2);
    if (stay != 0)
      rows[i].push_back({static_cast<std::uint32_t>(i), from_rational<S>(stay)});
    if (i > 0 && down[i] != 0)
      rows[i].push_back({static_cast<std::uint32_t>(i - 1), from_rational<S>(down[i])});
    if (i < n && up[i] != 0)
      rows[i].push_back({static_cast<std::uint32_t>(i + 1), from_rational<S>(up[i])});
  }
  return finish<S>(n, std::move(rows), std::move(parity), stay == 0);
}

std::uint32_t zigzag(std::int64_t v) {
  return static_cast<std::uint32_t>(v > 0 ? 2 * v - 1 : -2 * v);
}

std::int64_t unzigzag(std::uint64_t z) {
  return z % 2 == 1 ? static_cast<std::int64_t>((z + 1) / 2) : -static_cast<std::int64_t>(z / 2);
}

template <class S> Level<S> box_level(const std::vector<std::uint64_t> &b, std::uint64_t n) {
  const std::size_t d = b.size();
  std::vector<std::uint64_t> radix(d), stride(d);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    radix[i] = 2 * b[i] + 1;
    stride[i] = total;
    total *= radix[i];
  }
  const Rational inward = Rational(1, static_cast<unsigned long>(d));
  const Rational interior = Rational(1, static_cast<unsigned long>(2 * d));
  const S inward_s = from_rational<S>(inward), interior_s = from_rational<S>(interior);
  Rows<S> rows(total);
  std::vector<std::uint8_t> parity(total);
  std::vector<std::int64_t> coords(d);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx, l1 = 0;
    for (std::size_t i = 0; i < d; ++i) {
      coords[i] = unzigzag(rest % radix[i]);
      rest /= radix[i];
      l1 += static_cast<std::uint64_t>(std::abs(coords[i]));
    }
    parity[idx] = static_cast<std::uint8_t>(l1 % 2);
    auto &row = rows[idx];
    row.reserve(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::int64_t v = coords[i];
      const std::uint64_t base = idx - zigzag(v) * stride[i];
      auto target = [&](std::int64_t w) {
        return static_cast<std::uint32_t>(base + zigzag(w) * stride[i]);
      };
      if (static_cast<std::uint64_t>(std::abs(v)) == b[i]) {
        row.push_back({target(v > 0 ? v - 1 : v + 1), inward_s});
      } else {
        row.push_back({target(v - 1), interior_s});
        row.push_back({target(v + 1), interior_s});
      }
    }
  }
  return finish<S>(n, std::move(rows), std::move(parity), true);
}

template <class S> Level<S> cube_level(std::uint64_t n) {
  const std::uint64_t total = std::uint64_t{1} << n;
  const S p = from_rational<S>(Rational(1, static_cast<unsigned long>(n)));
  Rows<S> rows(total);
  std::vector<std::uint8_t> parity(total);
  for (std::uint64_t v = 0; v < total; ++v) {
    parity[v] = static_cast<std::uint8_t>(std::popcount(v) % 2);
    rows[v].reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
      rows[v].push_back({static_cast<std::uint32_t>(v ^ (std::uint64_t{1} << i)), p});
  }
  return finish<S>(n, std::move(rows), std::move(parity), true);
}

template <class S> Level<S> star_level(std::uint64_t m, std::uint64_t n, const Rational &gamma) {
  Rows<S> rows(m + 1);
  std::vector<std::uint8_t> parity(m + 1, 1);
  parity[0] = 0;
  const S out = from_rational<S>((1 - gamma) / Rational(static_cast<unsigned long>(m)));
  const S back = from_rational<S>(1 - gamma);
  const S stay = from_rational<S>(gamma);
  if (gamma != 0)
    rows[0].push_back({0, stay});
  for (std::uint64_t i = 1; i <= m; ++i) {
    rows[0].push_back({static_cast<std::uint32_t>(i), out});
    if (gamma != 0)
      rows[i].push_back({static_cast<std::uint32_t>(i), stay});
    rows[i].push_back({0, back});
  }
  return finish<S>(n, std::move(rows), std::move(parity), gamma == 0);
}

void validate_profile(const LevelProfile &profile) {
  if (profile.is_uniform()) {
    if (profile.uniform == 0)
      throw ConfigError("level tree profile needs at least one child per internal node");
    return;
  }
  for (std::size_t lvl = 0; lvl < profile.table.size(); ++lvl) {
    const auto &row = profile.table[lvl];
    if (row.size() != lvl + 1)
      throw ConfigError("level tree table row " + std::to_string(lvl + 1) + " must list " +
                        std::to_string(lvl + 1) + " child counts");
    for (std::size_t h = 0; h < row.size(); ++h) {
      if (row[h] == 0)
        throw ConfigError("level tree child counts must be positive");
      if (lvl > 0 && h < lvl && row[h] < profile.table[lvl - 1][h])
        throw ConfigError("level tree child counts must not shrink as the tree grows");
    }
  }
}

void validate_gamma(const Rational &gamma) {
  if (gamma < 0 || gamma >= 1)
    throw ConfigError("gamma must lie in [0, 1)");
}

} // namespace

std::vector<std::uint32_t> LevelProfile::children(std::uint64_t n) const {
  if (is_uniform())
    return uniform_children(uniform, n);
  if (n == 0 || n > table.size())
    throw ConfigError("level tree profile does not define level " + std::to_string(n));
  return table[n - 1];
}

std::uint64_t LevelProfile::max_level() const {
  return is_uniform() ? kSaturated : table.size();
}

void validate(const Family &family) {
  std::visit(overloaded{
                 [](const KaryTree &f) {
                   if (f.k < 2)
                     throw ConfigError("k-ary tree needs k >= 2");
                   if (f.lambda <= 0)
                     throw ConfigError("lambda must be positive");
                 },
                 [](const HeightPath &f) {
                   if (f.k < 2)
                     throw ConfigError("height path needs k >= 2");
                   if (f.lambda <= 0)
                     throw ConfigError("lambda must be positive");
                 },
                 [](const Box &f) {
                   if (f.d < 1)
                     throw ConfigError("box needs d >= 1");
                 },
                 [](const GenBox &f) {
                   if (f.bounds.empty())
                     throw ConfigError("generalised box needs at least one axis");
                   for (const auto &b : f.bounds)
                     if (b.at(1) == 0)
                       throw ConfigError("axis half-widths must be positive");
                 },
                 [](const Hypercube &) {},
                 [](const LevelTree &f) {
                   validate_profile(f.profile);
                   validate_gamma(f.gamma);
                 },
                 [](const Star &f) {
                   validate_gamma(f.gamma);
                   if (f.size.first == 0)
                     throw ConfigError("star needs M(1) >= 1");
                   std::uint64_t prev = f.size.first;
                   for (std::uint64_t n = 2; n <= 64; ++n) {
                     std::uint64_t m = 0;
                     try {
                       m = f.size.value(n);
                     } catch (const std::overflow_error &) {
                       break;
                     }
                     if (m < prev)
                       throw ConfigError("star size M(n) must be nondecreasing");
                     prev = m;
                   }
                 },
                 [](const HammingChain &) {},
                 [](const HeightChain &f) {
                   validate_profile(f.profile);
                   validate_gamma(f.gamma);
                 },
             },
             family);
}

std::uint64_t state_count(const Family &family, std::uint64_t n) {
  return std::visit(
      overloaded{
          [n](const KaryTree &f) { return TreeShape(uniform_children(f.k, n)).total(); },
          [n](const HeightPath &) { return n + 1; },
          [n](const Box &f) {
            std::uint64_t c = 1;
            for (std::uint32_t i = 0; i < f.d; ++i)
              c = sat_mul(c, 2 * n + 1);
            return c;
          },
          [n](const GenBox &f) {
            std::uint64_t c = 1;
            for (const auto &b : f.bounds)
              c = sat_mul(c, 2 * b.at(n) + 1);
            return c;
          },
          [n](const Hypercube &) { return n >= 64 ? kSaturated : std::uint64_t{1} << n; },
          [n](const LevelTree &f) { return TreeShape(f.profile.children(n)).total(); },
          [n](const Star &f) {
            try {
              return sat_add(f.size.value(n), 1);
            } catch (const std::overflow_error &) {
              return kSaturated;
            }
          },
          [n](const HammingChain &) { return n + 1; },
          [n](const HeightChain &) { return n + 1; },
      },
      family);
}

template <class S> Level<S> build_level(const Family &family, std::uint64_t n, std::uint64_t cap) {
  require_level(n);
  validate(family);
  require_cap(family, n, cap);
  return std::visit(
      overloaded{
          [n](const KaryTree &f) {
            const Rational k(f.k);
            return tree_level<S>(TreeShape(uniform_children(f.k, n)), n, f.lambda / (f.lambda + k),
                                 1 / (f.lambda + k), 1 / k, Rational(1), Rational(0), false);
          },
          [n](const HeightPath &f) {
            const Rational k(f.k);
            std::vector<Rational> up(n + 1, k / (f.lambda + k)), down(n + 1, f.lambda / (f.lambda + k));
            up[0] = 1;
            down[n] = 1;
            up[n] = 0;
            down[0] = 0;
            return birth_death<S>(n, up, down, Rational(0));
          },
          [n](const Box &f) { return box_level<S>(std::vector<std::uint64_t>(f.d, n), n); },
          [n](const GenBox &f) {
            std::vector<std::uint64_t> b;
            for (const auto &axis : f.bounds)
              b.push_back(axis.at(n));
            return box_level<S>(b, n);
          },
          [n](const Hypercube &) { return cube_level<S>(n); },
          [n](const LevelTree &f) {
            return tree_level<S>(TreeShape(f.profile.children(n)), n, 0, 0, 0, 0, f.gamma, true);
          },
          [n](const Star &f) { return star_level<S>(f.size.value(n), n, f.gamma); },
          [n](const HammingChain &) {
            std::vector<Rational> up(n + 1), down(n + 1);
            for (std::uint64_t w = 0; w <= n; ++w) {
              down[w] = Rational(static_cast<unsigned long>(w), static_cast<unsigned long>(n));
              down[w].canonicalize();
              up[w] = 1 - down[w];
            }
            return birth_death<S>(n, up, down, Rational(0));
          },
          [n](const HeightChain &f) {
            const auto c = f.profile.children(n);
            std::vector<Rational> up(n + 1), down(n + 1);
            const Rational move = 1 - f.gamma;
            up[0] = move;
            down[n] = move;
            for (std::uint64_t h = 1; h < n; ++h) {
              const Rational deg(c[h] + 1);
              down[h] = move / deg;
              up[h] = move * Rational(c[h]) / deg;
            }
            return birth_death<S>(n, up, down, f.gamma);
          },
      },
      family);
}

template Level<double> build_level<double>(const Family &, std::uint64_t, std::uint64_t);
template Level<Rational> build_level<Rational>(const Family &, std::uint64_t, std::uint64_t);

std::vector<std::uint32_t> embedding(const Family &family, std::uint64_t n) {
  require_level(n);
  auto identity = [](std::uint64_t size) {
    std::vector<std::uint32_t> map(size);
    std::iota(map.begin(), map.end(), 0u);
    return map;
  };
  auto tree_map = [n](const std::vector<std::uint32_t> &from, const std::vector<std::uint32_t> &to) {
    TreeShape a(from), b(to);
    std::vector<std::uint32_t> map(a.total());
    for (std::uint64_t i = 0; i < a.total(); ++i)
      map[i] = static_cast<std::uint32_t>(b.index_of(a.path_of(i)));
    (void)n;
    return map;
  };
  auto box_map = [](const std::vector<std::uint64_t> &from, const std::vector<std::uint64_t> &to) {
    std::uint64_t total = 1;
    for (auto b : from)
      total *= 2 * b + 1;
    std::vector<std::uint32_t> map(total);
    for (std::uint64_t i = 0; i < total; ++i) {
      std::uint64_t rest = i, out = 0, stride = 1;
      for (std::size_t a = 0; a < from.size(); ++a) {
        const std::uint64_t z = rest % (2 * from[a] + 1);
        rest /= 2 * from[a] + 1;
        out += z * stride;
        stride *= 2 * to[a] + 1;
      }
      map[i] = static_cast<std::uint32_t>(out);
    }
    return map;
  };
  return std::visit(
      overloaded{
          [&](const KaryTree &f) { return identity(state_count(f, n)); },
          [&](const HeightPath &) { return identity(n + 1); },
          [&](const Box &f) {
            return box_map(std::vector<std::uint64_t>(f.d, n), std::vector<std::uint64_t>(f.d, n + 1));
          },
          [&](const GenBox &f) { return box_map(box_half_widths(f, n), box_half_widths(f, n + 1)); },
          [&](const Hypercube &) { return identity(std::uint64_t{1} << n); },
          [&](const LevelTree &f) { return tree_map(f.profile.children(n), f.profile.children(n + 1)); },
          [&](const Star &f) { return identity(f.size.value(n) + 1); },
          [&](const HammingChain &) { return identity(n + 1); },
          [&](const HeightChain &) { return identity(n + 1); },
      },
      family);
}

bool is_lumpable(const Family &family) {
  return std::holds_alternative<KaryTree>(family) || std::holds_alternative<Hypercube>(family) ||
         std::holds_alternative<LevelTree>(family) || std::holds_alternative<HeightPath>(family) ||
         std::holds_alternative<HammingChain>(family) || std::holds_alternative<HeightChain>(family);
}

Family lump_by_height(const Family &family) {
  if (auto *t = std::get_if<KaryTree>(&family))
    return HeightPath{t->k, t->lambda};
  if (std::holds_alternative<Hypercube>(family))
    return HammingChain{};
  if (auto *t = std::get_if<LevelTree>(&family))
    return HeightChain{t->profile, t->gamma};
  if (std::holds_alternative<HeightPath>(family) || std::holds_alternative<HammingChain>(family) ||
      std::holds_alternative<HeightChain>(family))
    return family;
  throw ConfigError("family has no exact height projection");
}

std::uint32_t lumped_state(const Family &family, std::uint64_t n, std::uint32_t index) {
  if (std::holds_alternative<Hypercube>(family))
    return static_cast<std::uint32_t>(std::popcount(index));
  if (std::holds_alternative<KaryTree>(family) || std::holds_alternative<LevelTree>(family))
    return TreeShape(tree_children(family, n)).height_of(index);
  if (is_lumpable(family))
    return index;
  throw ConfigError("family has no exact height projection");
}

bool is_busy(const Family &family) {
  if (auto *t = std::get_if<LevelTree>(&family))
    return t->gamma == 0;
  if (auto *s = std::get_if<Star>(&family))
    return s->gamma == 0;
  if (auto *h = std::get_if<HeightChain>(&family))
    return h->gamma == 0;
  return true;
}

std::vector<std::uint32_t> tree_children(const Family &family, std::uint64_t n) {
  if (auto *t = std::get_if<KaryTree>(&family))
    return uniform_children(t->k, n);
  if (auto *t = std::get_if<LevelTree>(&family))
    return t->profile.children(n);
  throw ConfigError("family is not tree-shaped");
}

std::vector<std::uint64_t> box_half_widths(const Family &family, std::uint64_t n) {
  if (auto *b = std::get_if<Box>(&family))
    return std::vector<std::uint64_t>(b->d, n);
  if (auto *g = std::get_if<GenBox>(&family)) {
    std::vector<std::uint64_t> w;
    for (const auto &axis : g->bounds)
      w.push_back(axis.at(n));
    return w;
  }
  throw ConfigError("family is not a box");
}

std::uint32_t box_index(std::span<const std::uint64_t> half_widths, std::span<const std::int64_t> coords) {
  if (coords.size() != half_widths.size())
    throw PreconditionError("coordinate dimension mismatch");
  std::uint64_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (static_cast<std::uint64_t>(std::abs(coords[i])) > half_widths[i])
      throw PreconditionError("coordinate outside the box");
    idx += zigzag(coords[i]) * stride;
    stride *= 2 * half_widths[i] + 1;
  }
  return static_cast<std::uint32_t>(idx);
}

std::vector<std::int64_t> box_coords(std::span<const std::uint64_t> half_widths, std::uint32_t index) {
  std::vector<std::int64_t> coords(half_widths.size());
  std::uint64_t rest = index;
  for (std::size_t i = 0; i < half_widths.size(); ++i) {
    coords[i] = unzigzag(rest % (2 * half_widths[i] + 1));
    rest /= 2 * half_widths[i] + 1;
  }
  return coords;
}

std::uint32_t cube_index(std::string_view bits) {
  std::uint32_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      idx |= 1u << i;
    else if (bits[i] != '0')
      throw PreconditionError("hypercube vertex must be a 0/1 string");
  }
  return idx;
}

std::uint32_t tree_index(std::span<const std::uint32_t> children_per_height, std::span<const std::uint32_t> path) {
  TreeShape shape(std::vector<std::uint32_t>(children_per_height.begin(), children_per_height.end()));
  return static_cast<std::uint32_t>(shape.index_of(path));
}

std::string state_label(const Family &family, std::uint64_t n, std::uint32_t index) {
  if (std::holds_alternative<KaryTree>(family) || std::holds_alternative<LevelTree>(family)) {
    std::string s = "r";
    for (auto r : TreeShape(tree_children(family, n)).path_of(index))
      s += "." + std::to_string(r);
    return s;
  }
  if (std::holds_alternative<Box>(family) || std::holds_alternative<GenBox>(family)) {
    std::string s = "(";
    const auto c = box_coords(box_half_widths(family, n), index);
    for (std::size_t i = 0; i < c.size(); ++i)
      s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
  }
  if (std::holds_alternative<Hypercube>(family)) {
    std::string s(n, '0');
    for (std::uint64_t i = 0; i < n; ++i)
      if (index & (1u << i))
        s[i] = '1';
    return s;
  }
  if (std::holds_alternative<Star>(family))
    return index == 0 ? "r" : "v" + std::to_string(index);
  return "h" + std::to_string(index);
}

} // namespace rwogg
