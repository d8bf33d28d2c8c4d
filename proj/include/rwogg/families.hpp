#ifndef RWOGG_FAMILIES_HPP
#define RWOGG_FAMILIES_HPP

#include "rwogg/rational.hpp"
#include "rwogg/schedule.hpp"
#include "rwogg/sparse_matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rwogg {

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 22;

// Graph families. Every family grows monotonically in the level n >= 1 and
// keeps its origin (root, zero vector, centre) at index 0.

/// Complete k-ary tree of height n with the biased walk: root -> child 1/k,
/// internal -> child 1/(lambda+k), internal -> parent lambda/(lambda+k),
/// leaf -> parent 1.
struct KaryTree {
  std::uint32_t k = 2;
  Rational lambda = 1;
};

/// Height projection of KaryTree: the birth-death chain on {0..n}.
struct HeightPath {
  std::uint32_t k = 2;
  Rational lambda = 1;
};

/// Reflecting simple walk on {-n..n}^d.
struct Box {
  std::uint32_t d = 1;
};

/// Per-axis half-width b(n) = constant + slope * n (>= 1 for n >= 1).
struct AxisBound {
  std::uint64_t constant = 0;
  std::uint64_t slope = 1;
  std::uint64_t at(std::uint64_t n) const { return constant + slope * n; }
};

/// Box with half-width b_i(n) along axis i.
struct GenBox {
  std::vector<AxisBound> bounds;
};

/// Simple walk on {0,1}^n; the new coordinate of level n+1 starts at 0.
struct Hypercube {};

/// Child counts per height for every level. Either uniform (every internal
/// node has `uniform` children at every level) or an explicit table where
/// table[n-1][h] is the child count of height-h nodes at level n.
struct LevelProfile {
  std::uint32_t uniform = 0;
  std::vector<std::vector<std::uint32_t>> table;

  bool is_uniform() const { return table.empty(); }
  /// Child counts for heights 0..n-1 at level n.
  std::vector<std::uint32_t> children(std::uint64_t n) const;
  /// Largest level the profile defines (UINT64_MAX when uniform).
  std::uint64_t max_level() const;
};

/// Level tree with self-loop probability gamma (gamma = 0: busy walk).
struct LevelTree {
  LevelProfile profile;
  Rational gamma = 0;
};

/// Star with centre r and M(n) leaves, busy or lazy.
struct Star {
  GrowthLaw size;
  Rational gamma = 0;
};

/// Hamming-weight projection of Hypercube: birth-death chain on {0..n}.
struct HammingChain {};

/// Height projection of LevelTree.
struct HeightChain {
  LevelProfile profile;
  Rational gamma = 0;
};

using Family = std::variant<KaryTree, HeightPath, Box, GenBox, Hypercube, LevelTree, Star,
                            HammingChain, HeightChain>;

/// One level of a family: transition matrix plus parity labels relative to
/// the origin (0 = reachable from the origin in an even number of steps).
template <class S> struct Level {
  std::uint64_t n = 0;
  SparseMatrix<S> matrix;
  std::vector<std::uint8_t> parity;
  bool period_two = true;

  std::size_t size() const { return matrix.size(); }
};

/// Throws ConfigError when parameters violate the family's constraints.
void validate(const Family &family);

/// |V(n)|, saturating at UINT64_MAX.
std::uint64_t state_count(const Family &family, std::uint64_t n);

/// Builds level n. Throws StateCapExceeded when |V(n)| > cap.
template <class S>
Level<S> build_level(const Family &family, std::uint64_t n, std::uint64_t cap = kDefaultStateCap);

/// Index map from level n into level n+1 (injective, origin -> 0).
std::vector<std::uint32_t> embedding(const Family &family, std::uint64_t n);

/// True for families with an exact height / weight projection.
bool is_lumpable(const Family &family);

/// The projected family (KaryTree -> HeightPath, Hypercube -> HammingChain,
/// LevelTree -> HeightChain). Lumped families map to themselves. Throws
/// ConfigError for families without an exact projection.
Family lump_by_height(const Family &family);

/// Projection of a level-n state onto its lumped state (height or weight).
std::uint32_t lumped_state(const Family &family, std::uint64_t n, std::uint32_t index);

/// Busy families: no self-loops, bipartite, period 2.
bool is_busy(const Family &family);

/// Human-readable state label ("r", "r.0.1", "(1,-1)", "010", "v3", "h2").
std::string state_label(const Family &family, std::uint64_t n, std::uint32_t index);

/// Index of a lattice point in a (generalised) box at level n.
std::uint32_t box_index(std::span<const std::uint64_t> half_widths,
                        std::span<const std::int64_t> coords);
/// Coordinates of a box index.
std::vector<std::int64_t> box_coords(std::span<const std::uint64_t> half_widths,
                                     std::uint32_t index);
/// Half-widths of a Box or GenBox at level n.
std::vector<std::uint64_t> box_half_widths(const Family &family, std::uint64_t n);

/// Index of a hypercube vertex given as a bit string ("010" = (0,1,0)).
std::uint32_t cube_index(std::string_view bits);

/// Index of the tree node reached from the root by the given child ranks.
std::uint32_t tree_index(std::span<const std::uint32_t> children_per_height,
                         std::span<const std::uint32_t> path);

/// Child-count profile of a tree-shaped family at level n (k-ary, level tree).
std::vector<std::uint32_t> tree_children(const Family &family, std::uint64_t n);

template <class S>
Level<S> build_karytree(std::uint32_t k, const Rational &lambda, std::uint64_t n,
                        std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(KaryTree{k, lambda}, n, cap);
}
template <class S>
Level<S> build_height_path(std::uint32_t k, const Rational &lambda, std::uint64_t n) {
  return build_level<S>(HeightPath{k, lambda}, n);
}
template <class S>
Level<S> build_box(std::uint32_t d, std::uint64_t n, std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(Box{d}, n, cap);
}
template <class S>
Level<S> build_genbox(std::vector<AxisBound> bounds, std::uint64_t n,
                      std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(GenBox{std::move(bounds)}, n, cap);
}
template <class S>
Level<S> build_hypercube(std::uint64_t n, std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(Hypercube{}, n, cap);
}
template <class S>
Level<S> build_leveltree(LevelProfile profile, const Rational &gamma, std::uint64_t n,
                         std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(LevelTree{std::move(profile), gamma}, n, cap);
}
template <class S>
Level<S> build_star(GrowthLaw size, const Rational &gamma, std::uint64_t n,
                    std::uint64_t cap = kDefaultStateCap) {
  return build_level<S>(Star{size, gamma}, n, cap);
}

} // namespace rwogg

#endif
